//! Single-qubit density matrix restricted to phase damping.
//!
//! The state is stored as the population `a` of |0⟩ and the coherence `b`
//! (row 0, column 1); the |1⟩ population is always `1 - a`.
//!
//! Rotation convention: `R_z(θ) = diag(e^{-iθ/2}, e^{+iθ/2})`, so the kick
//! `ρ ↦ R_z(θ) ρ R_z(θ)†` multiplies `b` by `e^{-iθ}`. Every conjugation
//! choice elsewhere in the crate follows from this.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on trace and positivity checks.
pub const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    a: f64,
    b: Complex64,
}

impl DensityMatrix {
    /// Builds a state from both populations and the coherence.
    ///
    /// `a + d` must be 1 within [`STATE_TOL`]; the stored state is
    /// renormalized so that the trace is exact.
    pub fn new(a: f64, d: f64, b: Complex64) -> Result<Self> {
        if !(a.is_finite() && d.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::invalid("density matrix entries must be finite"));
        }
        let trace = a + d;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("trace a + d = {trace} is not 1")));
        }
        Self::from_population(a / trace, b)
    }

    /// Builds a state from the |0⟩ population and the coherence.
    pub fn from_population(a: f64, b: Complex64) -> Result<Self> {
        if !(a.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::invalid("density matrix entries must be finite"));
        }
        if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&a) {
            return Err(Error::invalid(format!("population a = {a} outside [0, 1]")));
        }
        let a = a.clamp(0.0, 1.0);
        let det = a * (1.0 - a) - b.norm_sqr();
        if det < -STATE_TOL {
            return Err(Error::invalid(format!(
                "not positive semidefinite: a·d − |b|² = {det}"
            )));
        }
        Ok(Self { a, b })
    }

    /// The pure superposition `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self {
            a: 0.5,
            b: Complex64::new(0.5, 0.0),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> f64 {
        1.0 - self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Applies a single kick `R_z(θ) ρ R_z(θ)†`.
    pub fn apply_phase_rotation(&self, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid(format!(
                "rotation angle {theta} is not finite"
            )));
        }
        Ok(Self {
            a: self.a,
            b: self.b * Complex64::from_polar(1.0, -theta),
        })
    }

    /// Multiplies the coherence by an averaged factor, `b ↦ factor · b`.
    ///
    /// The factor is the multiplier actually applied to `b`; callers holding
    /// a characteristic value `E[e^{iΘ}]` must pass its conjugate.
    pub fn dephase(&self, factor: Complex64) -> Result<Self> {
        if !(factor.re.is_finite() && factor.im.is_finite()) {
            return Err(Error::invalid("dephasing factor must be finite"));
        }
        let modulus = factor.norm();
        if modulus > 1.0 + STATE_TOL {
            return Err(Error::ContractViolation(format!(
                "dephasing factor modulus {modulus} exceeds 1"
            )));
        }
        Ok(Self {
            a: self.a,
            b: self.b * factor,
        })
    }

    pub fn coherence_magnitude(&self) -> f64 {
        self.b.norm()
    }

    /// `Tr ρ² = a² + d² + 2|b|²`.
    pub fn purity(&self) -> f64 {
        let d = self.d();
        self.a * self.a + d * d + 2.0 * self.b.norm_sqr()
    }

    /// `a·d − |b|²`, non-negative for physical states.
    pub fn determinant(&self) -> f64 {
        self.a * self.d() - self.b.norm_sqr()
    }
}
