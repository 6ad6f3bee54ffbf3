//! Decay-law fits and the two-bath mixing comparison.
//!
//! Both decay models are one-parameter fits of `ln|f_k|` through the origin
//! (`f_0 = 1`, so step 0 is excluded):
//!
//! * linear exponent: `ln|f_k| = −λ·k`  (independent kicks),
//! * quadratic exponent: `ln|f_k| = −λ·k²` (fully correlated kicks).
//!
//! The model with the smaller sum of squared residuals wins; ties go to the
//! linear model.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::propagate_markov;
use crate::noise::{mix_kernels, MarkovKickKernel};
use crate::trace::CoherenceTrace;

/// Points with `|f| ≤` this are below double-precision usefulness.
pub const MODULUS_FLOOR: f64 = 1e-13;
/// Points with `|f| ≤ NOISE_FLOOR_SIGMAS · stderr` are treated as noise.
pub const NOISE_FLOOR_SIGMAS: f64 = 5.0;
pub const MIN_FIT_POINTS: usize = 3;
/// Smallest `γ_mixed − max(γ_A, γ_B)` that counts as an improvement.
pub const PARRONDO_TOLERANCE: f64 = 1e-6;
pub const MIN_REPORT_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    LinearExponent,
    QuadraticExponent,
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayModel::LinearExponent => "linear",
            DecayModel::QuadraticExponent => "quadratic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `λ̂` of the chosen model.
    pub rate: f64,
    /// `e^{−λ̂}`; a per-step factor only for the linear model.
    pub per_step_factor: f64,
    pub phase_per_step: f64,
    pub rate_linear: f64,
    pub rate_quadratic: f64,
    pub sse_linear: f64,
    pub sse_quadratic: f64,
    pub points_used: usize,
}

impl DecayFit {
    /// Per-step factor under the linear-exponent model, whatever was chosen.
    pub fn linear_gamma(&self) -> f64 {
        (-self.rate_linear).exp()
    }
}

/// Least-squares through-origin slope of `y` on `x`, clamped to `≥ 0` after
/// negation, with its residual sum of squares.
fn decay_rate(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let rate = (-sxy / sxx).max(0.0);
    let sse = x.iter().zip(y).map(|(a, b)| (b + rate * a).powi(2)).sum();
    (rate, sse)
}

pub fn fit_decay(trace: &CoherenceTrace) -> Result<DecayFit> {
    let usable: Vec<_> = trace
        .points()
        .iter()
        .filter(|p| p.n > 0)
        .filter(|p| {
            let m = p.factor.norm();
            m > MODULUS_FLOOR
                && p.stderr
                    .is_none_or(|se| m > NOISE_FLOOR_SIGMAS * se.magnitude())
        })
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            required: MIN_FIT_POINTS,
        });
    }

    let k: Vec<f64> = usable.iter().map(|p| p.n as f64).collect();
    let k2: Vec<f64> = k.iter().map(|v| v * v).collect();
    let log_mod: Vec<f64> = usable.iter().map(|p| p.factor.norm().ln()).collect();
    let (rate_linear, sse_linear) = decay_rate(&k, &log_mod);
    let (rate_quadratic, sse_quadratic) = decay_rate(&k2, &log_mod);

    let mut previous = 0.0;
    let phases: Vec<f64> = usable
        .iter()
        .map(|p| {
            let mut phi = p.factor.arg();
            while phi - previous > PI {
                phi -= TAU;
            }
            while phi - previous <= -PI {
                phi += TAU;
            }
            previous = phi;
            phi
        })
        .collect();
    let phase_per_step = k.iter().zip(&phases).map(|(a, b)| a * b).sum::<f64>()
        / k.iter().map(|v| v * v).sum::<f64>();

    let (model, rate) = if sse_quadratic < sse_linear {
        (DecayModel::QuadraticExponent, rate_quadratic)
    } else {
        (DecayModel::LinearExponent, rate_linear)
    };
    Ok(DecayFit {
        model,
        rate,
        per_step_factor: (-rate).exp(),
        phase_per_step,
        rate_linear,
        rate_quadratic,
        sse_linear,
        sse_quadratic,
        points_used: usable.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParrondoReport {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_mixed: f64,
    pub improvement: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub steps: usize,
}

/// Compares the per-step coherence factor of two kernels against their
/// random mixture `w·A + (1−w)·B` (started from `initial_a`).
pub fn parrondo_report(
    kernel_a: &MarkovKickKernel,
    kernel_b: &MarkovKickKernel,
    weight_a: f64,
    initial_a: f64,
    initial_b: f64,
    n: usize,
) -> Result<ParrondoReport> {
    if n < MIN_REPORT_STEPS {
        return Err(Error::InsufficientData {
            usable: n,
            required: MIN_REPORT_STEPS,
        });
    }
    if !(0.0..=1.0).contains(&weight_a) {
        return Err(Error::invalid(format!(
            "weight_a = {weight_a} outside [0, 1]"
        )));
    }
    let mixed = mix_kernels(&[
        (kernel_a.clone(), weight_a),
        (kernel_b.clone(), 1.0 - weight_a),
    ])?;
    let gamma = |kernel: &MarkovKickKernel, start: f64| -> Result<f64> {
        Ok(fit_decay(&propagate_markov(kernel, start, n)?)?.linear_gamma())
    };
    let gamma_a = gamma(kernel_a, initial_a)?;
    let gamma_b = gamma(kernel_b, initial_b)?;
    let gamma_mixed = gamma(&mixed, initial_a)?;
    let improvement = gamma_mixed - gamma_a.max(gamma_b);
    Ok(ParrondoReport {
        gamma_a,
        gamma_b,
        gamma_mixed,
        improvement,
        tolerance: PARRONDO_TOLERANCE,
        verdict: improvement > PARRONDO_TOLERANCE,
        steps: n,
    })
}
