use num_complex::Complex64;

use super::{angles_match, canonical_angle, WEIGHT_TOL};
use crate::error::{Error, Result};

/// A finite mixture of point masses on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Validates `(angle, weight)` atoms. Angles are canonicalized and must be
    /// pairwise distinct; weights must be non-negative and sum to one.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let atoms = canonical_atoms(atoms)?;
        for (i, &(x, _)) in atoms.iter().enumerate() {
            if atoms[..i].iter().any(|&(y, _)| angles_match(x, y)) {
                return Err(Error::invalid(format!("duplicate atom at angle {x}")));
            }
        }
        Self::checked(atoms)
    }

    /// Like [`new`](Self::new) but coincident atoms are merged by adding
    /// their weights, and zero-weight atoms are dropped.
    pub fn merged(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (angle, weight) in canonical_atoms(atoms)? {
            match out.iter_mut().find(|(a, _)| angles_match(*a, angle)) {
                Some(slot) => slot.1 += weight,
                None => out.push((angle, weight)),
            }
        }
        out.retain(|&(_, w)| w > 0.0);
        Self::checked(out)
    }

    pub fn point_mass(angle: f64) -> Result<Self> {
        Self::new(vec![(angle, 1.0)])
    }

    pub fn uniform(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid(
                "uniform distribution needs at least one angle",
            ));
        }
        let w = 1.0 / angles.len() as f64;
        Self::new(angles.iter().map(|&a| (a, w)).collect())
    }

    fn checked(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("distribution has no atoms"));
        }
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Weight of the atom matching `angle`, or 0.
    pub fn weight_at(&self, angle: f64) -> f64 {
        self.atoms
            .iter()
            .find(|&&(a, _)| angles_match(a, angle))
            .map_or(0.0, |&(_, w)| w)
    }

    /// `Σ w_j e^{iθ_j}`.
    pub fn characteristic_value(&self) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(theta, w)| Complex64::from_polar(w, theta))
            .sum()
    }

    /// Inverse-CDF draw for `u ∈ [0, 1)`.
    pub fn sample_with(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(theta, w) in &self.atoms {
            acc += w;
            if u < acc {
                return theta;
            }
        }
        // u fell in the rounding gap at the top of the CDF
        self.atoms
            .iter()
            .rev()
            .find(|&&(_, w)| w > 0.0)
            .map_or(self.atoms[0].0, |&(a, _)| a)
    }

    /// Same atoms scaled by `scale`, for building mixtures.
    pub(crate) fn scaled_atoms(&self, scale: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().map(move |&(a, w)| (a, scale * w))
    }
}

fn canonical_atoms(atoms: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    atoms
        .into_iter()
        .map(|(angle, weight)| {
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(Error::invalid(format!(
                    "atom weight {weight} must be finite and ≥ 0"
                )));
            }
            Ok((canonical_angle(angle)?, weight))
        })
        .collect()
}
