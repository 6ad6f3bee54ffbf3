use super::{angles_match, canonical_angle, DiscreteDistribution, WEIGHT_TOL};
use crate::error::{Error, Result};

/// Emission used when the previous angle lies in `conditions`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBranch {
    conditions: Vec<f64>,
    emission: DiscreteDistribution,
}

impl KernelBranch {
    pub fn conditions(&self) -> &[f64] {
        &self.conditions
    }

    pub fn emission(&self) -> &DiscreteDistribution {
        &self.emission
    }
}

/// One-step conditional kick law `P(θ_i | θ_{i-1})`.
///
/// The previous angle selects the first branch whose condition set contains
/// it (within [`ANGLE_TOL`](super::ANGLE_TOL)); any other angle falls through
/// to the default emission.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKickKernel {
    branches: Vec<KernelBranch>,
    default: DiscreteDistribution,
}

impl MarkovKickKernel {
    /// Condition sets must be non-empty and pairwise disjoint.
    pub fn new(
        branches: Vec<(Vec<f64>, DiscreteDistribution)>,
        default: DiscreteDistribution,
    ) -> Result<Self> {
        let mut seen: Vec<f64> = Vec::new();
        let mut built = Vec::with_capacity(branches.len());
        for (i, (conditions, emission)) in branches.into_iter().enumerate() {
            if conditions.is_empty() {
                return Err(Error::invalid(format!(
                    "branch {i} has an empty condition set"
                )));
            }
            let mut canon = Vec::with_capacity(conditions.len());
            for theta in conditions {
                let theta = canonical_angle(theta)?;
                if seen.iter().any(|&s| angles_match(s, theta)) {
                    return Err(Error::invalid(format!(
                        "condition angle {theta} appears in more than one place"
                    )));
                }
                seen.push(theta);
                canon.push(theta);
            }
            built.push(KernelBranch {
                conditions: canon,
                emission,
            });
        }
        Ok(Self {
            branches: built,
            default,
        })
    }

    /// Kernel with no condition sets: every step draws from `dist`.
    pub fn unconditional(dist: DiscreteDistribution) -> Self {
        Self {
            branches: Vec::new(),
            default: dist,
        }
    }

    pub fn branches(&self) -> &[KernelBranch] {
        &self.branches
    }

    pub fn default_emission(&self) -> &DiscreteDistribution {
        &self.default
    }

    /// Index of the branch whose condition set contains `previous`.
    pub fn branch_index(&self, previous: f64) -> Option<usize> {
        self.branches
            .iter()
            .position(|b| b.conditions.iter().any(|&c| angles_match(c, previous)))
    }

    /// Law of the next kick given the previous angle.
    pub fn emission(&self, previous: f64) -> &DiscreteDistribution {
        match self.branch_index(previous) {
            Some(i) => &self.branches[i].emission,
            None => &self.default,
        }
    }

    pub fn condition_angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.branches
            .iter()
            .flat_map(|b| b.conditions.iter().copied())
    }

    /// Every emission, default last.
    pub fn emissions(&self) -> impl Iterator<Item = &DiscreteDistribution> + '_ {
        self.branches
            .iter()
            .map(|b| &b.emission)
            .chain(std::iter::once(&self.default))
    }
}

/// Pointwise mixture `Σ_j w_j · P_j(·|θ)` of kernels.
///
/// The result's branches refine the inputs' condition sets: condition angles
/// that select the same branch in every component share one output branch.
/// Coincident atoms are merged and zero-weight atoms dropped, so a weight
/// vector `(1, 0, …)` reproduces the first kernel's emissions exactly.
pub fn mix_kernels(components: &[(MarkovKickKernel, f64)]) -> Result<MarkovKickKernel> {
    if components.len() < 2 {
        return Err(Error::invalid(format!(
            "mixing needs at least two kernels, got {}",
            components.len()
        )));
    }
    for (i, &(_, w)) in components.iter().enumerate() {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::invalid(format!(
                "mixture weight {i} = {w} must be ≥ 0"
            )));
        }
    }
    let total: f64 = components.iter().map(|&(_, w)| w).sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::invalid(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }

    let mut angles: Vec<f64> = Vec::new();
    for (kernel, _) in components {
        for theta in kernel.condition_angles() {
            if !angles.iter().any(|&a| angles_match(a, theta)) {
                angles.push(theta);
            }
        }
    }

    // group by the branch each component selects
    let mut groups: Vec<(Vec<Option<usize>>, Vec<f64>)> = Vec::new();
    for theta in angles {
        let key: Vec<Option<usize>> = components
            .iter()
            .map(|(k, _)| k.branch_index(theta))
            .collect();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(theta),
            None => groups.push((key, vec![theta])),
        }
    }

    let mut branches = Vec::with_capacity(groups.len());
    for (key, conditions) in groups {
        let atoms = components
            .iter()
            .zip(&key)
            .flat_map(|((kernel, w), idx)| {
                let emission = match idx {
                    Some(i) => &kernel.branches[*i].emission,
                    None => &kernel.default,
                };
                emission.scaled_atoms(*w)
            })
            .collect();
        branches.push((conditions, DiscreteDistribution::merged(atoms)?));
    }
    let default = DiscreteDistribution::merged(
        components
            .iter()
            .flat_map(|(k, w)| k.default.scaled_atoms(*w))
            .collect(),
    )?;
    MarkovKickKernel::new(branches, default)
}

/// Natural-log probability of `angles` under `kernel`, the first angle
/// conditioned on `initial_angle`.
///
/// Returns `Ok(None)` when some step is not an atom of its conditional law
/// (probability zero).
pub fn trajectory_log_probability(
    kernel: &MarkovKickKernel,
    initial_angle: f64,
    angles: &[f64],
) -> Result<Option<f64>> {
    if angles.is_empty() {
        return Err(Error::invalid("trajectory has no angles"));
    }
    let mut previous = canonical_angle(initial_angle)?;
    let mut log_p = 0.0;
    for &theta in angles {
        let theta = canonical_angle(theta)?;
        let w = kernel.emission(previous).weight_at(theta);
        if w <= 0.0 {
            return Ok(None);
        }
        log_p += w.ln();
        previous = theta;
    }
    Ok(Some(log_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{parrondo_pair, ParrondoParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn atoms_close(d: &DiscreteDistribution, want: &[(f64, f64)]) -> bool {
        d.atoms().len() == want.len()
            && want
                .iter()
                .all(|&(a, w)| (d.weight_at(a) - w).abs() <= 1e-15)
    }

    #[test]
    fn overlapping_conditions_rejected() {
        let p = DiscreteDistribution::point_mass(0.0).unwrap();
        let err = MarkovKickKernel::new(
            vec![(vec![0.0, 1.0], p.clone()), (vec![1.0 + 1e-12], p.clone())],
            p.clone(),
        );
        assert!(err.is_err());
        assert!(MarkovKickKernel::new(vec![(vec![], p.clone())], p).is_err());
    }

    #[test]
    fn mixed_parrondo_rows() {
        let eps = 1e-3;
        let (a, b) = parrondo_pair(&ParrondoParams::new(eps, 0.5).unwrap()).unwrap();
        let mixed = mix_kernels(&[(a, 0.5), (b, 0.5)]).unwrap();
        let sixth = 1.0 / 6.0;
        for theta in [-FRAC_PI_2, 0.0, FRAC_PI_2] {
            assert!(atoms_close(
                mixed.emission(theta),
                &[
                    (eps, 0.5),
                    (0.0, sixth),
                    (-FRAC_PI_2, sixth),
                    (FRAC_PI_2, sixth)
                ]
            ));
        }
        for theta in [-3.0 * FRAC_PI_4, eps, FRAC_PI_4] {
            assert!(atoms_close(
                mixed.emission(theta),
                &[
                    (0.0, 0.5),
                    (eps, sixth),
                    (-3.0 * FRAC_PI_4, sixth),
                    (FRAC_PI_4, sixth)
                ]
            ));
        }
        assert!(atoms_close(mixed.emission(1.0), &[(0.0, 0.5), (eps, 0.5)]));
        assert_eq!(mixed.branches().len(), 2);
    }

    #[test]
    fn mixing_identical_kernels_is_idempotent() {
        let (a, _) = parrondo_pair(&ParrondoParams::new(0.2, 0.5).unwrap()).unwrap();
        let mixed = mix_kernels(&[(a.clone(), 0.5), (a.clone(), 0.5)]).unwrap();
        for theta in [-FRAC_PI_2, 0.0, FRAC_PI_2, 0.4, 2.0] {
            let got = mixed.emission(theta);
            let want = a.emission(theta);
            assert_eq!(got.atoms().len(), want.atoms().len());
            for &(angle, w) in want.atoms() {
                assert!((got.weight_at(angle) - w).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn unit_weight_reproduces_first_kernel_exactly() {
        let (a, b) = parrondo_pair(&ParrondoParams::new(0.01, 0.5).unwrap()).unwrap();
        let mixed = mix_kernels(&[(a.clone(), 1.0), (b, 0.0)]).unwrap();
        for theta in [
            -FRAC_PI_2,
            0.0,
            FRAC_PI_2,
            0.01,
            FRAC_PI_4,
            -3.0 * FRAC_PI_4,
            1.7,
        ] {
            assert_eq!(mixed.emission(theta), a.emission(theta));
        }
    }

    #[test]
    fn mixing_rejects_bad_components() {
        let (a, b) = parrondo_pair(&ParrondoParams::new(0.01, 0.5).unwrap()).unwrap();
        assert!(mix_kernels(&[]).is_err());
        assert!(mix_kernels(&[(a.clone(), 1.0)]).is_err());
        assert!(mix_kernels(&[(a.clone(), 0.5), (b.clone(), 0.6)]).is_err());
        assert!(mix_kernels(&[(a, 1.5), (b, -0.5)]).is_err());
    }

    #[test]
    fn log_probability_examples() {
        let (a, b) = parrondo_pair(&ParrondoParams::new(0.01, 0.5).unwrap()).unwrap();
        let lp = trajectory_log_probability(&a, 0.0, &[FRAC_PI_2, -FRAC_PI_2, 0.0])
            .unwrap()
            .unwrap();
        assert!((lp - 3.0 * (1.0f64 / 3.0).ln()).abs() < 1e-14);
        assert_eq!(
            trajectory_log_probability(&a, 0.0, &[FRAC_PI_4]).unwrap(),
            None
        );
        // "otherwise" initial angle with a point-mass default
        assert_eq!(
            trajectory_log_probability(&b, 1.0, &[0.01]).unwrap(),
            Some(0.0)
        );
        assert!(trajectory_log_probability(&a, 0.0, &[]).is_err());
    }
}
