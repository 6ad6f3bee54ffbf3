use super::{canonical_angle, mix_kernels, DiscreteDistribution, MarkovKickKernel, WEIGHT_TOL};
use crate::error::{Error, Result};

/// A kick process: how successive rotation angles are generated.
///
/// Gaussian kicks have mean 0 and variance `2λ` and are unwrapped (supported
/// on the whole real line). Markov and mixture processes start from a
/// deterministic `initial_angle` that conditions the first kick but is not
/// itself applied as a rotation.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseProcess {
    IidGaussian {
        lambda: f64,
    },
    IidDiscrete {
        dist: DiscreteDistribution,
    },
    /// One Gaussian draw repeated at every step.
    FullyCorrelatedGaussian {
        lambda: f64,
    },
    Markov {
        kernel: MarkovKickKernel,
        initial_angle: f64,
    },
    /// At each step a component kernel is picked at random with the given
    /// weights, then the kick is drawn from it given the previous angle.
    Mixture {
        components: Vec<(MarkovKickKernel, f64)>,
        initial_angle: f64,
    },
}

impl NoiseProcess {
    pub fn iid_gaussian(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::IidGaussian { lambda })
    }

    pub fn fully_correlated_gaussian(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::FullyCorrelatedGaussian { lambda })
    }

    pub fn iid_discrete(dist: DiscreteDistribution) -> Self {
        Self::IidDiscrete { dist }
    }

    pub fn markov(kernel: MarkovKickKernel, initial_angle: f64) -> Result<Self> {
        Ok(Self::Markov {
            kernel,
            initial_angle: canonical_angle(initial_angle)?,
        })
    }

    pub fn mixture(components: Vec<(MarkovKickKernel, f64)>, initial_angle: f64) -> Result<Self> {
        let process = Self::Mixture {
            components,
            initial_angle: canonical_angle(initial_angle)?,
        };
        process.validate()?;
        Ok(process)
    }

    /// Re-checks the invariants, for values built through the public variants.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::IidGaussian { lambda } | Self::FullyCorrelatedGaussian { lambda } => {
                check_lambda(*lambda)
            }
            Self::IidDiscrete { .. } => Ok(()),
            Self::Markov { initial_angle, .. } => canonical_angle(*initial_angle).map(|_| ()),
            Self::Mixture {
                components,
                initial_angle,
            } => {
                canonical_angle(*initial_angle)?;
                if components.len() < 2 {
                    return Err(Error::invalid("a mixture needs at least two components"));
                }
                if components
                    .iter()
                    .any(|&(_, w)| !(w.is_finite() && w >= 0.0))
                {
                    return Err(Error::invalid("mixture weights must be finite and ≥ 0"));
                }
                let total: f64 = components.iter().map(|&(_, w)| w).sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::invalid(format!(
                        "mixture weights sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The single kernel with the same law as the process, for the discrete
    /// kinds. Mixtures collapse to their pointwise-mixed kernel.
    pub fn as_markov(&self) -> Result<Option<(MarkovKickKernel, f64)>> {
        Ok(match self {
            Self::IidDiscrete { dist } => {
                Some((MarkovKickKernel::unconditional(dist.clone()), 0.0))
            }
            Self::Markov {
                kernel,
                initial_angle,
            } => Some((kernel.clone(), *initial_angle)),
            Self::Mixture {
                components,
                initial_angle,
            } => Some((mix_kernels(components)?, *initial_angle)),
            Self::IidGaussian { .. } | Self::FullyCorrelatedGaussian { .. } => None,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::IidGaussian { .. } => "iid_gaussian",
            Self::IidDiscrete { .. } => "iid_discrete",
            Self::FullyCorrelatedGaussian { .. } => "fully_correlated_gaussian",
            Self::Markov { .. } => "markov",
            Self::Mixture { .. } => "mixture",
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda = {lambda} must be > 0")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_must_be_positive() {
        assert!(NoiseProcess::iid_gaussian(0.0).is_err());
        assert!(NoiseProcess::fully_correlated_gaussian(-1.0).is_err());
        assert!(NoiseProcess::iid_gaussian(0.02).is_ok());
        assert!(NoiseProcess::IidGaussian { lambda: f64::NAN }
            .validate()
            .is_err());
    }

    #[test]
    fn mixture_weights_checked() {
        let k = MarkovKickKernel::unconditional(DiscreteDistribution::point_mass(0.0).unwrap());
        assert!(NoiseProcess::mixture(vec![(k.clone(), 0.5), (k.clone(), 0.4)], 0.0).is_err());
        assert!(NoiseProcess::mixture(vec![(k.clone(), 1.0)], 0.0).is_err());
        assert!(NoiseProcess::mixture(vec![(k.clone(), 0.5), (k, 0.5)], 0.0).is_ok());
    }
}
