//! Scenario config schema (TOML).
//!
//! ```toml
//! schema_version = 1
//! steps = 50
//! engine = "exact"          # exact | monte_carlo | both
//! trajectories = 200000     # monte_carlo / both only
//! seed = 42                 # monte_carlo / both only
//! output = "trace.csv"
//!
//! [initial_state]
//! a = 0.5
//! b_re = 0.5
//! b_im = 0.0
//!
//! [process]
//! kind = "iid_gaussian"
//! lambda = 0.02
//! ```
//!
//! Process kinds: `iid_gaussian`, `fully_correlated_gaussian` (`lambda`),
//! `iid_discrete` (`atoms = [[angle, weight], ...]`), `markov`
//! (`initial_angle`, `kernel`), `mixture` (`initial_angle`,
//! `components = [{ weight, kernel }, ...]`) and `parrondo` (`epsilon`,
//! `weight_a`, optional `initial_angle`), the per-step random choice between
//! the two private-bath kernels.
//!
//! A kernel is either a preset (`preset = "parrondo_a"`, or
//! `preset = "parrondo_b"` with `epsilon`) or explicit
//! `branches = [{ conditions = [...], atoms = [[angle, weight], ...] }]`
//! plus `default = [[angle, weight], ...]`.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::Error;
use crate::noise::{
    private_bath_a, private_bath_b, DiscreteDistribution, MarkovKickKernel, NoiseProcess,
    ParrondoParams,
};
use crate::state::DensityMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    MonteCarlo,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub steps: usize,
    pub engine: Engine,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub output: PathBuf,
    /// Optional cap on `steps × trajectories` for the sampler.
    pub work_cap: Option<u64>,
    pub initial_state: InitialStateConfig,
    pub process: ProcessConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    pub a: f64,
    pub b_re: f64,
    pub b_im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    IidGaussian {
        lambda: f64,
    },
    FullyCorrelatedGaussian {
        lambda: f64,
    },
    IidDiscrete {
        atoms: Vec<[f64; 2]>,
    },
    Markov {
        initial_angle: f64,
        kernel: KernelConfig,
    },
    Mixture {
        initial_angle: f64,
        components: Vec<ComponentConfig>,
    },
    Parrondo {
        epsilon: f64,
        weight_a: f64,
        initial_angle: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub weight: f64,
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPreset {
    ParrondoA,
    ParrondoB,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub preset: Option<KernelPreset>,
    pub epsilon: Option<f64>,
    pub branches: Option<Vec<BranchConfig>>,
    pub default: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub conditions: Vec<f64>,
    pub atoms: Vec<[f64; 2]>,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub steps: usize,
    pub engine: Engine,
    pub sampling: Option<Sampling>,
    pub output: PathBuf,
    pub initial_state: DensityMatrix,
    pub process: NoiseProcess,
}

#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub trajectories: usize,
    pub seed: u64,
    pub work_cap: Option<u64>,
}

/// A config problem, named by field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn at(field: &str) -> impl Fn(Error) -> ConfigError + '_ {
    move |e| ConfigError(format!("field `{field}`: {e}"))
}

fn missing(field: &str, why: &str) -> ConfigError {
    ConfigError(format!("missing field `{field}` ({why})"))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))
    }

    pub fn validate(self) -> Result<Scenario, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError(format!(
                "field `schema_version`: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let sampling = match self.engine {
            Engine::Exact => None,
            Engine::MonteCarlo | Engine::Both => {
                let why = "required when engine uses monte_carlo";
                let trajectories = self
                    .trajectories
                    .ok_or_else(|| missing("trajectories", why))?;
                let seed = self.seed.ok_or_else(|| missing("seed", why))?;
                if trajectories == 0 {
                    return Err(ConfigError("field `trajectories`: must be ≥ 1".into()));
                }
                Some(Sampling {
                    trajectories,
                    seed,
                    work_cap: self.work_cap,
                })
            }
        };
        let s = &self.initial_state;
        let initial_state = DensityMatrix::from_population(s.a, Complex64::new(s.b_re, s.b_im))
            .map_err(at("initial_state"))?;
        let process = self.process.build()?;
        Ok(Scenario {
            steps: self.steps,
            engine: self.engine,
            sampling,
            output: self.output,
            initial_state,
            process,
        })
    }
}

fn distribution(atoms: &[[f64; 2]], field: &str) -> Result<DiscreteDistribution, ConfigError> {
    DiscreteDistribution::new(atoms.iter().map(|&[a, w]| (a, w)).collect()).map_err(at(field))
}

impl ProcessConfig {
    pub fn build(&self) -> Result<NoiseProcess, ConfigError> {
        match self {
            ProcessConfig::IidGaussian { lambda } => {
                NoiseProcess::iid_gaussian(*lambda).map_err(at("process.lambda"))
            }
            ProcessConfig::FullyCorrelatedGaussian { lambda } => {
                NoiseProcess::fully_correlated_gaussian(*lambda).map_err(at("process.lambda"))
            }
            ProcessConfig::IidDiscrete { atoms } => Ok(NoiseProcess::iid_discrete(distribution(
                atoms,
                "process.atoms",
            )?)),
            ProcessConfig::Markov {
                initial_angle,
                kernel,
            } => {
                let kernel = kernel.build("process.kernel")?;
                NoiseProcess::markov(kernel, *initial_angle).map_err(at("process.initial_angle"))
            }
            ProcessConfig::Mixture {
                initial_angle,
                components,
            } => {
                let built = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        Ok((
                            c.kernel.build(&format!("process.components[{i}].kernel"))?,
                            c.weight,
                        ))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                NoiseProcess::mixture(built, *initial_angle).map_err(at("process.components"))
            }
            ProcessConfig::Parrondo {
                epsilon,
                weight_a,
                initial_angle,
            } => {
                let params =
                    ParrondoParams::new(*epsilon, *weight_a).map_err(at("process.epsilon"))?;
                params
                    .mixture_process(initial_angle.unwrap_or(0.0))
                    .map_err(at("process"))
            }
        }
    }
}

impl KernelConfig {
    pub fn build(&self, path: &str) -> Result<MarkovKickKernel, ConfigError> {
        match self.preset {
            Some(preset) => {
                if self.branches.is_some() || self.default.is_some() {
                    return Err(ConfigError(format!(
                        "field `{path}`: `preset` cannot be combined with `branches`/`default`"
                    )));
                }
                match preset {
                    KernelPreset::ParrondoA => private_bath_a().map_err(at(path)),
                    KernelPreset::ParrondoB => {
                        let field = format!("{path}.epsilon");
                        let eps = self
                            .epsilon
                            .ok_or_else(|| missing(&field, "required by preset parrondo_b"))?;
                        private_bath_b(eps).map_err(at(&field))
                    }
                }
            }
            None => {
                let default_field = format!("{path}.default");
                let default = self
                    .default
                    .as_ref()
                    .ok_or_else(|| missing(&default_field, "required without a preset"))?;
                let default = distribution(default, &default_field)?;
                let branches = self
                    .branches
                    .iter()
                    .flatten()
                    .enumerate()
                    .map(|(i, b)| {
                        Ok((
                            b.conditions.clone(),
                            distribution(&b.atoms, &format!("{path}.branches[{i}].atoms"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                MarkovKickKernel::new(branches, default).map_err(at(&format!("{path}.branches")))
            }
        }
    }
}
