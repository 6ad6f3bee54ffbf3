//! Trajectory sampling and ensemble averages of `e^{-iΘ_k}`.
//!
//! Each trajectory owns a ChaCha8 stream keyed by the master seed with the
//! trajectory index as the stream id, so trajectory `t` draws the same
//! angles no matter which thread runs it. Trajectories are grouped into
//! fixed-size chunks; chunk statistics are merged in chunk order, which
//! makes the estimate bit-identical for any degree of parallelism.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{wrap, DiscreteDistribution, MarkovKickKernel, NoiseProcess};
use crate::trace::{CoherenceTrace, StdErr, TracePoint};

/// Default cap on `steps × trajectories`.
pub const DEFAULT_WORK_CAP: u64 = 10_000_000_000;

const CHUNK: usize = 1024;

/// Conditional law of the next kick.
#[derive(Debug, Clone, PartialEq)]
pub enum KickLaw {
    Discrete(DiscreteDistribution),
    Normal { mean: f64, std_dev: f64 },
}

/// A kick rule that may depend on the whole history `θ_1..θ_{i-1}`.
pub trait HistoryRule: Send + Sync {
    fn next_law(&self, history: &[f64]) -> KickLaw;
}

impl<F> HistoryRule for F
where
    F: Fn(&[f64]) -> KickLaw + Send + Sync,
{
    fn next_law(&self, history: &[f64]) -> KickLaw {
        self(history)
    }
}

#[derive(Clone)]
pub enum KickSource {
    Process(NoiseProcess),
    Custom(Arc<dyn HistoryRule>),
}

impl fmt::Debug for KickSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KickSource::Process(p) => f.debug_tuple("Process").field(p).finish(),
            KickSource::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SamplerSpec {
    source: KickSource,
    steps: usize,
    trajectories: usize,
    seed: u64,
    work_cap: u64,
}

impl SamplerSpec {
    pub fn new(source: KickSource, steps: usize, trajectories: usize, seed: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("sampler needs steps ≥ 1"));
        }
        if trajectories == 0 {
            return Err(Error::invalid("sampler needs trajectories ≥ 1"));
        }
        if let KickSource::Process(p) = &source {
            p.validate()?;
        }
        Ok(Self {
            source,
            steps,
            trajectories,
            seed,
            work_cap: DEFAULT_WORK_CAP,
        })
    }

    pub fn for_process(
        process: NoiseProcess,
        steps: usize,
        trajectories: usize,
        seed: u64,
    ) -> Result<Self> {
        Self::new(KickSource::Process(process), steps, trajectories, seed)
    }

    pub fn with_work_cap(mut self, cap: u64) -> Self {
        self.work_cap = cap;
        self
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn trajectories(&self) -> usize {
        self.trajectories
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub trace: CoherenceTrace,
    pub trajectories_used: usize,
}

/// Random stream of trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Kick angles `θ_1..θ_n` of one trajectory.
pub fn sample_trajectory(spec: &SamplerSpec, trajectory_index: usize) -> Result<Vec<f64>> {
    if trajectory_index >= spec.trajectories {
        return Err(Error::invalid(format!(
            "trajectory index {trajectory_index} out of range (0..{})",
            spec.trajectories
        )));
    }
    let mut rng = trajectory_rng(spec.seed, trajectory_index as u64);
    let mut angles = Vec::with_capacity(spec.steps);
    Sampler::new(&spec.source)?.fill(&mut rng, spec.steps, &mut angles);
    Ok(angles)
}

/// Ensemble estimate of the coherence factor for steps `0..=n`.
pub fn mc_trace(spec: &SamplerSpec) -> Result<McEstimate> {
    let requested = spec.steps as u128 * spec.trajectories as u128;
    if requested > spec.work_cap as u128 {
        return Err(Error::ResourceLimit {
            requested,
            cap: spec.work_cap,
        });
    }
    let sampler = Sampler::new(&spec.source)?;
    let n_chunks = spec.trajectories.div_ceil(CHUNK);
    let partials: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(spec.trajectories);
            sampler.chunk(spec.seed, lo..hi, spec.steps)
        })
        .collect();
    let mut total = Moments::new(spec.steps);
    for part in &partials {
        total.merge(part);
    }
    Ok(McEstimate {
        trace: total.into_trace(),
        trajectories_used: spec.trajectories,
    })
}

enum Sampler<'a> {
    Iid(IidLaw),
    Correlated(Normal<f64>),
    Markov {
        kernel: &'a MarkovKickKernel,
        initial: f64,
    },
    Mixture {
        components: &'a [(MarkovKickKernel, f64)],
        initial: f64,
    },
    Custom(&'a dyn HistoryRule),
}

enum IidLaw {
    Normal(Normal<f64>),
    Discrete(DiscreteDistribution),
}

fn gaussian(lambda: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, (2.0 * lambda).sqrt()).map_err(|e| Error::invalid(e.to_string()))
}

impl<'a> Sampler<'a> {
    fn new(source: &'a KickSource) -> Result<Self> {
        Ok(match source {
            KickSource::Custom(rule) => Sampler::Custom(rule.as_ref()),
            KickSource::Process(p) => match p {
                NoiseProcess::IidGaussian { lambda } => {
                    Sampler::Iid(IidLaw::Normal(gaussian(*lambda)?))
                }
                NoiseProcess::IidDiscrete { dist } => Sampler::Iid(IidLaw::Discrete(dist.clone())),
                NoiseProcess::FullyCorrelatedGaussian { lambda } => {
                    Sampler::Correlated(gaussian(*lambda)?)
                }
                NoiseProcess::Markov {
                    kernel,
                    initial_angle,
                } => Sampler::Markov {
                    kernel,
                    initial: *initial_angle,
                },
                NoiseProcess::Mixture {
                    components,
                    initial_angle,
                } => Sampler::Mixture {
                    components,
                    initial: *initial_angle,
                },
            },
        })
    }

    fn fill(&self, rng: &mut ChaCha8Rng, steps: usize, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Sampler::Iid(IidLaw::Normal(normal)) => {
                out.extend((0..steps).map(|_| normal.sample(rng)))
            }
            Sampler::Iid(IidLaw::Discrete(dist)) => {
                out.extend((0..steps).map(|_| dist.sample_with(rng.random())))
            }
            Sampler::Correlated(normal) => {
                let theta = normal.sample(rng);
                out.resize(steps, theta);
            }
            Sampler::Markov { kernel, initial } => {
                let mut previous = *initial;
                for _ in 0..steps {
                    previous = kernel.emission(previous).sample_with(rng.random());
                    out.push(previous);
                }
            }
            Sampler::Mixture {
                components,
                initial,
            } => {
                let mut previous = *initial;
                for _ in 0..steps {
                    let kernel = pick_component(components, rng.random());
                    previous = kernel.emission(previous).sample_with(rng.random());
                    out.push(previous);
                }
            }
            Sampler::Custom(rule) => {
                for _ in 0..steps {
                    let theta = match rule.next_law(out) {
                        KickLaw::Discrete(dist) => dist.sample_with(rng.random()),
                        KickLaw::Normal { mean, std_dev } => {
                            let z: f64 = rng.sample(rand_distr::StandardNormal);
                            mean + std_dev * z
                        }
                    };
                    out.push(theta);
                }
            }
        }
    }

    fn chunk(&self, seed: u64, range: std::ops::Range<usize>, steps: usize) -> Moments {
        let mut moments = Moments::new(steps);
        let mut angles = Vec::with_capacity(steps);
        let mut phasors = vec![Complex64::new(0.0, 0.0); steps];
        for t in range {
            let mut rng = trajectory_rng(seed, t as u64);
            self.fill(&mut rng, steps, &mut angles);
            let mut net = 0.0;
            for (slot, &theta) in phasors.iter_mut().zip(&angles) {
                net += theta;
                // wrapping keeps sin/cos accurate for long unwrapped walks
                *slot = Complex64::from_polar(1.0, -wrap(net));
            }
            moments.push(&phasors);
        }
        moments
    }
}

fn pick_component(components: &[(MarkovKickKernel, f64)], u: f64) -> &MarkovKickKernel {
    let mut acc = 0.0;
    for (kernel, w) in components {
        acc += w;
        if u < acc {
            return kernel;
        }
    }
    components
        .iter()
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map_or(&components[0].0, |(k, _)| k)
}

/// Running mean and centred second moment per step, per component.
struct Moments {
    count: f64,
    mean: Vec<Complex64>,
    m2_re: Vec<f64>,
    m2_im: Vec<f64>,
}

impl Moments {
    fn new(steps: usize) -> Self {
        Self {
            count: 0.0,
            mean: vec![Complex64::new(0.0, 0.0); steps],
            m2_re: vec![0.0; steps],
            m2_im: vec![0.0; steps],
        }
    }

    fn push(&mut self, sample: &[Complex64]) {
        self.count += 1.0;
        let rows = self
            .mean
            .iter_mut()
            .zip(&mut self.m2_re)
            .zip(&mut self.m2_im);
        for (((mean, m2_re), m2_im), &x) in rows.zip(sample) {
            let delta = x - *mean;
            *mean += delta / self.count;
            let after = x - *mean;
            *m2_re += delta.re * after.re;
            *m2_im += delta.im * after.im;
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        let n = self.count + other.count;
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            let scale = self.count * other.count / n;
            self.m2_re[k] += other.m2_re[k] + delta.re * delta.re * scale;
            self.m2_im[k] += other.m2_im[k] + delta.im * delta.im * scale;
            self.mean[k] += delta * (other.count / n);
        }
        self.count = n;
    }

    fn into_trace(self) -> CoherenceTrace {
        let n = self.count;
        let se = |m2: f64| {
            if n > 1.0 {
                (m2.max(0.0) / (n - 1.0) / n).sqrt()
            } else {
                0.0
            }
        };
        let zero = StdErr { re: 0.0, im: 0.0 };
        let points = std::iter::once(TracePoint {
            n: 0,
            factor: Complex64::new(1.0, 0.0),
            stderr: Some(zero),
        })
        .chain((0..self.mean.len()).map(|k| TracePoint {
            n: k + 1,
            factor: self.mean[k],
            stderr: Some(StdErr {
                re: se(self.m2_re[k]),
                im: se(self.m2_im[k]),
            }),
        }))
        .collect();
        CoherenceTrace::from_points(points)
    }
}
