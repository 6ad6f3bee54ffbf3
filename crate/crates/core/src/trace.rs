//! Per-step coherence factors produced by the engines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Standard error of a Monte Carlo mean, per complex component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdErr {
    pub re: f64,
    pub im: f64,
}

impl StdErr {
    /// Combined scale `√(re² + im²)`, used as the error on the modulus.
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// One step of a trace: the multiplier on the coherence after `n` kicks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: usize,
    pub factor: Complex64,
    pub stderr: Option<StdErr>,
}

/// Coherence factors for steps `0..=n`; the factor at step 0 is exactly 1.
///
/// Factors are the multipliers applied to `b`, i.e. `E[e^{-iΘ_n}]` where
/// `Θ_n` is the net rotation after `n` kicks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTrace {
    steps: Vec<TracePoint>,
}

impl CoherenceTrace {
    /// Exact trace from the factors for steps `1..=n`.
    pub fn exact(factors: impl IntoIterator<Item = Complex64>) -> Self {
        let steps = std::iter::once(Complex64::new(1.0, 0.0))
            .chain(factors)
            .enumerate()
            .map(|(n, factor)| TracePoint {
                n,
                factor,
                stderr: None,
            })
            .collect();
        Self { steps }
    }

    /// Trace from arbitrary points. Points must be ordered by step.
    pub fn from_points(steps: Vec<TracePoint>) -> Self {
        Self { steps }
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.steps
    }

    /// Number of kicks covered (index of the last point).
    pub fn len_steps(&self) -> usize {
        self.steps.last().map_or(0, |p| p.n)
    }

    pub fn factor(&self, n: usize) -> Option<Complex64> {
        self.steps.iter().find(|p| p.n == n).map(|p| p.factor)
    }

    pub fn last(&self) -> Option<&TracePoint> {
        self.steps.last()
    }
}
