//! Deterministic propagation of the coherence factor.
//!
//! For one-step Markov kernels the characteristic function of the net
//! rotation obeys a backward recursion over the finite atom universe:
//!
//! ```text
//! f_1(θ)     = Σ_φ P(φ|θ) e^{iφ}
//! f_{k+1}(θ) = Σ_φ P(φ|θ) e^{iφ} f_k(φ)
//! ```
//!
//! so `f_k(θ₀) = E[e^{iΘ_k} | θ₀]`. Under the `R_z` convention of
//! [`crate::state`] the coherence is multiplied by `conj(f_k(θ₀))`, which is
//! what traces report. Symmetric atoms (±π/2, −3π/4 vs π/4) are not
//! simplified analytically; their cancellation happens in floating point.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{
    angles_match, canonical_angle, DiscreteDistribution, MarkovKickKernel, NoiseProcess,
};
use crate::state::DensityMatrix;
use crate::trace::CoherenceTrace;

/// Largest `n` accepted by [`enumerate_exact`].
pub const MAX_ENUMERATION_STEPS: usize = 12;

/// `e^{-nλ}` for i.i.d. Gaussian kicks of variance `2λ`.
pub fn coherence_factor_iid_gaussian(lambda: f64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((-(n as f64) * lambda).exp())
}

/// `e^{-n²λ}` when every kick repeats the first Gaussian draw.
pub fn coherence_factor_fully_correlated(lambda: f64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    let n = n as f64;
    Ok((-n * n * lambda).exp())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda = {lambda} must be > 0")))
    }
}

/// `E[e^{iθ}]` of a single kick.
pub fn characteristic_value(dist: &DiscreteDistribution) -> Complex64 {
    dist.characteristic_value()
}

/// Angles that can occur as kicks when starting from `initial_angle`,
/// sorted ascending. The initial angle itself is included only if it can
/// be emitted.
pub fn reachable_support(kernel: &MarkovKickKernel, initial_angle: f64) -> Result<Vec<f64>> {
    let start = canonical_angle(initial_angle)?;
    let mut found: Vec<f64> = Vec::new();
    let mut frontier = vec![start];
    while let Some(theta) = frontier.pop() {
        for &(atom, w) in kernel.emission(theta).atoms() {
            if w > 0.0 && !found.iter().any(|&a| angles_match(a, atom)) {
                found.push(atom);
                frontier.push(atom);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    Ok(found)
}

/// `f_k` over the recursion support.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceFactorTable {
    pub step_index: usize,
    pub support: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CoherenceFactorTable {
    pub fn value_at(&self, angle: f64) -> Option<Complex64> {
        self.support
            .iter()
            .position(|&a| angles_match(a, angle))
            .map(|i| self.values[i])
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Precomputed transition coefficients `P(φ|θ)·e^{iφ}` over a closed support.
///
/// The support is the initial angle, every condition angle, and every atom
/// of every emission, so lookups of `f_k(φ)` never miss.
#[derive(Debug, Clone)]
pub struct MarkovRecursion {
    support: Vec<f64>,
    start: usize,
    transitions: Vec<Vec<(usize, Complex64)>>,
}

impl MarkovRecursion {
    pub fn new(kernel: &MarkovKickKernel, initial_angle: f64) -> Result<Self> {
        let start_angle = canonical_angle(initial_angle)?;
        let mut support = vec![start_angle];
        let candidates = kernel.condition_angles().chain(
            kernel
                .emissions()
                .flat_map(|e| e.atoms().iter().map(|&(a, _)| a)),
        );
        for theta in candidates {
            if !support.iter().any(|&s| angles_match(s, theta)) {
                support.push(theta);
            }
        }
        support.sort_by(f64::total_cmp);
        let index_of = |theta: f64| support.iter().position(|&s| angles_match(s, theta));
        let start = index_of(start_angle).expect("initial angle is in the support");
        let transitions = support
            .iter()
            .map(|&theta| {
                kernel
                    .emission(theta)
                    .atoms()
                    .iter()
                    .map(|&(phi, w)| {
                        let j = index_of(phi).expect("emission atoms are in the support");
                        (j, Complex64::from_polar(w, phi))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            support,
            start,
            transitions,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// One application of the recursion: `f_{k+1}` from `f_k`.
    pub fn step(&self, previous: &[Complex64]) -> Vec<Complex64> {
        self.transitions
            .iter()
            .map(|row| row.iter().map(|&(j, c)| c * previous[j]).sum())
            .collect()
    }

    /// Tables `f_1..=f_n`.
    pub fn tables(&self, n: usize) -> Vec<CoherenceFactorTable> {
        let mut current = vec![Complex64::new(1.0, 0.0); self.support.len()];
        (1..=n)
            .map(|k| {
                current = self.step(&current);
                CoherenceFactorTable {
                    step_index: k,
                    support: self.support.clone(),
                    values: current.clone(),
                }
            })
            .collect()
    }

    /// `f_1(θ₀), …, f_n(θ₀)`.
    pub fn characteristic_sequence(&self, n: usize) -> Vec<Complex64> {
        let mut current = vec![Complex64::new(1.0, 0.0); self.support.len()];
        (0..n)
            .map(|_| {
                current = self.step(&current);
                current[self.start]
            })
            .collect()
    }
}

/// Coherence trace for `n ≥ 1` Markov kicks from `initial_angle`.
pub fn propagate_markov(
    kernel: &MarkovKickKernel,
    initial_angle: f64,
    n: usize,
) -> Result<CoherenceTrace> {
    if n == 0 {
        return Err(Error::invalid("propagation needs n ≥ 1"));
    }
    let recursion = MarkovRecursion::new(kernel, initial_angle)?;
    Ok(CoherenceTrace::exact(
        recursion
            .characteristic_sequence(n)
            .into_iter()
            .map(|f| f.conj()),
    ))
}

/// `f_1..=f_n` over the full recursion support.
pub fn coherence_tables(
    kernel: &MarkovKickKernel,
    initial_angle: f64,
    n: usize,
) -> Result<Vec<CoherenceFactorTable>> {
    Ok(MarkovRecursion::new(kernel, initial_angle)?.tables(n))
}

/// `f_n(θ₀)` by summing `Π P(θ_i|θ_{i-1}) · e^{iΣθ_i}` over every atom
/// sequence of length `n`. Exponential cost; used as an oracle.
pub fn enumerate_exact(
    kernel: &MarkovKickKernel,
    initial_angle: f64,
    n: usize,
) -> Result<Complex64> {
    if n > MAX_ENUMERATION_STEPS {
        return Err(Error::TooLarge(format!(
            "enumeration of {n} steps refused (limit {MAX_ENUMERATION_STEPS})"
        )));
    }
    let start = canonical_angle(initial_angle)?;
    Ok(enumerate_from(kernel, start, n, 1.0, 0.0))
}

fn enumerate_from(
    kernel: &MarkovKickKernel,
    previous: f64,
    remaining: usize,
    probability: f64,
    net_angle: f64,
) -> Complex64 {
    if remaining == 0 {
        return Complex64::from_polar(probability, net_angle);
    }
    kernel
        .emission(previous)
        .atoms()
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(theta, w)| {
            enumerate_from(
                kernel,
                theta,
                remaining - 1,
                probability * w,
                net_angle + theta,
            )
        })
        .sum()
}

/// Exact trace for steps `0..=n` and the final state.
pub fn exact_trace(
    process: &NoiseProcess,
    initial_state: &DensityMatrix,
    n: usize,
) -> Result<(CoherenceTrace, DensityMatrix)> {
    process.validate()?;
    let trace = match process {
        NoiseProcess::IidGaussian { lambda } => CoherenceTrace::exact(
            (1..=n)
                .map(|k| coherence_factor_iid_gaussian(*lambda, k).map(|f| Complex64::new(f, 0.0)))
                .collect::<Result<Vec<_>>>()?,
        ),
        NoiseProcess::FullyCorrelatedGaussian { lambda } => CoherenceTrace::exact(
            (1..=n)
                .map(|k| {
                    coherence_factor_fully_correlated(*lambda, k).map(|f| Complex64::new(f, 0.0))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        NoiseProcess::IidDiscrete { dist } => {
            let per_step = dist.characteristic_value().conj();
            CoherenceTrace::exact((1..=n).map(|k| per_step.powu(k as u32)))
        }
        NoiseProcess::Markov { .. } | NoiseProcess::Mixture { .. } => {
            let (kernel, initial_angle) = process
                .as_markov()?
                .expect("markov-like processes collapse to a kernel");
            if n == 0 {
                CoherenceTrace::exact(std::iter::empty())
            } else {
                propagate_markov(&kernel, initial_angle, n)?
            }
        }
    };
    let last = trace.last().expect("trace has step 0").factor;
    let final_state = initial_state.dephase(last)?;
    Ok((trace, final_state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{mix_kernels, parrondo_pair, ParrondoParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn pair(eps: f64) -> (MarkovKickKernel, MarkovKickKernel) {
        parrondo_pair(&ParrondoParams::new(eps, 0.5).unwrap()).unwrap()
    }

    fn mixed(eps: f64) -> MarkovKickKernel {
        let (a, b) = pair(eps);
        mix_kernels(&[(a, 0.5), (b, 0.5)]).unwrap()
    }

    #[test]
    fn gaussian_closed_forms() {
        let f = coherence_factor_iid_gaussian(0.02, 50).unwrap();
        assert!((f - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(coherence_factor_iid_gaussian(0.3, 0).unwrap(), 1.0);
        let g = coherence_factor_fully_correlated(0.001, 30).unwrap();
        assert!((g - 0.406_569_659_740_599_1).abs() < 1e-15);
        assert_eq!(
            coherence_factor_fully_correlated(0.07, 1).unwrap(),
            coherence_factor_iid_gaussian(0.07, 1).unwrap()
        );
        assert!(coherence_factor_iid_gaussian(0.0, 3).is_err());
        assert!(coherence_factor_fully_correlated(-0.1, 3).is_err());
    }

    #[test]
    fn support_examples() {
        let (a, _) = pair(0.1);
        let s = reachable_support(&a, 0.0).unwrap();
        assert_eq!(s, vec![-FRAC_PI_2, 0.0, FRAC_PI_2]);

        let eps = 1e-6;
        let s = reachable_support(&mixed(eps), 0.0).unwrap();
        assert_eq!(
            s,
            vec![-3.0 * FRAC_PI_4, -FRAC_PI_2, 0.0, eps, FRAC_PI_4, FRAC_PI_2]
        );

        let k = MarkovKickKernel::unconditional(DiscreteDistribution::point_mass(eps).unwrap());
        for start in [0.0, 2.0, -1.0] {
            assert_eq!(reachable_support(&k, start).unwrap(), vec![eps]);
        }
    }

    #[test]
    fn private_bath_a_decays_by_one_third() {
        let (a, _) = pair(0.1);
        let trace = propagate_markov(&a, 0.0, 30).unwrap();
        for p in &trace.points()[1..] {
            let want = 3f64.powi(-(p.n as i32));
            assert!(
                ((p.factor.norm() - want) / want).abs() < 1e-12,
                "n = {}",
                p.n
            );
        }
    }

    #[test]
    fn mixed_first_step_matches_closed_form() {
        let eps = 0.3;
        let tables = coherence_tables(&mixed(eps), 0.0, 1).unwrap();
        let f1 = tables[0].value_at(0.0).unwrap();
        let want = Complex64::from_polar(0.5, eps) + 1.0 / 6.0;
        assert!((f1.re - want.re).abs() < 1e-12);
        assert!((f1.im - want.im).abs() < 1e-12);
        let f1_eps = tables[0].value_at(eps).unwrap();
        let want_eps = Complex64::from_polar(1.0 / 6.0, eps) + 0.5;
        assert!((f1_eps - want_eps).norm() < 1e-12);
    }

    #[test]
    fn second_step_matches_hand_recursion() {
        let eps = 0.3;
        let k = mixed(eps);
        let e = Complex64::from_polar(1.0, eps);
        let f1_zero = e / 2.0 + 1.0 / 6.0;
        let f1_eps = 0.5 + e / 6.0;
        let f2_zero = e / 2.0 * f1_eps + f1_zero / 6.0;
        assert!((enumerate_exact(&k, 0.0, 2).unwrap() - f2_zero).norm() < 1e-12);
        let tables = coherence_tables(&k, 0.0, 2).unwrap();
        assert!((tables[1].value_at(0.0).unwrap() - f2_zero).norm() < 1e-12);
    }

    #[test]
    fn mixed_kernel_per_step_two_thirds() {
        let trace = propagate_markov(&mixed(1e-6), 0.0, 30).unwrap();
        for p in &trace.points()[1..] {
            let want = (2.0f64 / 3.0).powi(p.n as i32);
            assert!((p.factor.norm() - want).abs() < 1e-4, "n = {}", p.n);
        }
    }

    #[test]
    fn enumeration_examples_and_limit() {
        let (a, _) = pair(0.1);
        assert!(
            (enumerate_exact(&a, 0.0, 3).unwrap() - Complex64::new(1.0 / 27.0, 0.0)).norm() < 1e-15
        );
        let k = mixed(0.2);
        for start in [0.0, 0.2, 1.3] {
            let single = k.emission(start).characteristic_value();
            assert!((enumerate_exact(&k, start, 1).unwrap() - single).norm() < 1e-15);
        }
        assert_eq!(
            enumerate_exact(&a, 0.0, 0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(matches!(
            enumerate_exact(&a, 0.0, 13),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn exact_trace_dispatch() {
        let s = DensityMatrix::plus();
        let (t, fin) = exact_trace(&NoiseProcess::iid_gaussian(0.02).unwrap(), &s, 50).unwrap();
        assert_eq!(t.points().len(), 51);
        assert!((fin.coherence_magnitude() - 0.5 * (-1.0f64).exp()).abs() < 1e-15);

        let eps = 0.05;
        let (_, b) = pair(eps);
        let (t, _) = exact_trace(&NoiseProcess::markov(b, eps).unwrap(), &s, 4).unwrap();
        let f4 = t.factor(4).unwrap();
        assert!((f4.norm() - 3f64.powi(-4)).abs() < 1e-15);
        // b picks up e^{-iΘ}: phase -4ε
        assert!((f4.arg() + 4.0 * eps).abs() < 1e-12);

        let (t, fin) = exact_trace(&NoiseProcess::iid_gaussian(0.5).unwrap(), &s, 0).unwrap();
        assert_eq!(t.points().len(), 1);
        assert_eq!(t.factor(0), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(fin, s);
    }

    #[test]
    fn iid_discrete_is_geometric() {
        let dist = DiscreteDistribution::new(vec![(0.3, 0.2), (-1.1, 0.5), (2.5, 0.3)]).unwrap();
        let chi = dist.characteristic_value();
        let (t, _) = exact_trace(
            &NoiseProcess::iid_discrete(dist.clone()),
            &DensityMatrix::plus(),
            50,
        )
        .unwrap();
        let kernel = MarkovKickKernel::unconditional(dist);
        let recursion = propagate_markov(&kernel, 0.0, 50).unwrap();
        for n in 1..=50 {
            let want = chi.conj().powu(n as u32);
            assert!((t.factor(n).unwrap() - want).norm() < 1e-12);
            assert!((recursion.factor(n).unwrap() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn mixture_process_uses_mixed_kernel() {
        let params = ParrondoParams::new(0.01, 0.5).unwrap();
        let process = params.mixture_process(0.0).unwrap();
        let (t, _) = exact_trace(&process, &DensityMatrix::plus(), 12).unwrap();
        let direct = propagate_markov(&params.mixed_kernel().unwrap(), 0.0, 12).unwrap();
        assert_eq!(t, direct);
    }
}
