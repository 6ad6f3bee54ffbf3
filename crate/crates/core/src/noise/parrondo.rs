use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::{mix_kernels, DiscreteDistribution, MarkovKickKernel, NoiseProcess, ANGLE_TOL};
use crate::error::{Error, Result};

/// Smallest admissible marker angle (exclusive): ten times the match tolerance.
pub const MIN_EPSILON: f64 = 10.0 * ANGLE_TOL;

/// Parameters of the two-bath construction.
///
/// `epsilon` is the small angle that marks bath B's rest state so the kernel
/// remembers which bath acted last; `weight_a` is the probability of picking
/// bath A at each step when the baths are mixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParrondoParams {
    epsilon: f64,
    weight_a: f64,
}

impl ParrondoParams {
    pub fn new(epsilon: f64, weight_a: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > MIN_EPSILON) {
            return Err(Error::invalid(format!(
                "epsilon = {epsilon} must exceed {MIN_EPSILON}"
            )));
        }
        if !(0.0..=1.0).contains(&weight_a) {
            return Err(Error::invalid(format!(
                "weight_a = {weight_a} outside [0, 1]"
            )));
        }
        Ok(Self { epsilon, weight_a })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn weight_a(&self) -> f64 {
        self.weight_a
    }

    /// The algebraically mixed kernel `w·P_A + (1−w)·P_B`.
    pub fn mixed_kernel(&self) -> Result<MarkovKickKernel> {
        let (a, b) = parrondo_pair(self)?;
        mix_kernels(&[(a, self.weight_a), (b, 1.0 - self.weight_a)])
    }

    /// Per-step random choice between the two baths.
    pub fn mixture_process(&self, initial_angle: f64) -> Result<NoiseProcess> {
        let (a, b) = parrondo_pair(self)?;
        NoiseProcess::mixture(
            vec![(a, self.weight_a), (b, 1.0 - self.weight_a)],
            initial_angle,
        )
    }
}

/// The two private-bath kernels.
///
/// * A: previous angle in {−π/2, 0, π/2} → uniform on {0, −π/2, π/2};
///   otherwise a point mass at 0.
/// * B: previous angle in {−3π/4, ε, π/4} → uniform on {ε, −3π/4, π/4};
///   otherwise a point mass at ε.
pub fn parrondo_pair(params: &ParrondoParams) -> Result<(MarkovKickKernel, MarkovKickKernel)> {
    Ok((private_bath_a()?, private_bath_b(params.epsilon)?))
}

pub fn private_bath_a() -> Result<MarkovKickKernel> {
    let set = [0.0, -FRAC_PI_2, FRAC_PI_2];
    MarkovKickKernel::new(
        vec![(set.to_vec(), DiscreteDistribution::uniform(&set)?)],
        DiscreteDistribution::point_mass(0.0)?,
    )
}

pub fn private_bath_b(epsilon: f64) -> Result<MarkovKickKernel> {
    if !(epsilon.is_finite() && epsilon > MIN_EPSILON) {
        return Err(Error::invalid(format!(
            "epsilon = {epsilon} must exceed {MIN_EPSILON}"
        )));
    }
    let set = [epsilon, -3.0 * FRAC_PI_4, FRAC_PI_4];
    MarkovKickKernel::new(
        vec![(set.to_vec(), DiscreteDistribution::uniform(&set)?)],
        DiscreteDistribution::point_mass(epsilon)?,
    )
}
