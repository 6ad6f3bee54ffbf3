//! Kick-angle laws: discrete distributions, one-step Markov kernels, their
//! random mixtures, and the processes the engines consume.

mod distribution;
mod kernel;
mod parrondo;
mod process;

pub use distribution::DiscreteDistribution;
pub use kernel::{mix_kernels, trajectory_log_probability, KernelBranch, MarkovKickKernel};
pub use parrondo::{parrondo_pair, private_bath_a, private_bath_b, ParrondoParams, MIN_EPSILON};
pub use process::NoiseProcess;

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Two angles closer than this (on the circle) are the same angle.
pub const ANGLE_TOL: f64 = 1e-9;

/// Tolerance on probability weights summing to one.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Wraps an angle into `(-π, π]`.
pub fn canonical_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("angle {theta} is not finite")));
    }
    Ok(wrap(theta))
}

pub(crate) fn wrap(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Circular match within [`ANGLE_TOL`]; inputs must be finite.
pub fn angles_match(x: f64, y: f64) -> bool {
    wrap(x - y).abs() <= ANGLE_TOL
}
