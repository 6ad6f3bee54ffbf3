//! Qubit dephasing under random phase kicks.
//!
//! A qubit coherence is rotated at each discrete timestep by a random angle
//! drawn from a kick process. Averaging over the kick law gives a complex
//! coherence factor multiplying the off-diagonal element of the density
//! matrix. The crate provides:
//!
//! * [`state`]: the 2×2 density matrix and the rotation / dephasing maps,
//! * [`noise`]: kick distributions, one-step Markov kernels, kernel mixing,
//! * [`exact`]: closed forms, the coherence-factor recursion, and a
//!   brute-force enumeration oracle,
//! * [`monte_carlo`]: seeded, parallel, bit-reproducible trajectory sampling,
//! * [`analysis`]: decay-law fitting and the two-bath mixing comparison,
//! * [`cli`]: the config schema and commands behind the `phasekick` binary.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod exact;
pub mod monte_carlo;
pub mod noise;
pub mod state;
pub mod trace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
