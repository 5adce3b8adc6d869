//! Simulation of Shor's order-finding algorithm driven by a single pure
//! control qubit and a maximally mixed work register.
//!
//! The crate is organised bottom-up:
//!
//! - [`numtheory`]: exact integer primitives and brute-force oracles.
//! - [`orbits`]: the cycle decomposition of `x -> a*x mod N`.
//! - [`qpe`]: three phase-estimation engines (analytic, state vector,
//!   recycled-qubit sampler) that must agree on the outcome statistics.
//! - [`densmat`]: a small dense density-matrix engine with partial-transpose
//!   entanglement checks.
//! - [`pipeline`]: end-to-end factoring and repetition statistics.
//! - [`verify`]: the invariant checks behind `mixed-shor verify`.
//! - [`rng`]: seeded per-shot random streams.
//! - [`cli`]: the `mixed-shor` command-line front end.

pub mod circuit;
pub mod cli;
pub mod densmat;
mod error;
pub mod numtheory;
pub mod orbits;
pub mod pipeline;
pub mod qpe;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use numtheory::Fraction;
pub use orbits::{Orbit, OrbitTable};
pub use qpe::{Distribution, EigenLabel, PhaseShot};
