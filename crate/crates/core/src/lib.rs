//! Finite-dimensional quantum measurement, two ways.
//!
//! The collapse route replaces a state by its diagonal in the measured
//! eigenbasis. The premeasurement route couples the system unitarily to a
//! pointer apparatus, traces the system out, and restricts the apparatus
//! state to a commutative algebra of simultaneously readable pointer
//! observables. The restricted state is a probability measure on the
//! algebra's spectrum, and it coincides with the collapsed diagonal.
//!
//! Module map:
//! - [`numerics`]: dense complex matrices, Jacobi eigensolver, Kronecker products
//! - [`state`]: state vectors, density matrices, partial trace
//! - [`observable`]: spectral measures, joint diagonalization, Born rule, dynamics
//! - [`premeasurement`]: apparatus, coupling unitary, collapse map, sampling
//! - [`algebra`]: abelian algebras, spectra, restriction of states
//! - [`scenario`], [`experiment`], [`report`], [`verify`]: the CLI-facing layer

pub mod algebra;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod observable;
pub mod premeasurement;
pub mod random;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
