//! Finite-`N` observables of concrete random matrices.
//!
//! Moments, exclusive moments and finite-dimensional cumulants are computed
//! from trace pairings without ever building `ρ_N(p)`. Samplers cover the
//! Haar measures of `U, O, S, H, B`, Gaussian ensembles and matrix-valued
//! Brownian and Lévy processes; every Monte Carlo sample is a pure function
//! of `(seed, index)`.

pub mod ensemble;
pub mod error;
pub mod estimate;
pub mod invariance;
pub mod matrix;
pub mod moments;
pub mod process;
pub mod wick;

pub use error::{Error, Result};
pub use matrix::{CMatrix, Matrix, QMatrix, C64};
