//! Pseudo-spectral simulation of coupled nonlinear Schrödinger systems
//!
//! ```text
//! i ∂_t u_j + Δu_j = Σ_k a_jk |u_k|^p |u_j|^{p-2} u_j,   j = 1..m
//! ```
//!
//! on periodic boxes in one to four dimensions, with the diagnostics needed
//! to study global existence and scattering numerically.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
