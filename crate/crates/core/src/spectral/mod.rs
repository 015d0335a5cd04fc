//! Periodic-box discretization, discrete Fourier analysis and norms.

mod field;
mod grid;
pub mod norms;

pub use field::{ComplexField, Representation};
pub use grid::{signed_frequency, Grid, MAX_DIM};
pub(crate) use grid::advance;
pub use norms::{
    localized_l2_sup, lp_integral, lp_norm, mixed_spacetime_norm, sobolev_norm, w1p_norm,
};
