//! Morawetz quantities, scattering residuals and per-sample records.

pub mod kernel;
mod morawetz;
mod record;
mod scattering;

pub use kernel::{diagonal_average, KernelTable};
pub use morawetz::{
    morawetz_action, morawetz_interaction_direct, morawetz_interaction_fft, morawetz_l4,
    morawetz_l8, Interaction, DIRECT_SUM_CAP,
};
pub use record::{morawetz_integrand, record, DiagnosticRecord, Recorder};
pub use scattering::{gn_ratio, scattering_pullback, scattering_residual};
