//! Paul-trap dynamics beyond the pseudo-potential: Mathieu characteristic
//! exponent, truncated Floquet solutions, the Green's function, and the
//! resulting coherent and heating variances.
//!
//! The dimensionless time is `τ = Ωt/2`; [`tau_of`] is the only place that
//! conversion is written down.

mod exponent;
mod solution;
mod variance;

use thiserror::Error;

pub use exponent::{
    beta_from_monodromy, characteristic_exponent, hill_function, monodromy, q_for_beta,
    MONODROMY_STEPS,
};
pub use solution::{floquet_coefficients, FloquetSolution, TildeState};
pub use variance::{full_coherent_variance, full_heating_variance, FullModel};

use crate::phys::PaulTrap;

pub const DEFAULT_BETA_TOL: f64 = 1e-12;
/// Truncation used unless a caller asks otherwise.
pub const DEFAULT_N_MAX: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloquetError {
    #[error("(a = {a}, q = {q}) is outside the stability region (|tr M| = {trace})")]
    Unstable { a: f64, q: f64, trace: f64 },
    #[error("(a = {a}, q = {q}) is stable but not in the first zone")]
    OutsideFirstZone { a: f64, q: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[inline]
pub fn tau_of(t: f64, omega_rf: f64) -> f64 {
    0.5 * omega_rf * t
}

/// Full model for the u axis of `paul`, truncated at `n_max`.
pub fn model_for(paul: &PaulTrap, n_max: usize) -> Result<FullModel, FloquetError> {
    let sol = floquet_coefficients(paul.a_u, paul.q_u, paul.beta, n_max)?;
    Ok(FullModel::new(sol, paul.omega_rf, paul.rf_phase0))
}
