//! Physical constants, unit conversions and the parameter containers shared
//! by every other module.
//!
//! Everything inside the crate is SI. Nanometres and microseconds only appear
//! at reporting boundaries, through [`units`].

pub mod params;
pub mod units;

pub use params::{
    default_paper_params, derive_mathieu_params, paper_params_at_ratio, sphere_mass,
    FrequencyRatio, OpticalTrap, ParamError, ParticleParams, PaulTrap, DEFAULT_BATH_TEMPERATURE,
    DEFAULT_CHARGE_NUMBER, DEFAULT_DENSITY, DEFAULT_RATIO, DEFAULT_RELEASE_PHASE, PAPER_DIAMETER, PAPER_FX_HZ,
    PAPER_FY_HZ, PAPER_HEATING_HZ, PAPER_RATIOS, PAPER_RF_HZ, PAPER_T_COM,
};

/// CODATA 2018 exact and recommended values.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants;

impl PhysicalConstants {
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380_649e-23;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Elementary charge, C.
    pub const E_CHARGE: f64 = 1.602_176_634e-19;
}

pub const K_B: f64 = PhysicalConstants::K_B;
pub const HBAR: f64 = PhysicalConstants::HBAR;
pub const E_CHARGE: f64 = PhysicalConstants::E_CHARGE;

/// `2π · f` for a frequency given in Hz.
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    std::f64::consts::TAU * f_hz
}
