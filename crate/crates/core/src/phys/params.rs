use std::f64::consts::PI;

use thiserror::Error;

use super::{angular, E_CHARGE, HBAR, K_B};
use crate::floquet::{self, FloquetError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be finite and positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("charge number must be at least 1 for a Paul-trapped particle")]
    Uncharged,
    #[error("frequency ratio r = {0} must exceed 1 for an expansion protocol")]
    RatioBelowOne(f64),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ParamError::NotPositive { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ParamError::Negative { name, value })
    }
}

fn finite(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NotFinite { name, value })
    }
}

/// Silica sphere coupled to a residual-gas bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    /// m
    pub diameter: f64,
    /// kg/m³
    pub density: f64,
    /// kg, `density · (π/6) · diameter³`
    pub mass: f64,
    /// Number of elementary charges.
    pub n_e: u32,
    /// Gas damping rate, rad/s.
    pub gamma: f64,
    /// Gas temperature, K.
    pub t_bath: f64,
    /// Heating rate in phonons of the optical potential per second, rad/s.
    pub gamma_heat: f64,
}

impl ParticleParams {
    /// Gas-dominated heating: `Γ = γ k_B T / (ħ ω_o)`.
    pub fn new(
        diameter: f64,
        density: f64,
        n_e: u32,
        gamma: f64,
        t_bath: f64,
        omega_o: f64,
    ) -> Result<Self, ParamError> {
        let diameter = positive("diameter", diameter)?;
        let density = positive("density", density)?;
        let gamma = non_negative("gamma", gamma)?;
        let t_bath = positive("bath temperature", t_bath)?;
        let omega_o = positive("optical frequency", omega_o)?;
        if n_e == 0 {
            return Err(ParamError::Uncharged);
        }
        Ok(Self {
            diameter,
            density,
            mass: sphere_mass(diameter, density),
            n_e,
            gamma,
            t_bath,
            gamma_heat: gamma * K_B * t_bath / (HBAR * omega_o),
        })
    }

    /// Inverse of [`ParticleParams::new`]: the damping rate is derived from a
    /// measured heating rate, `γ = ħ ω_o Γ / (k_B T)`.
    pub fn from_heating_rate(
        diameter: f64,
        density: f64,
        n_e: u32,
        gamma_heat: f64,
        t_bath: f64,
        omega_o: f64,
    ) -> Result<Self, ParamError> {
        let gamma_heat = non_negative("heating rate", gamma_heat)?;
        let t_bath = positive("bath temperature", t_bath)?;
        let omega_o = positive("optical frequency", omega_o)?;
        let gamma = HBAR * omega_o * gamma_heat / (K_B * t_bath);
        Self::new(diameter, density, n_e, gamma, t_bath, omega_o)
    }

    /// Replaces the heating rate without touching `gamma`. The gas relation no
    /// longer holds afterwards.
    pub fn with_heating_override(mut self, gamma_heat: f64) -> Result<Self, ParamError> {
        self.gamma_heat = non_negative("heating rate", gamma_heat)?;
        Ok(self)
    }

    /// Same particle with the gas coupling switched off (γ = Γ = 0).
    pub fn without_bath(mut self) -> Self {
        self.gamma = 0.0;
        self.gamma_heat = 0.0;
        self
    }

    /// Diffusion constant of the thermal force per unit mass, `2γ k_B T / m`.
    pub fn force_diffusion(&self) -> f64 {
        2.0 * self.gamma * K_B * self.t_bath / self.mass
    }
}

pub fn sphere_mass(diameter: f64, density: f64) -> f64 {
    density * PI / 6.0 * (diameter * diameter * diameter)
}

/// Optical tweezer, eigenaxes x and y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalTrap {
    pub omega_x: f64,
    pub omega_y: f64,
    /// Effective frequency along u, `sqrt((ω_x² + ω_y²)/2)`.
    pub omega_u_eff: f64,
}

impl OpticalTrap {
    pub fn new(omega_x: f64, omega_y: f64) -> Result<Self, ParamError> {
        let omega_x = positive("omega_x", omega_x)?;
        let omega_y = positive("omega_y", omega_y)?;
        Ok(Self {
            omega_x,
            omega_y,
            omega_u_eff: ((omega_x * omega_x + omega_y * omega_y) / 2.0).sqrt(),
        })
    }

    pub fn period_x(&self) -> f64 {
        2.0 * PI / self.omega_x
    }

    pub fn period_y(&self) -> f64 {
        2.0 * PI / self.omega_y
    }
}

/// Linear Paul trap described by its Mathieu parameters along u and v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaulTrap {
    /// RF drive, rad/s.
    pub omega_rf: f64,
    pub a_u: f64,
    pub q_u: f64,
    /// v-axis parameters; the RF electrode pairs are driven in opposition so
    /// the default is `(a_u, -q_u)`.
    pub a_v: f64,
    pub q_v: f64,
    /// Characteristic exponent along u.
    pub beta: f64,
    /// Secular frequency along u, `β Ω / 2`.
    pub omega_p: f64,
    /// Drive phase at release (t = 0), rad.
    pub rf_phase0: f64,
}

impl PaulTrap {
    pub fn new(omega_rf: f64, a_u: f64, q_u: f64, rf_phase0: f64) -> Result<Self, ParamError> {
        let omega_rf = positive("omega_rf", omega_rf)?;
        finite("a_u", a_u)?;
        finite("q_u", q_u)?;
        finite("rf_phase0", rf_phase0)?;
        let beta = floquet::characteristic_exponent(a_u, q_u, floquet::DEFAULT_BETA_TOL)?;
        Ok(Self {
            omega_rf,
            a_u,
            q_u,
            a_v: a_u,
            q_v: -q_u,
            beta,
            omega_p: beta * omega_rf / 2.0,
            rf_phase0,
        })
    }

    /// Trap whose u-axis secular frequency is `omega_p` at the given `a_u`,
    /// obtained by inverting the characteristic exponent for `q_u ≥ 0`.
    pub fn from_secular(
        omega_rf: f64,
        a_u: f64,
        omega_p: f64,
        rf_phase0: f64,
    ) -> Result<Self, ParamError> {
        let omega_rf = positive("omega_rf", omega_rf)?;
        let omega_p = positive("omega_p", omega_p)?;
        let q_u = floquet::q_for_beta(a_u, 2.0 * omega_p / omega_rf)?;
        Self::new(omega_rf, a_u, q_u, rf_phase0)
    }

    /// Static harmonic confinement at `omega_p` (`q = 0`, `a = β²`): the
    /// pseudo-potential limit of the same trap.
    pub fn pseudo_potential(omega_rf: f64, omega_p: f64) -> Result<Self, ParamError> {
        let omega_rf = positive("omega_rf", omega_rf)?;
        let omega_p = positive("omega_p", omega_p)?;
        let beta = 2.0 * omega_p / omega_rf;
        Self::new(omega_rf, beta * beta, 0.0, 0.0)
    }

    pub fn with_v_axis(mut self, a_v: f64, q_v: f64) -> Result<Self, ParamError> {
        self.a_v = finite("a_v", a_v)?;
        self.q_v = finite("q_v", q_v)?;
        Ok(self)
    }

    pub fn with_rf_phase(mut self, rf_phase0: f64) -> Self {
        self.rf_phase0 = rf_phase0;
        self
    }

    pub fn rf_period(&self) -> f64 {
        2.0 * PI / self.omega_rf
    }

    /// Secular period `T_p`.
    pub fn secular_period(&self) -> f64 {
        2.0 * PI / self.omega_p
    }
}

/// `r = ω_u,eff / ω_p`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FrequencyRatio(f64);

impl FrequencyRatio {
    pub fn new(optical: &OpticalTrap, paul: &PaulTrap) -> Result<Self, ParamError> {
        let r = optical.omega_u_eff / paul.omega_p;
        if r > 1.0 {
            Ok(Self(r))
        } else {
            Err(ParamError::RatioBelowOne(r))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Mathieu parameters from the trap curvatures `∂²φ/∂u²` (V/m²).
pub fn derive_mathieu_params(
    n_e: u32,
    mass: f64,
    omega_rf: f64,
    d2phi_dc: f64,
    d2phi_rf: f64,
) -> Result<(f64, f64), ParamError> {
    let mass = positive("mass", mass)?;
    let omega_rf = positive("omega_rf", omega_rf)?;
    let d2phi_dc = finite("DC curvature", d2phi_dc)?;
    let d2phi_rf = finite("RF curvature", d2phi_rf)?;
    let charge = n_e as f64 * E_CHARGE;
    let scale = charge / (mass * omega_rf * omega_rf);
    Ok((4.0 * scale * d2phi_dc, 2.0 * scale * d2phi_rf))
}

pub const PAPER_DIAMETER: f64 = 177e-9;
/// Typical Stöber-silica density; not measured for this particle.
pub const DEFAULT_DENSITY: f64 = 1850.0;
pub const DEFAULT_CHARGE_NUMBER: u32 = 1;
/// Ambient gas temperature assumed for the heating-rate conversion.
pub const DEFAULT_BATH_TEMPERATURE: f64 = 293.0;
pub const PAPER_FX_HZ: f64 = 44e3;
pub const PAPER_FY_HZ: f64 = 58e3;
pub const PAPER_RF_HZ: f64 = 33e3;
pub const PAPER_HEATING_HZ: f64 = 926e3;
/// Frequency ratios of the three measured expansion sweeps.
pub const PAPER_RATIOS: [f64; 3] = [8.8, 14.5, 24.3];
pub const DEFAULT_RATIO: f64 = 14.5;
/// Drive phase at release, rad. Not reported; at π the release falls where
/// the micromotion envelope is smallest, which makes the r = 8.8 expansion
/// nearly twice the pseudo-potential value, as observed.
pub const DEFAULT_RELEASE_PHASE: f64 = PI;
/// Effective centre-of-mass temperature after feedback cooling, K.
pub const PAPER_T_COM: f64 = 0.155;

/// The measured operating point with the r = 14.5 Paul trap.
pub fn default_paper_params() -> (ParticleParams, OpticalTrap, PaulTrap) {
    paper_params_at_ratio(DEFAULT_RATIO).expect("paper operating point is valid")
}

/// Paper operating point with the Paul trap tuned to frequency ratio `r`
/// (`a_u = 0`, `q_u` solved from the secular frequency).
pub fn paper_params_at_ratio(
    r: f64,
) -> Result<(ParticleParams, OpticalTrap, PaulTrap), ParamError> {
    if !(r > 1.0) {
        return Err(ParamError::RatioBelowOne(r));
    }
    let optical = OpticalTrap::new(angular(PAPER_FX_HZ), angular(PAPER_FY_HZ))?;
    let particle = ParticleParams::from_heating_rate(
        PAPER_DIAMETER,
        DEFAULT_DENSITY,
        DEFAULT_CHARGE_NUMBER,
        angular(PAPER_HEATING_HZ),
        DEFAULT_BATH_TEMPERATURE,
        optical.omega_u_eff,
    )?;
    let paul = PaulTrap::from_secular(
        angular(PAPER_RF_HZ),
        0.0,
        optical.omega_u_eff / r,
        DEFAULT_RELEASE_PHASE,
    )?;
    Ok((particle, optical, paul))
}
