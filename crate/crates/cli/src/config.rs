//! Run configuration: one JSON document in SI units. Every field has the
//! paper operating point as its default, so `{}` is a valid config.

use std::f64::consts::TAU;
use std::path::Path;

use darkjump_core::analytic::ThermalInit;
use darkjump_core::dsp::{FrequencyMode, PipelineConfig, DEFAULT_BOOTSTRAP_N};
use darkjump_core::dynamics::{Experiment, ProtocolSchedule, SimulationSettings};
use darkjump_core::floquet::DEFAULT_N_MAX;
use darkjump_core::phys::{
    OpticalTrap, ParticleParams, PaulTrap, DEFAULT_BATH_TEMPERATURE, DEFAULT_CHARGE_NUMBER,
    DEFAULT_DENSITY, DEFAULT_RATIO, DEFAULT_RELEASE_PHASE, PAPER_DIAMETER, PAPER_FX_HZ,
    PAPER_FY_HZ, PAPER_HEATING_HZ, PAPER_RF_HZ, PAPER_T_COM,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Syntax and schema errors; the message carries line and column.
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParticleConfig {
    /// m
    pub diameter: f64,
    /// kg/m³
    pub density: f64,
    pub charge_number: u32,
    /// Heating rate Γ, s⁻¹; the damping rate follows from the gas relation.
    pub heating_rate: f64,
    /// K
    pub bath_temperature: f64,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self {
            diameter: PAPER_DIAMETER,
            density: DEFAULT_DENSITY,
            charge_number: DEFAULT_CHARGE_NUMBER,
            heating_rate: TAU * PAPER_HEATING_HZ,
            bath_temperature: DEFAULT_BATH_TEMPERATURE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalConfig {
    /// rad/s
    pub omega_x: f64,
    /// rad/s
    pub omega_y: f64,
    /// Centre-of-mass temperatures after feedback cooling, K.
    pub t_com_x: f64,
    pub t_com_y: f64,
}

impl Default for OpticalConfig {
    fn default() -> Self {
        Self {
            omega_x: TAU * PAPER_FX_HZ,
            omega_y: TAU * PAPER_FY_HZ,
            t_com_x: PAPER_T_COM,
            t_com_y: PAPER_T_COM,
        }
    }
}

/// Paul trap along u. Give either `q_u` or the frequency ratio
/// `ratio = ω_o/ω_p`, from which `q_u` is solved at the given `a_u`;
/// with neither, the paper ratio is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PaulConfig {
    /// rad/s
    pub omega_rf: f64,
    pub a_u: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// v axis; `(a_u, −q_u)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_v: Option<f64>,
    /// Drive phase at release, rad.
    pub rf_phase0: f64,
    /// Draw the release phase per shot instead.
    pub randomize_rf_phase: bool,
}

impl Default for PaulConfig {
    fn default() -> Self {
        Self {
            omega_rf: TAU * PAPER_RF_HZ,
            a_u: 0.0,
            q_u: None,
            ratio: None,
            a_v: None,
            q_v: None,
            rf_phase0: DEFAULT_RELEASE_PHASE,
            randomize_rf_phase: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// s
    pub t_d_start: f64,
    pub t_d_stop: f64,
    pub t_d_step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_d_start: 0.0,
            t_d_stop: 300e-6,
            t_d_step: 10e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingConfig {
    /// Record after recapture, s.
    pub t_post: f64,
    /// Upper end of the uniform trigger offset, s.
    pub trigger_jitter: f64,
    /// Constant acquisition delay, s.
    pub fixed_delay: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        let s = ProtocolSchedule::default();
        Self {
            t_post: s.t_post,
            trigger_jitter: s.trigger_jitter,
            fixed_delay: s.fixed_delay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineSection {
    /// Demodulator bandwidth, Hz.
    pub bandwidth: f64,
    /// Transient skipped after recapture, s.
    pub discard: f64,
    /// Detector noise at the demodulator output, m².
    pub noise_var: f64,
    pub bootstrap_n: usize,
    /// Frequency of the noise-floor demodulation, Hz.
    pub offtone: f64,
    /// Demodulate x and y at one shared frequency.
    pub shared_frequency: bool,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            bandwidth: p.bandwidth,
            discard: p.discard,
            noise_var: p.noise_var,
            bootstrap_n: DEFAULT_BOOTSTRAP_N,
            offtone: p.offtone_hz,
            shared_frequency: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelFlags {
    pub simple: bool,
    pub full: bool,
    pub montecarlo: bool,
    /// Floquet truncation of the full model.
    pub n_max: usize,
}

impl Default for ModelFlags {
    fn default() -> Self {
        Self {
            simple: true,
            full: true,
            montecarlo: true,
            n_max: DEFAULT_N_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// s
    pub record_dt: f64,
    pub steps_per_period: f64,
    /// m
    pub escape_radius: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let s = SimulationSettings::default();
        Self {
            record_dt: s.record_dt,
            steps_per_period: s.steps_per_period,
            escape_radius: s.escape_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub particle: ParticleConfig,
    pub optical: OpticalConfig,
    pub paul: PaulConfig,
    pub sweep: SweepConfig,
    pub timing: TimingConfig,
    pub n_shots: usize,
    pub base_seed: u64,
    pub pipeline: PipelineSection,
    pub models: ModelFlags,
    pub simulation: SimulationSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            particle: ParticleConfig::default(),
            optical: OpticalConfig::default(),
            paul: PaulConfig::default(),
            sweep: SweepConfig::default(),
            timing: TimingConfig::default(),
            n_shots: 500,
            base_seed: 0,
            pipeline: PipelineSection::default(),
            models: ModelFlags::default(),
            simulation: SimulationSection::default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: origin.to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Paper operating point at frequency ratio `r`.
    pub fn paper_at_ratio(r: f64) -> Self {
        let mut cfg = Self::default();
        cfg.paul.ratio = Some(r);
        cfg
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sweep;
        if !(s.t_d_start >= 0.0 && s.t_d_start.is_finite()) {
            return Err(invalid(format!("sweep.t_d_start = {} must be ≥ 0", s.t_d_start)));
        }
        if !(s.t_d_stop >= s.t_d_start && s.t_d_stop.is_finite()) {
            return Err(invalid(format!(
                "sweep.t_d_stop = {} must be ≥ sweep.t_d_start",
                s.t_d_stop
            )));
        }
        if !(s.t_d_step > 0.0 && s.t_d_step.is_finite()) {
            return Err(invalid(format!("sweep.t_d_step = {} must be > 0", s.t_d_step)));
        }
        if self.n_shots < 2 {
            return Err(invalid(format!("n_shots = {} must be ≥ 2", self.n_shots)));
        }
        match (self.paul.q_u, self.paul.ratio) {
            (Some(_), Some(_)) => return Err(invalid("paul: give q_u or ratio, not both")),
            _ => {}
        }
        if !(self.optical.t_com_x >= 0.0 && self.optical.t_com_y >= 0.0) {
            return Err(invalid("optical: temperatures must be ≥ 0"));
        }
        let sim = &self.simulation;
        if !(sim.record_dt > 0.0 && sim.steps_per_period >= 10.0 && sim.escape_radius > 0.0) {
            return Err(invalid(format!("simulation: {sim:?}")));
        }
        let t = &self.timing;
        if !(t.t_post >= 0.0 && t.trigger_jitter >= 0.0 && t.fixed_delay >= 0.0) {
            return Err(invalid(format!("timing: {t:?}")));
        }
        if self.pipeline.bootstrap_n < 2 {
            return Err(invalid("pipeline.bootstrap_n must be ≥ 2"));
        }
        self.pipeline_config().validate().map_err(|e| invalid(format!("pipeline: {e}")))?;
        self.experiment()?;
        Ok(())
    }

    /// The sweep grid `t_d_start + k·t_d_step ≤ t_d_stop`.
    pub fn t_d_values(&self) -> Vec<f64> {
        let s = &self.sweep;
        let n = ((s.t_d_stop - s.t_d_start) / s.t_d_step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| s.t_d_start + k as f64 * s.t_d_step).collect()
    }

    pub fn optical_trap(&self) -> Result<OpticalTrap, ConfigError> {
        OpticalTrap::new(self.optical.omega_x, self.optical.omega_y)
            .map_err(|e| invalid(format!("optical: {e}")))
    }

    pub fn experiment(&self) -> Result<Experiment, ConfigError> {
        let optical = self.optical_trap()?;
        let p = &self.particle;
        let particle = ParticleParams::from_heating_rate(
            p.diameter,
            p.density,
            p.charge_number,
            p.heating_rate,
            p.bath_temperature,
            optical.omega_u_eff,
        )
        .map_err(|e| invalid(format!("particle: {e}")))?;
        let pc = &self.paul;
        let paul = match (pc.q_u, pc.ratio) {
            (Some(q), _) => PaulTrap::new(pc.omega_rf, pc.a_u, q, pc.rf_phase0),
            (None, r) => {
                let r = r.unwrap_or(DEFAULT_RATIO);
                if !(r > 1.0) {
                    return Err(invalid(format!("paul.ratio = {r} must exceed 1")));
                }
                PaulTrap::from_secular(pc.omega_rf, pc.a_u, optical.omega_u_eff / r, pc.rf_phase0)
            }
        }
        .map_err(|e| invalid(format!("paul: {e}")))?;
        let paul = match (pc.a_v, pc.q_v) {
            (None, None) => paul,
            (a_v, q_v) => paul
                .with_v_axis(a_v.unwrap_or(paul.a_u), q_v.unwrap_or(-paul.q_u))
                .map_err(|e| invalid(format!("paul: {e}")))?,
        };
        Ok(Experiment {
            particle,
            optical,
            paul,
            init: ThermalInit::new(self.optical.t_com_x, self.optical.t_com_y),
            settings: SimulationSettings {
                record_dt: self.simulation.record_dt,
                steps_per_period: self.simulation.steps_per_period,
                escape_radius: self.simulation.escape_radius,
            },
        })
    }

    pub fn schedule(&self) -> ProtocolSchedule {
        ProtocolSchedule {
            t_post: self.timing.t_post,
            trigger_jitter: self.timing.trigger_jitter,
            fixed_delay: self.timing.fixed_delay,
            randomize_rf_phase: self.paul.randomize_rf_phase,
            ..ProtocolSchedule::default()
        }
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        let p = &self.pipeline;
        PipelineConfig {
            bandwidth: p.bandwidth,
            discard: p.discard,
            noise_var: p.noise_var,
            offtone_hz: p.offtone,
            bootstrap_n: p.bootstrap_n,
            frequency_mode: if p.shared_frequency {
                FrequencyMode::Shared
            } else {
                FrequencyMode::PerMode
            },
            ..PipelineConfig::default()
        }
    }
}
