use std::f64::consts::TAU;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use super::integrator::{step_langevin, Potential};
use super::{DynamicsError, ProtocolSchedule};
use crate::analytic::ThermalInit;
use crate::phys::{
    paper_params_at_ratio, OpticalTrap, ParamError, ParticleParams, PaulTrap, K_B, PAPER_T_COM,
};

/// Numerical settings of the trajectory simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    /// Spacing of the recorded samples (the acquisition rate), s.
    pub record_dt: f64,
    /// Integration steps per shortest period among drive, optical and
    /// secular motion.
    pub steps_per_period: f64,
    /// Shots whose |u| exceeds this during the dark phase are lost, m.
    pub escape_radius: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            record_dt: 1e-6,
            steps_per_period: 400.0,
            escape_radius: 300e-9,
        }
    }
}

/// Everything needed to simulate one shot, apart from timing.
#[derive(Debug, Clone, Copy)]
pub struct Experiment {
    pub particle: ParticleParams,
    pub optical: OpticalTrap,
    pub paul: PaulTrap,
    pub init: ThermalInit,
    pub settings: SimulationSettings,
}

impl Experiment {
    /// Paper operating point at frequency ratio `r`, thermalized at the
    /// feedback-cooled temperature.
    pub fn paper(r: f64) -> Result<Self, ParamError> {
        let (particle, optical, paul) = paper_params_at_ratio(r)?;
        Ok(Self {
            particle,
            optical,
            paul,
            init: ThermalInit::single(PAPER_T_COM),
            settings: SimulationSettings::default(),
        })
    }

    /// Largest admissible integration step.
    pub fn max_step(&self) -> f64 {
        let shortest = [
            self.paul.rf_period(),
            self.optical.period_x(),
            self.optical.period_y(),
            self.paul.secular_period(),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        shortest / self.settings.steps_per_period
    }

    /// Integration substeps per recorded sample interval.
    pub fn substeps(&self) -> usize {
        (self.settings.record_dt / self.max_step()).ceil().max(1.0) as usize
    }
}

/// Uniformly sampled record of one shot.
///
/// Sample `k` sits at `t0 + k·dt` on the protocol clock (release at t = 0).
/// The dark phase is kept in `samples` for diagnostics even though no
/// detector sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t0: f64,
    /// `(x, y, ẋ, ẏ)` in SI units.
    pub samples: Vec<[f64; 4]>,
    /// First sample with t ≥ 0.
    pub release_index: usize,
    /// First sample with t > t_d.
    pub recapture_index: usize,
    pub t_d: f64,
    /// Exact state at the switching instants.
    pub release_state: [f64; 4],
    pub recapture_state: [f64; 4],
    pub seed: u64,
    /// Offset of this shot's trigger against the acquisition grid, s.
    pub trigger_delay: f64,
    pub fixed_delay: f64,
    pub rf_phase0: f64,
}

impl Trajectory {
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// `(u, u̇)` at recapture.
    pub fn recapture_u(&self) -> (f64, f64) {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let s = self.recapture_state;
        (k * (s[0] + s[1]), k * (s[2] + s[3]))
    }

    /// Debug export with header `t_s,x_m,y_m,vx_m_s,vy_m_s`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_s", "x_m", "y_m", "vx_m_s", "vy_m_s"])?;
        for (k, s) in self.samples.iter().enumerate() {
            w.write_record(&[
                format!("{:e}", self.time(k)),
                format!("{:e}", s[0]),
                format!("{:e}", s[1]),
                format!("{:e}", s[2]),
                format!("{:e}", s[3]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Thermal draw in the optical axes: independent Gaussians with
/// `⟨x²⟩ = k_B T_x/(mω_x²)`, `⟨ẋ²⟩ = k_B T_x/m`, likewise for y.
pub fn sample_initial_state<R: Rng + ?Sized>(
    init: &ThermalInit,
    mass: f64,
    optical: &OpticalTrap,
    rng: &mut R,
) -> [f64; 4] {
    let sx = (K_B * init.t_x / mass).sqrt();
    let sy = (K_B * init.t_y / mass).sqrt();
    let mut draw = |scale: f64| -> f64 {
        let n: f64 = rng.sample(StandardNormal);
        if scale == 0.0 {
            0.0
        } else {
            scale * n
        }
    };
    let x = draw(sx / optical.omega_x);
    let y = draw(sy / optical.omega_y);
    let vx = draw(sx);
    let vy = draw(sy);
    [x, y, vx, vy]
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    Optical,
    Dark,
}

/// Runs phases (i)–(v) of one shot. The initial state is drawn at `−t_pre`;
/// switching between the traps is instantaneous.
pub fn run_protocol<R: Rng + ?Sized>(
    schedule: &ProtocolSchedule,
    exp: &Experiment,
    seed: u64,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    schedule.validate()?;
    let dt = exp.settings.record_dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidSchedule(format!("record_dt = {dt}")));
    }
    let trigger_delay = if schedule.trigger_jitter > 0.0 {
        rng.gen_range(0.0..schedule.trigger_jitter)
    } else {
        0.0
    };
    let rf_phase0 = if schedule.randomize_rf_phase {
        rng.gen_range(0.0..TAU)
    } else {
        schedule.rf_phase0.unwrap_or(exp.paul.rf_phase0)
    };

    let optical = Potential::optical(&exp.optical);
    let dark = Potential::paul(&exp.paul, rf_phase0);
    let gamma = exp.particle.gamma;
    let diffusion = exp.particle.force_diffusion();
    let h_max = exp.max_step();
    let escape = exp.settings.escape_radius;

    let t0 = -schedule.t_pre;
    let t_d = schedule.t_d;
    let t_end = t_d + schedule.t_post;
    // Enough samples to reach t_end; the last one may overshoot by < dt.
    let n_samples = ((t_end - t0) / dt - 1e-9).ceil().max(0.0) as usize + 1;

    let mut state = sample_initial_state(&exp.init, exp.particle.mass, &exp.optical, rng);
    let mut samples = Vec::with_capacity(n_samples);
    samples.push(state);
    let mut release_state = if t0 >= 0.0 { state } else { [0.0; 4] };
    let mut recapture_state = if t0 >= 0.0 && t_d == 0.0 { state } else { [0.0; 4] };

    // Advances from `from` to `to` inside one phase with equal substeps.
    let advance = |state: &mut [f64; 4], from: f64, to: f64, phase: Phase, rng: &mut R| {
        let span = to - from;
        if span <= 0.0 {
            return Ok(());
        }
        let n = (span / h_max).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let pot = if phase == Phase::Dark { &dark } else { &optical };
        for i in 0..n {
            let t = from + i as f64 * h;
            step_langevin(state, t, h, pot, gamma, diffusion, rng);
            if phase == Phase::Dark {
                let u = std::f64::consts::FRAC_1_SQRT_2 * (state[0] + state[1]);
                if !(u.abs() <= escape) {
                    return Err(DynamicsError::RecaptureFailure { t: t + h, u });
                }
            }
        }
        Ok(())
    };

    for k in 1..n_samples {
        let a = t0 + (k - 1) as f64 * dt;
        let b = t0 + k as f64 * dt;
        // Split the interval at the switching instants it contains.
        let mut cursor = a;
        for boundary in [0.0, t_d] {
            if boundary > cursor && boundary <= b {
                let phase = if cursor >= 0.0 && cursor < t_d { Phase::Dark } else { Phase::Optical };
                advance(&mut state, cursor, boundary, phase, rng)?;
                cursor = boundary;
            }
            if cursor == boundary {
                if boundary == 0.0 {
                    release_state = state;
                    if t_d == 0.0 {
                        recapture_state = state;
                    }
                }
                if boundary == t_d {
                    recapture_state = state;
                }
            }
        }
        let phase = if cursor >= 0.0 && cursor < t_d { Phase::Dark } else { Phase::Optical };
        advance(&mut state, cursor, b, phase, rng)?;
        samples.push(state);
    }

    let release_index = (0..n_samples)
        .find(|&k| t0 + k as f64 * dt >= 0.0)
        .unwrap_or(n_samples);
    let recapture_index = (0..n_samples)
        .find(|&k| t0 + k as f64 * dt > t_d)
        .unwrap_or(n_samples);

    Ok(Trajectory {
        dt,
        t0,
        samples,
        release_index,
        recapture_index,
        t_d,
        release_state,
        recapture_state,
        seed,
        trigger_delay,
        fixed_delay: schedule.fixed_delay,
        rf_phase0,
    })
}
