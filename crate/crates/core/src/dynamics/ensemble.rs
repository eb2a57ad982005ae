use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{run_protocol, DynamicsError, Experiment, ProtocolSchedule};
use crate::dsp::{
    add_detector_noise, estimate_mode_frequencies, noise_floor, per_sample_noise_var,
    retrodict_shot, state_size, window_start, DetectorRecord, ModeFrequencies, PipelineConfig,
    RetrodictedPoint, DEFAULT_BOOTSTRAP_N,
};

/// How the state at recapture is read out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    /// The simulator's exact state at t_d.
    Ideal,
    /// Synthetic detector records through the retrodiction pipeline.
    Pipeline(PipelineConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_shots: usize,
    pub base_seed: u64,
    /// Timing template; `t_d` is replaced by each sweep value.
    pub schedule: ProtocolSchedule,
    pub detection: Detection,
    /// Use this seed for every shot instead of deriving one per shot.
    pub forced_seed: Option<u64>,
}

impl EnsembleConfig {
    pub fn new(n_shots: usize, base_seed: u64, schedule: ProtocolSchedule, detection: Detection) -> Self {
        Self {
            n_shots,
            base_seed,
            schedule,
            detection,
            forced_seed: None,
        }
    }

    fn bootstrap_n(&self) -> usize {
        match self.detection {
            Detection::Ideal => DEFAULT_BOOTSTRAP_N,
            Detection::Pipeline(p) => p.bootstrap_n,
        }
    }
}

/// Seed of shot `index`.
pub fn shot_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ index as u64
}

/// Aggregate of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub t_d: f64,
    /// Retrodicted points of the shots that survived, in shot order.
    pub points: Vec<RetrodictedPoint>,
    /// Simulator `(u, u̇)` at recapture for the same shots.
    pub truth: Vec<(f64, f64)>,
    pub raw_var_u: f64,
    /// Noise floor subtracted from `raw_var_u`, m².
    pub noise_var: f64,
    pub corrected_var_u: f64,
    pub clamped: bool,
    pub du: f64,
    pub bootstrap_err: f64,
    pub n_shots: usize,
    /// Shots lost during the dark phase.
    pub excluded: usize,
    /// Shots whose record could not be processed.
    pub dsp_failures: usize,
    pub freqs: Option<ModeFrequencies>,
}

impl EnsembleStats {
    pub fn n_used(&self) -> usize {
        self.points.len()
    }

    pub fn u_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.u).collect()
    }
}

struct Shot {
    truth: (f64, f64),
    record: Option<DetectorRecord>,
    floor: f64,
    trigger_delay: f64,
    fixed_delay: f64,
}

fn simulate_shot(
    exp: &Experiment,
    schedule: &ProtocolSchedule,
    seed: u64,
    detection: &Detection,
) -> Result<Option<Shot>, DynamicsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let traj = match run_protocol(schedule, exp, seed, &mut rng) {
        Ok(t) => t,
        Err(DynamicsError::RecaptureFailure { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let truth = traj.recapture_u();
    let (record, floor) = match detection {
        Detection::Ideal => (None, 0.0),
        Detection::Pipeline(cfg) => {
            let mut rec = DetectorRecord::from_trajectory(&traj);
            let mut floor = 0.0;
            if cfg.noise_var > 0.0 {
                let per_sample = per_sample_noise_var(cfg.noise_var, cfg.bandwidth, rec.dt);
                add_detector_noise(&mut rec.x, per_sample, &mut rng);
                add_detector_noise(&mut rec.y, per_sample, &mut rng);
                rec.noise_var = per_sample;
                // Same-length record without particle signal, demodulated
                // away from both trap tones.
                let n = rec.len() - window_start(&rec, schedule.t_d, cfg.discard);
                let mut blank = vec![0.0; n];
                add_detector_noise(&mut blank, per_sample, &mut rng);
                floor = noise_floor(&blank, rec.dt, cfg.offtone_hz, cfg.bandwidth);
            }
            (Some(rec), floor)
        }
    };
    Ok(Some(Shot {
        truth,
        record,
        floor,
        trigger_delay: traj.trigger_delay,
        fixed_delay: traj.fixed_delay,
    }))
}

/// Runs `n_shots` repetitions at each `t_d` and aggregates them.
///
/// Shot `i` uses the seed `base_seed ⊕ i` at every sweep point. Lost shots
/// are counted in `excluded`; any other simulation error aborts the sweep.
pub fn run_ensemble(
    t_ds: &[f64],
    exp: &Experiment,
    cfg: &EnsembleConfig,
) -> Result<Vec<EnsembleStats>, DynamicsError> {
    if cfg.n_shots < 2 {
        return Err(DynamicsError::TooFewShots(cfg.n_shots));
    }
    if let Detection::Pipeline(p) = &cfg.detection {
        p.validate()
            .map_err(|e| DynamicsError::InvalidSchedule(e.to_string()))?;
    }
    t_ds.iter()
        .enumerate()
        .map(|(k, &t_d)| run_point(k, t_d, exp, cfg))
        .collect()
}

fn run_point(
    index: usize,
    t_d: f64,
    exp: &Experiment,
    cfg: &EnsembleConfig,
) -> Result<EnsembleStats, DynamicsError> {
    let mut schedule = cfg.schedule.with_t_d(t_d);
    if cfg.detection == Detection::Ideal {
        schedule.t_post = 0.0;
    }
    schedule.validate()?;
    let shots: Vec<Option<Shot>> = (0..cfg.n_shots)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.forced_seed.unwrap_or_else(|| shot_seed(cfg.base_seed, i));
            simulate_shot(exp, &schedule, seed, &cfg.detection)
        })
        .collect::<Result<_, _>>()?;
    let excluded = shots.iter().filter(|s| s.is_none()).count();
    let shots: Vec<Shot> = shots.into_iter().flatten().collect();

    let (points, truth, freqs, noise_var, dsp_failures) = match &cfg.detection {
        Detection::Ideal => {
            let points = shots
                .iter()
                .map(|s| RetrodictedPoint {
                    u: s.truth.0,
                    u_dot: s.truth.1,
                    v: 0.0,
                    v_dot: 0.0,
                    t_d,
                    trigger_delay: s.trigger_delay,
                    fixed_delay: s.fixed_delay,
                })
                .collect();
            let truth = shots.iter().map(|s| s.truth).collect();
            (points, truth, None, 0.0, 0)
        }
        Detection::Pipeline(p) => {
            let records: Vec<DetectorRecord> =
                shots.iter().filter_map(|s| s.record.clone()).collect();
            let freqs = estimate_mode_frequencies(
                &records,
                t_d,
                exp.optical.omega_x,
                exp.optical.omega_y,
                p,
            );
            let results: Vec<_> = shots
                .par_iter()
                .map(|s| {
                    let rec = s.record.as_ref().expect("pipeline shots carry a record");
                    retrodict_shot(rec, t_d, &freqs, s.trigger_delay, s.fixed_delay, p)
                        .map(|pt| (pt, s.truth))
                })
                .collect();
            let failures = results.iter().filter(|r| r.is_err()).count();
            let (points, truth): (Vec<_>, Vec<_>) = results.into_iter().flatten().unzip();
            let noise_var = if shots.is_empty() {
                0.0
            } else {
                shots.iter().map(|s| s.floor).sum::<f64>() / shots.len() as f64
            };
            (points, truth, Some(freqs), noise_var, failures)
        }
    };

    let u: Vec<f64> = points.iter().map(|p: &RetrodictedPoint| p.u).collect();
    let boot_seed = cfg.base_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    let size = state_size(&u, noise_var, cfg.bootstrap_n(), boot_seed);
    Ok(EnsembleStats {
        t_d,
        points,
        truth,
        raw_var_u: size.raw_var,
        noise_var,
        corrected_var_u: size.corrected_var,
        clamped: size.clamped,
        du: size.du,
        bootstrap_err: size.err,
        n_shots: cfg.n_shots,
        excluded,
        dsp_failures,
        freqs,
    })
}
