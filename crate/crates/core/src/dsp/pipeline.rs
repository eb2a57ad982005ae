use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use super::demod::{demodulate_retrodict, rotate_forward};
use super::record::DetectorRecord;
use super::stats::DEFAULT_BOOTSTRAP_N;
use super::tone::{PowerSpectrum, DEFAULT_MIN_SNR};
use super::DspError;

pub const DEFAULT_BANDWIDTH: f64 = 2e3;
pub const DEFAULT_DISCARD: f64 = 120e-6;
/// Detector noise at the demodulator output, m².
pub const PAPER_NOISE_VAR: f64 = 2.5e-18;
pub const DEFAULT_OFFTONE_HZ: f64 = 150e3;

/// How the demodulation frequencies are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyMode {
    /// x and y at their own measured frequencies.
    PerMode,
    /// Both channels at the rms of the two measured frequencies.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Low-pass bandwidth, Hz.
    pub bandwidth: f64,
    /// Record ignored after recapture, s.
    pub discard: f64,
    /// Detector noise injected into synthetic records, expressed as the
    /// variance it produces at the demodulator output, m².
    pub noise_var: f64,
    /// Off-tone demodulation frequency for the noise floor, Hz.
    pub offtone_hz: f64,
    pub bootstrap_n: usize,
    pub frequency_mode: FrequencyMode,
    /// Half-width of the tone search band relative to the nominal frequency.
    pub tone_band: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            bandwidth: DEFAULT_BANDWIDTH,
            discard: DEFAULT_DISCARD,
            noise_var: PAPER_NOISE_VAR,
            offtone_hz: DEFAULT_OFFTONE_HZ,
            bootstrap_n: DEFAULT_BOOTSTRAP_N,
            frequency_mode: FrequencyMode::PerMode,
            tone_band: 0.2,
        }
    }
}

impl PipelineConfig {
    pub fn noiseless(mut self) -> Self {
        self.noise_var = 0.0;
        self
    }

    pub fn validate(&self) -> Result<(), DspError> {
        let ok = self.bandwidth > 0.0
            && self.bandwidth.is_finite()
            && self.discard >= 0.0
            && self.discard.is_finite()
            && self.noise_var >= 0.0
            && self.noise_var.is_finite()
            && self.offtone_hz > 0.0
            && self.tone_band > 0.0
            && self.tone_band < 1.0;
        if ok {
            Ok(())
        } else {
            Err(DspError::InvalidInput(format!("invalid pipeline config {self:?}")))
        }
    }
}

/// State along u (and v) at recapture, as reconstructed from one shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrodictedPoint {
    pub u: f64,
    pub u_dot: f64,
    pub v: f64,
    pub v_dot: f64,
    pub t_d: f64,
    pub trigger_delay: f64,
    pub fixed_delay: f64,
}

/// Rotates `(u, u̇/ω)` forward by `ω·(trigger_delay + fixed_delay)`.
pub fn delay_correct(
    point: &RetrodictedPoint,
    omega: f64,
    trigger_delay: f64,
    fixed_delay: f64,
) -> RetrodictedPoint {
    let delay = trigger_delay + fixed_delay;
    let (u, u_dot) = rotate_forward(point.u, point.u_dot, omega, delay);
    let (v, v_dot) = rotate_forward(point.v, point.v_dot, omega, delay);
    RetrodictedPoint {
        u,
        u_dot,
        v,
        v_dot,
        trigger_delay,
        fixed_delay,
        ..*point
    }
}

/// Demodulation frequencies in use, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequencies {
    pub omega_x: f64,
    pub omega_y: f64,
    /// Set when no tone was found and the nominal frequency was kept.
    pub fallback_x: bool,
    pub fallback_y: bool,
}

impl ModeFrequencies {
    pub fn nominal(omega_x: f64, omega_y: f64) -> Self {
        Self {
            omega_x,
            omega_y,
            fallback_x: false,
            fallback_y: false,
        }
    }

    /// The frequencies actually used for x and y.
    pub fn demod(&self, mode: FrequencyMode) -> (f64, f64) {
        match mode {
            FrequencyMode::PerMode => (self.omega_x, self.omega_y),
            FrequencyMode::Shared => {
                let w = (0.5 * (self.omega_x.powi(2) + self.omega_y.powi(2))).sqrt();
                (w, w)
            }
        }
    }
}

/// Index of the first sample at or after `t_ref + discard`.
pub fn window_start(record: &DetectorRecord, t_ref: f64, discard: f64) -> usize {
    let t = t_ref + discard;
    let k = ((t - record.t0) / record.dt - 1e-9).ceil();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(record.len())
    }
}

/// Measures the x and y tone frequencies from the pooled spectra of a set
/// of records, searching `±tone_band` around the nominal values.
pub fn estimate_mode_frequencies(
    records: &[DetectorRecord],
    t_ref: f64,
    nominal_x: f64,
    nominal_y: f64,
    cfg: &PipelineConfig,
) -> ModeFrequencies {
    let pooled = |channel: fn(&DetectorRecord) -> &Vec<f64>| -> Option<PowerSpectrum> {
        let mut acc: Option<PowerSpectrum> = None;
        for rec in records {
            let start = window_start(rec, t_ref, cfg.discard);
            let trace = &channel(rec)[start..];
            if trace.len() < 8 {
                continue;
            }
            let s = PowerSpectrum::of(trace, rec.dt);
            match acc.as_mut() {
                None => acc = Some(s),
                Some(a) => {
                    if a.accumulate(&s).is_err() {
                        continue;
                    }
                }
            }
        }
        acc
    };
    let pick = |spec: Option<PowerSpectrum>, nominal: f64| -> (f64, bool) {
        let f = nominal / TAU;
        let band = Some((f * (1.0 - cfg.tone_band), f * (1.0 + cfg.tone_band)));
        match spec.map(|s| s.dominant_tone(band, DEFAULT_MIN_SNR)) {
            Some(Ok(w)) => (w, false),
            _ => (nominal, true),
        }
    };
    let (omega_x, fallback_x) = pick(pooled(|r| &r.x), nominal_x);
    let (omega_y, fallback_y) = pick(pooled(|r| &r.y), nominal_y);
    ModeFrequencies {
        omega_x,
        omega_y,
        fallback_x,
        fallback_y,
    }
}

/// Retrodicts one shot at `t_ref` on the acquisition clock, corrects the
/// shot's delays per axis and combines x and y into u and v.
pub fn retrodict_shot(
    record: &DetectorRecord,
    t_ref: f64,
    freqs: &ModeFrequencies,
    trigger_delay: f64,
    fixed_delay: f64,
    cfg: &PipelineConfig,
) -> Result<RetrodictedPoint, DspError> {
    let start = window_start(record, t_ref, cfg.discard);
    let (xs, ys) = record.in_metres();
    let t_start = record.time(start);
    let (wx, wy) = freqs.demod(cfg.frequency_mode);
    let (ix, qx) = demodulate_retrodict(&xs[start..], record.dt, t_start, wx, cfg.bandwidth, t_ref)?;
    let (iy, qy) = demodulate_retrodict(&ys[start..], record.dt, t_start, wy, cfg.bandwidth, t_ref)?;
    let delay = trigger_delay + fixed_delay;
    let (x, x_dot) = rotate_forward(ix, wx * qx, wx, delay);
    let (y, y_dot) = rotate_forward(iy, wy * qy, wy, delay);
    Ok(RetrodictedPoint {
        u: FRAC_1_SQRT_2 * (x + y),
        u_dot: FRAC_1_SQRT_2 * (x_dot + y_dot),
        v: FRAC_1_SQRT_2 * (x - y),
        v_dot: FRAC_1_SQRT_2 * (x_dot - y_dot),
        t_d: t_ref,
        trigger_delay,
        fixed_delay,
    })
}
