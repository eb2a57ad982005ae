//! Detector-record processing: calibration, tone estimation, backward
//! demodulation (retrodiction), delay correction, noise floor, histograms
//! and bootstrap state sizes.
//!
//! Records are in metres unless a gain is set. Time stamps are on the
//! acquisition clock.

mod calibrate;
mod demod;
mod pipeline;
mod record;
mod stats;
mod tone;

pub use calibrate::{add_detector_noise, calibrate_gain, variance};
pub use demod::{
    demodulate_retrodict, filter_alpha, min_window_samples, noise_floor, per_sample_noise_var,
    rotate_forward,
};
pub use pipeline::{
    delay_correct, estimate_mode_frequencies, retrodict_shot, window_start, FrequencyMode,
    ModeFrequencies, PipelineConfig, RetrodictedPoint, DEFAULT_BANDWIDTH, DEFAULT_DISCARD,
    DEFAULT_OFFTONE_HZ, PAPER_NOISE_VAR,
};
pub use record::DetectorRecord;
pub use stats::{
    bootstrap_se, histogram2d, principal_axis_angle, state_size, Histogram2d, StateSize,
    DEFAULT_BOOTSTRAP_N,
};
pub use tone::{estimate_tone_frequency, estimate_tone_in_band, PowerSpectrum, DEFAULT_MIN_SNR};

#[derive(Debug, thiserror::Error)]
pub enum DspError {
    #[error("no tone above the noise in the analysis window")]
    NoTone,
    #[error("window too short: need {needed} samples, have {available}")]
    WindowTooShort { needed: usize, available: usize },
    #[error("record has zero variance")]
    ZeroVariance,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
