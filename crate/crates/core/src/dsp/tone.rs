use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::DspError;

/// Zero-padding factor applied before the peak search.
const PAD: usize = 16;
/// Peak-to-median power ratio required for a single window.
pub const DEFAULT_MIN_SNR: f64 = 20.0;

/// Hann-windowed, zero-padded power spectrum of a real window.
/// Bin `k` sits at `k / (len · dt)` Hz with `len` the padded length.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub dt: f64,
    pub len: usize,
    pub power: Vec<f64>,
    /// Number of windows averaged into `power`.
    pub averages: usize,
}

impl PowerSpectrum {
    pub fn of(trace: &[f64], dt: f64) -> Self {
        let n = trace.len();
        let len = (n * PAD).next_power_of_two().max(2);
        let mean = if n > 0 { trace.iter().sum::<f64>() / n as f64 } else { 0.0 };
        let mut buf: Vec<Complex<f64>> = trace
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let w = if n > 1 { 0.5 - 0.5 * (TAU * k as f64 / (n - 1) as f64).cos() } else { 1.0 };
                Complex::new((x - mean) * w, 0.0)
            })
            .collect();
        buf.resize(len, Complex::new(0.0, 0.0));
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let power = buf[..len / 2 + 1].iter().map(|c| c.norm_sqr()).collect();
        Self {
            dt,
            len,
            power,
            averages: 1,
        }
    }

    /// Accumulates another spectrum of the same geometry.
    pub fn accumulate(&mut self, other: &PowerSpectrum) -> Result<(), DspError> {
        if self.len != other.len || self.dt != other.dt {
            return Err(DspError::InvalidInput("spectra have different geometry".into()));
        }
        let (a, b) = (self.averages as f64, other.averages as f64);
        for (p, q) in self.power.iter_mut().zip(&other.power) {
            *p = (*p * a + q * b) / (a + b);
        }
        self.averages += other.averages;
        Ok(())
    }

    pub fn bin_hz(&self) -> f64 {
        1.0 / (self.len as f64 * self.dt)
    }

    /// Dominant tone inside `band` (Hz; whole spectrum when `None`), in rad/s.
    ///
    /// The peak must exceed the spectrum median by `min_snr` for a single
    /// window; for averaged spectra the excess over the median shrinks as
    /// `1/√averages`.
    pub fn dominant_tone(&self, band: Option<(f64, f64)>, min_snr: f64) -> Result<f64, DspError> {
        let nb = self.power.len();
        if nb < 3 {
            return Err(DspError::NoTone);
        }
        let df = self.bin_hz();
        let (lo, hi) = match band {
            Some((f_lo, f_hi)) => (
                ((f_lo / df).ceil().max(1.0) as usize).min(nb - 2),
                ((f_hi / df).floor() as usize).clamp(1, nb - 2),
            ),
            None => (1, nb - 2),
        };
        if lo > hi {
            return Err(DspError::NoTone);
        }
        let k = (lo..=hi)
            .max_by(|&i, &j| self.power[i].total_cmp(&self.power[j]))
            .ok_or(DspError::NoTone)?;
        let mut sorted = self.power[1..].to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let threshold = 1.0 + (min_snr - 1.0) / (self.averages as f64).sqrt();
        if !(self.power[k] > threshold * median) {
            return Err(DspError::NoTone);
        }
        // Parabola through the log-power of the peak and its neighbours.
        let (a, b, c) = (
            self.power[k - 1].max(f64::MIN_POSITIVE).ln(),
            self.power[k].ln(),
            self.power[k + 1].max(f64::MIN_POSITIVE).ln(),
        );
        let denom = a - 2.0 * b + c;
        let shift = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
        Ok(2.0 * PI * (k as f64 + shift.clamp(-0.5, 0.5)) * df)
    }
}

/// Frequency of the dominant tone of a window, rad/s.
pub fn estimate_tone_frequency(trace: &[f64], dt: f64) -> Result<f64, DspError> {
    estimate_tone_in_band(trace, dt, None)
}

/// As [`estimate_tone_frequency`], searching only `band` (Hz).
pub fn estimate_tone_in_band(
    trace: &[f64],
    dt: f64,
    band: Option<(f64, f64)>,
) -> Result<f64, DspError> {
    if trace.len() < 8 || !(dt > 0.0) {
        return Err(DspError::WindowTooShort {
            needed: 8,
            available: trace.len(),
        });
    }
    PowerSpectrum::of(trace, dt).dominant_tone(band, DEFAULT_MIN_SNR)
}
