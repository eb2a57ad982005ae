use std::f64::consts::TAU;

use super::DspError;

/// Filter time constants the window must span behind the reference.
const MIN_TIME_CONSTANTS: f64 = 5.0;

/// Per-sample coefficient of the single-pole low-pass with 3 dB
/// bandwidth `bandwidth` (Hz).
pub fn filter_alpha(bandwidth: f64, dt: f64) -> f64 {
    1.0 - (-TAU * bandwidth * dt).exp()
}

/// Per-sample white-noise variance that yields `floor` (m²) at the
/// demodulator output.
pub fn per_sample_noise_var(floor: f64, bandwidth: f64, dt: f64) -> f64 {
    let a = filter_alpha(bandwidth, dt);
    floor * (2.0 - a) / (2.0 * a)
}

/// Minimum number of samples for a retrodiction at `bandwidth`.
pub fn min_window_samples(bandwidth: f64, dt: f64) -> usize {
    (MIN_TIME_CONSTANTS / (TAU * bandwidth * dt)).ceil() as usize
}

/// Backward single-pole filter evaluated at the first sample:
/// normalized weights `α(1−α)^k` over the window.
fn backward_weights(n: usize, alpha: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    let mut g = alpha;
    for _ in 0..n {
        w.push(g);
        g *= 1.0 - alpha;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Retrodicts `(I, Q)` at `t_ref` from a window whose first sample is at
/// `t_start ≥ t_ref`.
///
/// For `x(t) = I cos ω(t − t_ref) + Q sin ω(t − t_ref)` the output is exact:
/// the products with `2cos`, `2sin` are low-passed backwards in time and the
/// residual 2ω image passed by the filter is removed by solving the 2×2
/// system built from the same weights. Position is `I`, velocity `ω·Q`.
pub fn demodulate_retrodict(
    trace: &[f64],
    dt: f64,
    t_start: f64,
    omega: f64,
    bandwidth: f64,
    t_ref: f64,
) -> Result<(f64, f64), DspError> {
    if !(dt > 0.0 && omega > 0.0 && bandwidth > 0.0) {
        return Err(DspError::InvalidInput(format!(
            "dt = {dt}, omega = {omega}, bandwidth = {bandwidth}"
        )));
    }
    if t_start < t_ref - 1e-9 * dt {
        return Err(DspError::InvalidInput(format!(
            "window starts at {t_start} before the reference {t_ref}"
        )));
    }
    let needed = min_window_samples(bandwidth, dt);
    if trace.len() < needed {
        return Err(DspError::WindowTooShort {
            needed,
            available: trace.len(),
        });
    }
    let w = backward_weights(trace.len(), filter_alpha(bandwidth, dt));
    let (mut fi, mut fq) = (0.0, 0.0);
    let (mut cc, mut ss, mut cs) = (0.0, 0.0, 0.0);
    for (k, (&x, &wk)) in trace.iter().zip(&w).enumerate() {
        let phase = omega * (t_start + k as f64 * dt - t_ref);
        let (s, c) = phase.sin_cos();
        fi += wk * 2.0 * x * c;
        fq += wk * 2.0 * x * s;
        cc += wk * 2.0 * c * c;
        ss += wk * 2.0 * s * s;
        cs += wk * 2.0 * c * s;
    }
    // [fi; fq] = [[cc, cs], [cs, ss]] [I; Q]
    let det = cc * ss - cs * cs;
    if !(det.abs() > 1e-12) {
        return Err(DspError::InvalidInput("degenerate demodulation basis".into()));
    }
    Ok(((ss * fi - cs * fq) / det, (cc * fq - cs * fi) / det))
}

/// Evolves a harmonic phase-space point `(x, ẋ)` forward by `delay` at
/// frequency `omega`; a rotation of `(x, ẋ/ω)` by `ω·delay`.
pub fn rotate_forward(x: f64, x_dot: f64, omega: f64, delay: f64) -> (f64, f64) {
    let (s, c) = (omega * delay).sin_cos();
    let p = x_dot / omega;
    (x * c + p * s, omega * (-x * s + p * c))
}

/// Noise power at the demodulator output, measured at an off-tone
/// frequency `f_offtone` (Hz): the mean square of the backward-filtered
/// I and Q streams once the filter has settled.
pub fn noise_floor(trace: &[f64], dt: f64, f_offtone: f64, bandwidth: f64) -> f64 {
    let n = trace.len();
    if n < 2 {
        return 0.0;
    }
    let alpha = filter_alpha(bandwidth, dt);
    let settle = min_window_samples(bandwidth, dt).min(n - 1);
    let omega = TAU * f_offtone;
    let (mut yi, mut yq) = (0.0, 0.0);
    let mut is = Vec::with_capacity(n - settle);
    let mut qs = Vec::with_capacity(n - settle);
    for k in (0..n).rev() {
        let (s, c) = (omega * k as f64 * dt).sin_cos();
        yi = alpha * 2.0 * trace[k] * c + (1.0 - alpha) * yi;
        yq = alpha * 2.0 * trace[k] * s + (1.0 - alpha) * yq;
        if n - k > settle {
            is.push(yi);
            qs.push(yq);
        }
    }
    // The demodulated noise is zero-mean; subtracting a sample mean over a
    // few filter time constants would bias the estimate low.
    let mean_square = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    0.5 * (mean_square(&is) + mean_square(&qs))
}
