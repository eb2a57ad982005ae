use rand::Rng;
use rand_distr::StandardNormal;

use super::DspError;
use crate::phys::K_B;

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Volts-to-metres gain from a record taken in thermal equilibrium with the
/// gas: `⟨x²⟩ = k_B T / (m ω²)`.
pub fn calibrate_gain(volts: &[f64], mass: f64, omega: f64, t_gas: f64) -> Result<f64, DspError> {
    if volts.len() < 2 {
        return Err(DspError::InvalidInput("calibration record too short".into()));
    }
    let var = variance(volts);
    // A constant record leaves only rounding residue in the variance.
    let peak = volts.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(var > 1e-20 * peak * peak) || !var.is_finite() {
        return Err(DspError::ZeroVariance);
    }
    if !(mass > 0.0 && omega > 0.0 && t_gas > 0.0) {
        return Err(DspError::InvalidInput(format!(
            "mass = {mass}, omega = {omega}, T = {t_gas}"
        )));
    }
    Ok((K_B * t_gas / (mass * omega * omega) / var).sqrt())
}

/// Adds white Gaussian noise of variance `noise_var` (m² per sample).
pub fn add_detector_noise<R: Rng + ?Sized>(trace: &mut [f64], noise_var: f64, rng: &mut R) {
    if noise_var <= 0.0 {
        return;
    }
    let sigma = noise_var.sqrt();
    for v in trace.iter_mut() {
        let n: f64 = rng.sample(StandardNormal);
        *v += sigma * n;
    }
}
