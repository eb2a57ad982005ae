use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::calibrate::variance;

pub const DEFAULT_BOOTSTRAP_N: usize = 1000;

/// Noise-corrected standard deviation of a sample and its bootstrap error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSize {
    pub du: f64,
    pub err: f64,
    pub raw_var: f64,
    pub corrected_var: f64,
    /// Set when `raw_var < noise_var` and the corrected variance was clamped.
    pub clamped: bool,
}

fn corrected_sd(xs: &[f64], noise_var: f64) -> f64 {
    (variance(xs) - noise_var).max(0.0).sqrt()
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile standard error of `statistic`: half the 15.87–84.13 %
/// spread of `n_resamples` resampled values.
pub fn bootstrap_se<F>(xs: &[f64], n_resamples: usize, seed: u64, statistic: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if xs.len() < 2 || n_resamples < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; xs.len()];
    let mut stats: Vec<f64> = (0..n_resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = xs[rng.gen_range(0..xs.len())];
            }
            statistic(&buf)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    0.5 * (percentile(&stats, 0.841_344_746) - percentile(&stats, 0.158_655_254))
}

/// `Δu = sqrt(max(var(u) − noise_var, 0))` with a bootstrap error.
pub fn state_size(u: &[f64], noise_var: f64, n_resamples: usize, seed: u64) -> StateSize {
    let raw_var = variance(u);
    let corrected_var = raw_var - noise_var;
    let clamped = corrected_var < 0.0;
    StateSize {
        du: corrected_var.max(0.0).sqrt(),
        err: bootstrap_se(u, n_resamples, seed, |s| corrected_sd(s, noise_var)),
        raw_var,
        corrected_var: corrected_var.max(0.0),
        clamped,
    }
}

/// Counts on a grid of square bins centred on the origin: bin `(i, j)`
/// covers `[(i_min + i − ½)·bin, (i_min + i + ½)·bin)` along the first axis
/// and likewise along the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2d {
    pub bin: f64,
    pub i_min: i64,
    pub j_min: i64,
    /// `counts[i][j]`, first axis outer.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram2d {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            (self.i_min + i as i64) as f64 * self.bin,
            (self.j_min + j as i64) as f64 * self.bin,
        )
    }
}

/// Histogram of `(u, u̇/ω)` pairs, both lengths.
pub fn histogram2d(points: &[(f64, f64)], bin: f64) -> Histogram2d {
    assert!(bin > 0.0, "bin must be positive");
    let idx: Vec<(i64, i64)> = points
        .iter()
        .map(|&(a, b)| ((a / bin).round() as i64, (b / bin).round() as i64))
        .collect();
    if idx.is_empty() {
        return Histogram2d {
            bin,
            i_min: 0,
            j_min: 0,
            counts: Vec::new(),
        };
    }
    let i_min = idx.iter().map(|p| p.0).min().unwrap_or(0);
    let i_max = idx.iter().map(|p| p.0).max().unwrap_or(0);
    let j_min = idx.iter().map(|p| p.1).min().unwrap_or(0);
    let j_max = idx.iter().map(|p| p.1).max().unwrap_or(0);
    let mut counts = vec![vec![0u64; (j_max - j_min + 1) as usize]; (i_max - i_min + 1) as usize];
    for (i, j) in idx {
        counts[(i - i_min) as usize][(j - j_min) as usize] += 1;
    }
    Histogram2d {
        bin,
        i_min,
        j_min,
        counts,
    }
}

/// Principal-axis angle of a 2-D point cloud, rad in (−π/2, π/2].
pub fn principal_axis_angle(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (ma, mb) = points
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / n, acc.1 + p.1 / n));
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for &(a, b) in points {
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
        sab += (a - ma) * (b - mb);
    }
    0.5 * (2.0 * sab).atan2(saa - sbb)
}
