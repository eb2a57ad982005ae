//! Characteristic exponent of `y'' + (a − 2q cos 2τ) y = 0`.
//!
//! The one-drive-period monodromy matrix gives `cos(πβ) = tr(M)/2`; that
//! estimate is then polished on the Hill continued fraction, which is the
//! same recurrence the Floquet coefficients are built from.

use std::f64::consts::PI;

use super::FloquetError;

/// Steps of the RK4 integration over one drive period (τ ∈ [0, π]).
pub const MONODROMY_STEPS: usize = 4000;
/// Depth of the Hill continued fraction used for polishing β.
const HILL_DEPTH: i32 = 40;
/// Largest tolerated disagreement between the monodromy estimate and the
/// continued-fraction root.
const ROUTE_AGREEMENT: f64 = 1e-6;

/// Fundamental matrix of the homogeneous Mathieu equation after one period
/// of `cos 2τ`: columns are the solutions started at (1, 0) and (0, 1).
pub fn monodromy(a: f64, q: f64, steps: usize) -> [[f64; 2]; 2] {
    let h = PI / steps as f64;
    let accel = |tau: f64, y: f64| -(a - 2.0 * q * (2.0 * tau).cos()) * y;
    let mut columns = [[1.0, 0.0], [0.0, 1.0]];
    for col in &mut columns {
        let (mut y, mut v) = (col[0], col[1]);
        for k in 0..steps {
            let t = k as f64 * h;
            let k1y = v;
            let k1v = accel(t, y);
            let k2y = v + 0.5 * h * k1v;
            let k2v = accel(t + 0.5 * h, y + 0.5 * h * k1y);
            let k3y = v + 0.5 * h * k2v;
            let k3v = accel(t + 0.5 * h, y + 0.5 * h * k2y);
            let k4y = v + h * k3v;
            let k4v = accel(t + h, y + h * k3y);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        *col = [y, v];
    }
    // columns[j] = (y_j(π), y_j'(π)); return row-major M.
    [
        [columns[0][0], columns[1][0]],
        [columns[0][1], columns[1][1]],
    ]
}

/// β from the trace of the monodromy matrix, for the first stability zone.
pub fn beta_from_monodromy(a: f64, q: f64, steps: usize) -> Result<f64, FloquetError> {
    let m = monodromy(a, q, steps);
    let trace = m[0][0] + m[1][1];
    if !trace.is_finite() || trace.abs() >= 2.0 {
        return Err(FloquetError::Unstable { a, q, trace });
    }
    Ok((trace / 2.0).acos() / PI)
}

/// `C_{2n}/C_{2n−2}` for n = 1 (`up = true`) or `C_{−2n}/C_{−2n+2}` for
/// n = 1 (`up = false`), from a tail truncated after `depth` terms.
fn hill_ratio(a: f64, q: f64, beta: f64, depth: i32, up: bool) -> f64 {
    let sign = if up { 1.0 } else { -1.0 };
    let mut g = 0.0;
    for n in (1..=depth).rev() {
        let k = beta + sign * 2.0 * n as f64;
        g = q / (a - k * k - q * g);
    }
    g
}

/// Zero of this function in β is the characteristic exponent.
pub fn hill_function(a: f64, q: f64, beta: f64, depth: i32) -> f64 {
    a - beta * beta - q * (hill_ratio(a, q, beta, depth, true) + hill_ratio(a, q, beta, depth, false))
}

fn polish(a: f64, q: f64, beta0: f64, tol: f64) -> Result<f64, FloquetError> {
    let f = |b: f64| hill_function(a, q, b, HILL_DEPTH);
    let mut x0 = beta0;
    let mut x1 = beta0 + 1e-6_f64.min(0.5 * (1.0 - beta0)).max(1e-9);
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    for _ in 0..100 {
        if f1 == 0.0 {
            return Ok(x1);
        }
        let denom = f1 - f0;
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.is_finite() {
            break;
        }
        if (x2 - x1).abs() <= 0.1 * tol {
            return Ok(x2);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
    }
    Err(FloquetError::NoConvergence(format!(
        "secant iteration on the Hill function stalled near β = {x1}"
    )))
}

/// Characteristic exponent β ∈ (0, 1) for `(a, q)` in the first stability
/// zone, accurate to `tol`.
pub fn characteristic_exponent(a: f64, q: f64, tol: f64) -> Result<f64, FloquetError> {
    if !a.is_finite() || !q.is_finite() || !(tol > 0.0) {
        return Err(FloquetError::InvalidInput(format!(
            "a = {a}, q = {q}, tol = {tol}"
        )));
    }
    let beta0 = beta_from_monodromy(a, q, MONODROMY_STEPS)?;
    if beta0 <= 0.0 || beta0 >= 1.0 {
        return Err(FloquetError::Unstable {
            a,
            q,
            trace: 2.0 * (PI * beta0).cos(),
        });
    }
    let beta = polish(a, q, beta0, tol)?;
    if (beta - beta0).abs() > ROUTE_AGREEMENT || !(0.0..1.0).contains(&beta) {
        return Err(FloquetError::NoConvergence(format!(
            "monodromy β = {beta0} and continued-fraction β = {beta} disagree"
        )));
    }
    // The trace only fixes β modulo 2; higher zones show up as a dominant
    // coefficient away from n = 0.
    let probe = super::floquet_coefficients(a, q, beta, 8)?;
    let dominant = (-8..=8)
        .max_by(|&i, &j| probe.coeff(i).abs().total_cmp(&probe.coeff(j).abs()))
        .unwrap_or(0);
    if dominant != 0 {
        return Err(FloquetError::OutsideFirstZone { a, q });
    }
    Ok(beta)
}

/// The `q ≥ 0` giving exponent `beta` at fixed `a` (bisection on β(q), which
/// is increasing across the first zone).
pub fn q_for_beta(a: f64, beta: f64) -> Result<f64, FloquetError> {
    if !(beta > 0.0 && beta < 1.0) || !a.is_finite() {
        return Err(FloquetError::InvalidInput(format!(
            "target β = {beta} must lie in (0, 1); a = {a}"
        )));
    }
    let tol = super::DEFAULT_BETA_TOL;
    let beta_at = |q: f64| characteristic_exponent(a, q, tol);
    match beta_at(0.0) {
        Ok(b0) if b0 > beta => {
            return Err(FloquetError::InvalidInput(format!(
                "β(a = {a}, q = 0) = {b0} already exceeds the target {beta}"
            )))
        }
        Ok(b0) if b0 == beta => return Ok(0.0),
        _ => {}
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // Expand until hi is above the target or unstable.
    loop {
        match beta_at(hi) {
            Ok(b) if b < beta => {
                lo = hi;
                hi *= 2.0;
                if hi > 64.0 {
                    return Err(FloquetError::NoConvergence(
                        "no q reaches the requested exponent".into(),
                    ));
                }
            }
            _ => break,
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match beta_at(mid) {
            Ok(b) if b < beta => lo = mid,
            _ => hi = mid,
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
