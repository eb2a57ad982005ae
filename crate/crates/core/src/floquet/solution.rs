use super::FloquetError;

/// Truncated Floquet solution of the homogeneous Mathieu equation,
/// `λ₁(τ) = Σ C₂ₙ cos((2n+β)τ)`, `λ₂(τ) = Σ C₂ₙ sin((2n+β)τ)`, |n| ≤ n_max.
///
/// Coefficients are normalised to `Σ C₂ₙ = 1` so that `λ₁(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    pub a: f64,
    pub q: f64,
    pub beta: f64,
    pub n_max: usize,
    /// `coeffs[k]` holds `C_{2(k − n_max)}`.
    coeffs: Vec<f64>,
    /// `Σ (2n+β) C₂ₙ²`.
    pub wronskian: f64,
}

/// Builds the coefficients for a known exponent.
///
/// * `n_max = 0`: pseudo-potential, `C₂ₙ = δₙ₀`.
/// * `n_max = 1`: the first-order closure `C_{±2} = −q/(4 ± 4β)`.
/// * `n_max ≥ 2`: the three-term recurrence, solved inward from both tails.
pub fn floquet_coefficients(
    a: f64,
    q: f64,
    beta: f64,
    n_max: usize,
) -> Result<FloquetSolution, FloquetError> {
    if !(a.is_finite() && q.is_finite() && beta.is_finite()) {
        return Err(FloquetError::InvalidInput(format!(
            "a = {a}, q = {q}, β = {beta}"
        )));
    }
    let width = 2 * n_max + 1;
    let mut c = vec![0.0; width];
    let centre = n_max;
    c[centre] = 1.0;
    match n_max {
        0 => {}
        1 => {
            c[centre + 1] = -q / (4.0 + 4.0 * beta);
            c[centre - 1] = -q / (4.0 - 4.0 * beta);
        }
        _ => {
            for sign in [1.0, -1.0] {
                // ratios[n] = C_{±2n} / C_{±2(n−1)}
                let mut ratios = vec![0.0; n_max + 1];
                let mut g = 0.0;
                for n in (1..=n_max).rev() {
                    let k = beta + sign * 2.0 * n as f64;
                    let denom = a - k * k - q * g;
                    if denom == 0.0 || !denom.is_finite() {
                        return Err(FloquetError::NoConvergence(format!(
                            "singular recurrence at n = {}",
                            sign * n as f64
                        )));
                    }
                    g = q / denom;
                    ratios[n] = g;
                }
                let mut value = 1.0;
                for (n, ratio) in ratios.iter().enumerate().skip(1) {
                    value *= ratio;
                    let idx = if sign > 0.0 { centre + n } else { centre - n };
                    c[idx] = value;
                }
            }
            let outer = [c[0].abs(), c[width - 1].abs()];
            let inner = [c[1].abs(), c[width - 2].abs()];
            if q != 0.0 && (outer[0] >= inner[0] || outer[1] >= inner[1]) {
                return Err(FloquetError::NoConvergence(format!(
                    "coefficient tail not decaying by n_max = {n_max}"
                )));
            }
        }
    }
    let sum: f64 = c.iter().sum();
    if sum == 0.0 || !sum.is_finite() {
        return Err(FloquetError::NoConvergence(
            "coefficients cannot be normalised (Σ C₂ₙ = 0)".into(),
        ));
    }
    for x in &mut c {
        *x /= sum;
    }
    let wronskian = c
        .iter()
        .enumerate()
        .map(|(k, &ck)| (2.0 * (k as f64 - n_max as f64) + beta) * ck * ck)
        .sum();
    Ok(FloquetSolution {
        a,
        q,
        beta,
        n_max,
        coeffs: c,
        wronskian,
    })
}

impl FloquetSolution {
    /// `C₂ₙ`, zero outside the truncation.
    pub fn coeff(&self, n: i32) -> f64 {
        let idx = n + self.n_max as i32;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Copy with `C₂ₙ` replaced. The Wronskian sum is recomputed; the
    /// normalisation is left as it is.
    pub fn with_coeff(&self, n: i32, value: f64) -> Self {
        let mut out = self.clone();
        let idx = n + self.n_max as i32;
        if idx >= 0 && (idx as usize) < out.coeffs.len() {
            out.coeffs[idx as usize] = value;
        }
        out.wronskian = out.terms().map(|(k, c)| k * c * c).sum();
        out
    }

    /// Iterator over `(2n + β, C₂ₙ)`.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n_max = self.n_max as f64;
        let beta = self.beta;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (2.0 * (k as f64 - n_max) + beta, c))
    }

    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// `Σ (2n+β) C₂ₙ`, i.e. `λ₂′(0)`.
    pub fn weighted_sum(&self) -> f64 {
        self.terms().map(|(k, c)| k * c).sum()
    }

    pub fn lambda1(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| c * (k * tau).cos()).sum()
    }

    pub fn lambda2(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| c * (k * tau).sin()).sum()
    }

    pub fn lambda1_prime(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| -k * c * (k * tau).sin()).sum()
    }

    pub fn lambda2_prime(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| k * c * (k * tau).cos()).sum()
    }

    pub fn lambda1_second(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| -k * k * c * (k * tau).cos()).sum()
    }

    pub fn lambda2_second(&self, tau: f64) -> f64 {
        self.terms().map(|(k, c)| -k * k * c * (k * tau).sin()).sum()
    }

    /// `(λ₁, λ₂, λ₁′, λ₂′)` in one pass.
    pub fn evaluate(&self, tau: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, c) in self.terms() {
            let (s, co) = (k * tau).sin_cos();
            out[0] += c * co;
            out[1] += c * s;
            out[2] -= k * c * s;
            out[3] += k * c * co;
        }
        out
    }

    /// Local Wronskian `λ₁λ₂′ − λ₁′λ₂`; constant for an exact solution.
    pub fn local_wronskian(&self, tau: f64) -> f64 {
        let [l1, l2, d1, d2] = self.evaluate(tau);
        l1 * d2 - d1 * l2
    }

    /// `λ″ + (a − 2q cos 2τ) λ` for (λ₁, λ₂).
    pub fn ode_residual(&self, tau: f64) -> (f64, f64) {
        let k = self.a - 2.0 * self.q * (2.0 * tau).cos();
        (
            self.lambda1_second(tau) + k * self.lambda1(tau),
            self.lambda2_second(tau) + k * self.lambda2(tau),
        )
    }

    /// Green's function in τ: `(λ₁(τ′)λ₂(τ) − λ₁(τ)λ₂(τ′)) / W`.
    pub fn green(&self, tau: f64, tau_prime: f64) -> f64 {
        let [l1, l2, _, _] = self.evaluate(tau);
        let [m1, m2, _, _] = self.evaluate(tau_prime);
        (m1 * l2 - l1 * m2) / self.wronskian
    }

    /// Same Green's function written as the double sum
    /// `Σ C₂ₙC₂ₙ′ sin((2n+β)τ − (2n′+β)τ′) / Σ(2n+β)C₂ₙ²`.
    pub fn green_double_sum(&self, tau: f64, tau_prime: f64) -> f64 {
        let mut num = 0.0;
        for (k, c) in self.terms() {
            for (kp, cp) in self.terms() {
                num += c * cp * (k * tau - kp * tau_prime).sin();
            }
        }
        num / self.wronskian
    }

    /// Antiderivatives `(∫λ₁², ∫λ₁λ₂, ∫λ₂²)` from 0 to `x`, evaluated
    /// term by term.
    pub fn product_integrals(&self, x: f64) -> [f64; 3] {
        let mut p11 = 0.0;
        let mut p12 = 0.0;
        let mut p22 = 0.0;
        for (k, c) in self.terms() {
            for (kp, cp) in self.terms() {
                let w = 0.5 * c * cp;
                let sum = k + kp;
                let diff = k - kp;
                // ∫cos(sum x) and ∫sin(sum x); sum = 2(n+n′)+2β ≠ 0 in the first zone.
                let (int_cos_sum, int_sin_sum) = if sum.abs() > 1e-300 {
                    ((sum * x).sin() / sum, (1.0 - (sum * x).cos()) / sum)
                } else {
                    (x, 0.0)
                };
                let (int_cos_diff, int_sin_diff) = if diff != 0.0 {
                    ((diff * x).sin() / diff, (1.0 - (diff * x).cos()) / diff)
                } else {
                    (x, 0.0)
                };
                // cos·cos = ½[cos(k−k′) + cos(k+k′)], sin·sin = ½[cos(k−k′) − cos(k+k′)],
                // cos(kx)·sin(k′x) = ½[sin((k+k′)x) − sin((k−k′)x)].
                p11 += w * (int_cos_diff + int_cos_sum);
                p22 += w * (int_cos_diff - int_cos_sum);
                p12 += w * (int_sin_sum - int_sin_diff);
            }
        }
        [p11, p12, p22]
    }
}

/// Initial-condition amplitudes `(ũ₀, ṽ₀)` of
/// `u(τ) = ũ₀ λ₁(τ) + (ṽ₀/ω_p) λ₂(τ)` for release at drive phase zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeState {
    pub u0_tilde: f64,
    pub v0_tilde: f64,
}

impl TildeState {
    /// From the physical release state: `u₀ = ũ₀ ΣC₂ₙ`,
    /// `v₀ = ṽ₀ Σ(2n+β)C₂ₙ / β`.
    pub fn from_physical(u0: f64, v0: f64, sol: &FloquetSolution) -> Self {
        Self {
            u0_tilde: u0 / sol.coeff_sum(),
            v0_tilde: v0 * sol.beta / sol.weighted_sum(),
        }
    }

    pub fn to_physical(self, sol: &FloquetSolution) -> (f64, f64) {
        (
            self.u0_tilde * sol.coeff_sum(),
            self.v0_tilde * sol.weighted_sum() / sol.beta,
        )
    }
}
