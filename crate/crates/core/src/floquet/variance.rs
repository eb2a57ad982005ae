//! Micromotion-resolved state size: coherent spreading through the Floquet
//! solutions and heating through the Green's function.

use super::{tau_of, FloquetError, FloquetSolution, TildeState};
use crate::phys::K_B;

/// Floquet solution bound to a drive frequency and release phase.
///
/// A release at drive phase φ sees `cos(2τ + φ)`, so the basis used is
/// `λᵢ(τ + φ/2)`.
#[derive(Debug, Clone)]
pub struct FullModel {
    pub sol: FloquetSolution,
    pub omega_rf: f64,
    pub rf_phase0: f64,
}

impl FullModel {
    pub fn new(sol: FloquetSolution, omega_rf: f64, rf_phase0: f64) -> Self {
        Self {
            sol,
            omega_rf,
            rf_phase0,
        }
    }

    pub fn omega_p(&self) -> f64 {
        self.sol.beta * self.omega_rf / 2.0
    }

    fn shift(&self) -> f64 {
        0.5 * self.rf_phase0
    }

    /// `(A, B)` with `u(t) = A u₀ + B v₀` for the homogeneous motion; B in s.
    pub fn propagator(&self, t: f64) -> (f64, f64) {
        let s = self.shift();
        let tau = tau_of(t, self.omega_rf);
        let [y1_0, y2_0, d1_0, d2_0] = self.sol.evaluate(s);
        let [y1, y2, _, _] = self.sol.evaluate(s + tau);
        let w0 = y1_0 * d2_0 - d1_0 * y2_0;
        let a = (y1 * d2_0 - y2 * d1_0) / w0;
        let b_tau = (y2 * y1_0 - y1 * y2_0) / w0;
        // du/dτ = (2/Ω) du/dt
        (a, b_tau * 2.0 / self.omega_rf)
    }

    /// Coherent variance from uncorrelated initial spreads `(Δu₀, Δu̇₀)`.
    pub fn coherent_variance(&self, t: f64, du0: f64, dv0: f64) -> f64 {
        let (a, b) = self.propagator(t);
        a * a * du0 * du0 + b * b * dv0 * dv0
    }

    /// `∫₀^τ g²(τ, τ′) dτ′` for the shifted basis, closed form over the
    /// truncated series.
    pub fn green_square_integral(&self, t: f64) -> f64 {
        let s = self.shift();
        let tau = tau_of(t, self.omega_rf);
        if tau == 0.0 {
            return 0.0;
        }
        let lo = self.sol.product_integrals(s);
        let hi = self.sol.product_integrals(s + tau);
        let j11 = hi[0] - lo[0];
        let j12 = hi[1] - lo[1];
        let j22 = hi[2] - lo[2];
        let [y1, y2, _, _] = self.sol.evaluate(s + tau);
        let w = self.sol.wronskian;
        ((y2 * y2 * j11 - 2.0 * y1 * y2 * j12 + y1 * y1 * j22) / (w * w)).max(0.0)
    }

    /// Heating variance `r² (2γk_BT/mω_o²) ∫₀ᵗ g²(t, t′) dt′`, with g the
    /// time-domain Green's function normalised to unit velocity kick
    /// (`β · g_τ`).
    pub fn heating_variance(&self, t: f64, gamma: f64, t_bath: f64, mass: f64) -> f64 {
        if t <= 0.0 || gamma == 0.0 {
            return 0.0;
        }
        // r²β²/ω_o² = 4/Ω², and dt′ = (2/Ω) dτ′.
        let diffusion = 2.0 * gamma * K_B * t_bath / mass;
        let omega = self.omega_rf;
        diffusion * 4.0 / (omega * omega) * (2.0 / omega) * self.green_square_integral(t)
    }

    /// Same heating variance by composite trapezoid in t′ with step at most
    /// `T_rf/50`, Richardson-extrapolated once.
    pub fn heating_variance_quadrature(
        &self,
        t: f64,
        gamma: f64,
        t_bath: f64,
        mass: f64,
    ) -> Result<f64, FloquetError> {
        if t < 0.0 || !t.is_finite() {
            return Err(FloquetError::Quadrature(format!("invalid time {t}")));
        }
        if t == 0.0 || gamma == 0.0 {
            return Ok(0.0);
        }
        let s = self.shift();
        let tau = tau_of(t, self.omega_rf);
        let t_rf = std::f64::consts::TAU / self.omega_rf;
        let n = ((t / (t_rf / 50.0)).ceil() as usize).max(2);
        let trap = |n: usize| {
            let h = tau / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                let g = self.sol.green(s + tau, s + i as f64 * h);
                acc += w * g * g;
            }
            acc * h
        };
        let coarse = trap(n);
        let fine = trap(2 * n);
        let integral = (4.0 * fine - coarse) / 3.0;
        if !integral.is_finite() || (fine - coarse).abs() > 1e-2 * fine.abs().max(1e-300) {
            return Err(FloquetError::Quadrature(format!(
                "trapezoid refinement failed to settle: {coarse} vs {fine}"
            )));
        }
        let diffusion = 2.0 * gamma * K_B * t_bath / mass;
        let omega = self.omega_rf;
        Ok(diffusion * 4.0 / (omega * omega) * (2.0 / omega) * integral.max(0.0))
    }
}

/// Coherent variance written with tilde amplitudes,
/// `Δũ₀² λ₁²(τ) + r² (Δṽ₀²/ω_o²) λ₂²(τ)` with `τ = Ωt/2`, for release at drive
/// phase zero. The second spread is the tilde velocity spread.
pub fn full_coherent_variance(
    t: f64,
    spread: TildeState,
    omega_o: f64,
    omega_rf: f64,
    sol: &FloquetSolution,
) -> f64 {
    let tau = tau_of(t, omega_rf);
    let omega_p = sol.beta * omega_rf / 2.0;
    let r = omega_o / omega_p;
    let l1 = sol.lambda1(tau);
    let l2 = sol.lambda2(tau);
    spread.u0_tilde.powi(2) * l1 * l1
        + r * r * spread.v0_tilde.powi(2) / (omega_o * omega_o) * l2 * l2
}

/// Heating variance for release at drive phase zero.
pub fn full_heating_variance(
    t: f64,
    gamma: f64,
    t_bath: f64,
    mass: f64,
    omega_rf: f64,
    sol: &FloquetSolution,
) -> f64 {
    FullModel::new(sol.clone(), omega_rf, 0.0).heating_variance(t, gamma, t_bath, mass)
}
