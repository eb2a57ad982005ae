//! Simplified frequency-jump model and the thermal-state covariance in the
//! Paul-trap axes.
//!
//! Variances are the currency throughout; standard deviations are only
//! taken when reporting.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::phys::{OpticalTrap, PaulTrap, HBAR, K_B};

/// Gaussian phase-space state over `(u, v, u̇, v̇)` (or `(x, y, ẋ, ẏ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState4 {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl GaussianState4 {
    /// Position block `Σ_q`.
    pub fn position_cov(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Velocity block `Σ_p`.
    pub fn velocity_cov(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Applies the linear map `M`: mean → M·mean, cov → M·cov·Mᵀ.
    pub fn transformed(&self, m: &Matrix4<f64>) -> Self {
        Self {
            mean: m * self.mean,
            cov: m * self.cov * m.transpose(),
        }
    }
}

/// `(x, y, ẋ, ẏ) → (u, v, u̇, v̇)` for axes tilted by 45°:
/// `u = (x + y)/√2`, `v = (x − y)/√2`. The map is its own inverse.
pub fn xy_to_uv() -> Matrix4<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix4::new(
        s, s, 0.0, 0.0, //
        s, -s, 0.0, 0.0, //
        0.0, 0.0, s, s, //
        0.0, 0.0, s, -s,
    )
}

/// Rotates a 4-vector between the xy and uv frames.
#[inline]
pub fn rotate_xy_uv(s: [f64; 4]) -> [f64; 4] {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    [
        k * (s[0] + s[1]),
        k * (s[0] - s[1]),
        k * (s[2] + s[3]),
        k * (s[2] - s[3]),
    ]
}

/// Effective mode temperatures of the feedback-cooled optical trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalInit {
    pub t_x: f64,
    pub t_y: f64,
}

impl ThermalInit {
    pub fn new(t_x: f64, t_y: f64) -> Self {
        Self { t_x, t_y }
    }

    /// One centre-of-mass temperature for both axes.
    pub fn single(t_com: f64) -> Self {
        Self {
            t_x: t_com,
            t_y: t_com,
        }
    }

    /// `Δu₀² = (k_B/2m)(T_x/ω_x² + T_y/ω_y²)`.
    pub fn position_variance(&self, mass: f64, optical: &OpticalTrap) -> f64 {
        K_B / (2.0 * mass)
            * (self.t_x / optical.omega_x.powi(2) + self.t_y / optical.omega_y.powi(2))
    }

    /// `Δu̇₀² = (k_B/2m)(T_x + T_y)`.
    pub fn velocity_variance(&self, mass: f64) -> f64 {
        K_B / (2.0 * mass) * (self.t_x + self.t_y)
    }

    pub fn du0(&self, mass: f64, optical: &OpticalTrap) -> f64 {
        self.position_variance(mass, optical).sqrt()
    }

    pub fn dv0(&self, mass: f64) -> f64 {
        self.velocity_variance(mass).sqrt()
    }

    /// Product thermal state in the optical axes, ordering `(x, y, ẋ, ẏ)`.
    pub fn xy_state(&self, mass: f64, optical: &OpticalTrap) -> GaussianState4 {
        let kx = K_B * self.t_x / mass;
        let ky = K_B * self.t_y / mass;
        GaussianState4 {
            mean: Vector4::zeros(),
            cov: Matrix4::from_diagonal(&Vector4::new(
                kx / optical.omega_x.powi(2),
                ky / optical.omega_y.powi(2),
                kx,
                ky,
            )),
        }
    }
}

/// Covariance of the product thermal state expressed in the uv frame.
pub fn rotate_covariance_45(
    t_x: f64,
    t_y: f64,
    omega_x: f64,
    omega_y: f64,
    mass: f64,
) -> GaussianState4 {
    let pref = K_B / (2.0 * mass);
    let qx = t_x / (omega_x * omega_x);
    let qy = t_y / (omega_y * omega_y);
    let mut cov = Matrix4::zeros();
    cov[(0, 0)] = pref * (qx + qy);
    cov[(1, 1)] = pref * (qx + qy);
    cov[(0, 1)] = pref * (qx - qy);
    cov[(1, 0)] = pref * (qx - qy);
    cov[(2, 2)] = pref * (t_x + t_y);
    cov[(3, 3)] = pref * (t_x + t_y);
    cov[(2, 3)] = pref * (t_x - t_y);
    cov[(3, 2)] = pref * (t_x - t_y);
    GaussianState4 {
        mean: Vector4::zeros(),
        cov,
    }
}

/// `Δu_c²(t) = Δu₀² cos²(ω_p t) + r² (Δu̇₀²/ω_o²) sin²(ω_p t)`, `r = ω_o/ω_p`.
pub fn coherent_variance(t: f64, du0: f64, dv0: f64, omega_o: f64, omega_p: f64) -> f64 {
    let r = omega_o / omega_p;
    let (s, c) = (omega_p * t).sin_cos();
    du0 * du0 * c * c + r * r * dv0 * dv0 / (omega_o * omega_o) * s * s
}

/// `Δu_h²(t) = r² (ħΓ/mω_o)(t − sin(2ω_p t)/2ω_p)`.
pub fn heating_variance(
    t: f64,
    r: f64,
    gamma_heat: f64,
    mass: f64,
    omega_o: f64,
    omega_p: f64,
) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = 2.0 * omega_p * t;
    // t − sin(x)/(2ω_p) = (x − sin x)/(2ω_p); series near zero avoids cancellation.
    let shape = if x < 1e-3 {
        x * x * x / 6.0 * (1.0 - x * x / 20.0) / (2.0 * omega_p)
    } else {
        (x - x.sin()) / (2.0 * omega_p)
    };
    r * r * HBAR * gamma_heat / (mass * omega_o) * shape
}

/// The two traps plus the heating parameters the simple model needs.
#[derive(Debug, Clone, Copy)]
pub struct SimpleModel {
    pub omega_o: f64,
    pub omega_p: f64,
    pub mass: f64,
    pub gamma_heat: f64,
}

impl SimpleModel {
    pub fn new(optical: &OpticalTrap, paul: &PaulTrap, mass: f64, gamma_heat: f64) -> Self {
        Self {
            omega_o: optical.omega_u_eff,
            omega_p: paul.omega_p,
            mass,
            gamma_heat,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.omega_o / self.omega_p
    }

    pub fn secular_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_p
    }

    pub fn heating(&self, t: f64) -> f64 {
        heating_variance(
            t,
            self.ratio(),
            self.gamma_heat,
            self.mass,
            self.omega_o,
            self.omega_p,
        )
    }
}

/// `Δu²(t) = Δu_c²(t) + Δu_h²(t)`.
pub fn total_variance_simple(t: f64, du0: f64, dv0: f64, model: &SimpleModel) -> f64 {
    coherent_variance(t, du0, dv0, model.omega_o, model.omega_p) + model.heating(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phys::{angular, default_paper_params};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const M: f64 = 5.4e-18;

    #[test]
    fn symmetric_case_has_no_uv_correlation() {
        let w = angular(50e3);
        let st = rotate_covariance_45(0.2, 0.2, w, w, M);
        assert_eq!(st.cov[(0, 1)], 0.0);
        assert_eq!(st.cov[(2, 3)], 0.0);
        let off = st.cov - nalgebra::Matrix4::from_diagonal(&st.cov.diagonal());
        assert!(off.abs().max() < 1e-12 * st.cov.abs().max());
    }

    #[test]
    fn position_off_diagonal_closed_form() {
        let (wx, wy) = (angular(44e3), angular(58e3));
        let st = rotate_covariance_45(0.3, 0.1, wx, wy, M);
        let expected = K_B / (2.0 * M) * (0.3 / (wx * wx) - 0.1 / (wy * wy));
        assert_relative_eq!(st.cov[(0, 1)], expected, max_relative = 1e-14);
        // cross position–velocity blocks vanish
        assert!(st.cov.fixed_view::<2, 2>(0, 2).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rotation_matches_congruence_transform() {
        let (_, optical, _) = default_paper_params();
        let init = ThermalInit::new(0.3, 0.1);
        let xy = init.xy_state(M, &optical);
        let uv = xy.transformed(&xy_to_uv());
        let direct = rotate_covariance_45(0.3, 0.1, optical.omega_x, optical.omega_y, M);
        for (a, b) in uv.cov.iter().zip(direct.cov.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-40);
        }
    }

    #[test]
    fn velocity_to_position_ratio_for_equal_temperatures() {
        let (particle, optical, _) = default_paper_params();
        let init = ThermalInit::single(0.155);
        let ratio = init.dv0(particle.mass) / (optical.omega_u_eff * init.du0(particle.mass, &optical));
        // 2 / ((ω_x² + ω_y²)/2 · (1/ω_x² + 1/ω_y²)) by hand with 44 and 58 kHz:
        // (1/44² + 1/58²) = 8.1378e-4, (44² + 58²)/2 = 2650 → ratio² = 0.92740.
        assert!((ratio - 0.963).abs() < 5e-4, "{ratio}");
    }

    #[test]
    fn paper_ratio_needs_unequal_temperatures() {
        // All weight on x gives the smallest attainable ratio, ω_x/ω_o ≈ 0.855.
        let (particle, optical, _) = default_paper_params();
        let init = ThermalInit::new(0.155, 0.0);
        let ratio = init.dv0(particle.mass) / (optical.omega_u_eff * init.du0(particle.mass, &optical));
        assert_relative_eq!(ratio, optical.omega_x / optical.omega_u_eff, max_relative = 1e-12);
        assert!(ratio > 0.85);
    }

    #[test]
    fn coherent_variance_examples() {
        let (wo, wp) = (angular(51e3), angular(3.5e3));
        assert_relative_eq!(coherent_variance(0.0, 2e-9, 1e-4, wo, wp), 4e-18);
        let du0 = 1.5e-9;
        let tq = PI / (2.0 * wp);
        let r = wo / wp;
        assert_relative_eq!(
            coherent_variance(tq, du0, wo * du0, wo, wp),
            (r * du0).powi(2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn coherent_size_at_quarter_period_r14_5() {
        let wo = angular(51.47e3);
        let wp = wo / 14.5;
        let du0 = 1.5e-9;
        let dv0 = 0.85 * du0 * wo;
        let size = coherent_variance(PI / (2.0 * wp), du0, dv0, wo, wp).sqrt();
        // 14.5 · 0.85 · 1.5 nm
        assert_relative_eq!(size, 18.4875e-9, max_relative = 1e-10);
    }

    #[test]
    fn heating_examples() {
        let (particle, optical, _) = default_paper_params();
        let wo = optical.omega_u_eff;
        let r = 14.5;
        let wp = wo / r;
        assert_eq!(heating_variance(0.0, r, particle.gamma_heat, particle.mass, wo, wp), 0.0);
        let half = PI / wp;
        let h = heating_variance(half, r, particle.gamma_heat, particle.mass, wo, wp);
        let eq4 = r * r * HBAR * particle.gamma_heat / (particle.mass * wo) * half;
        assert_relative_eq!(h, eq4, max_relative = 1e-12);
        // ≈ 141 µs and ≈ 3.2 nm at the paper operating point
        assert!((half - 141e-6).abs() < 1e-6);
        assert!((h.sqrt() - 3.2e-9).abs() < 0.1e-9, "{}", h.sqrt());
    }

    #[test]
    fn total_variance_limits() {
        let (particle, optical, paul) = default_paper_params();
        let model = SimpleModel::new(&optical, &paul, particle.mass, particle.gamma_heat);
        let (du0, dv0) = (2e-9, 2e-9 * optical.omega_u_eff * 0.9);
        let cold = SimpleModel { gamma_heat: 0.0, ..model };
        for &t in &[0.0, 3e-5, 1e-4] {
            assert_eq!(
                total_variance_simple(t, du0, dv0, &cold),
                coherent_variance(t, du0, dv0, model.omega_o, model.omega_p)
            );
        }
        let tp = model.secular_period();
        let eq4 = du0 * du0
            + model.ratio().powi(2) * HBAR * model.gamma_heat / (model.mass * model.omega_o) * tp / 2.0;
        assert_relative_eq!(total_variance_simple(tp / 2.0, du0, dv0, &model), eq4, max_relative = 1e-12);
        assert_relative_eq!(
            total_variance_simple(tp, du0, dv0, &model),
            du0 * du0 + model.heating(tp),
            max_relative = 1e-12
        );
    }

    #[test]
    fn heating_slope_vanishes_at_release() {
        let (wo, wp) = (angular(51e3), angular(3e3));
        let h = 1e-9;
        let d = heating_variance(h, 17.0, 5e6, M, wo, wp) / h;
        let scale = 17.0f64.powi(2) * HBAR * 5e6 / (M * wo);
        assert!(d < 1e-6 * scale);
    }

    proptest! {
        #[test]
        fn coherent_variance_half_period_periodic(
            t in 0.0f64..1e-3, du0 in 1e-10f64..1e-8, ratio in 0.5f64..1.2, fp in 1e3f64..8e3,
        ) {
            let wo = angular(51e3);
            let wp = angular(fp);
            let dv0 = ratio * du0 * wo;
            let half = PI / wp;
            let a = coherent_variance(t, du0, dv0, wo, wp);
            let b = coherent_variance(t + half, du0, dv0, wo, wp);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(b));
        }

        #[test]
        fn heating_is_non_decreasing(t in 0.0f64..2e-3, dt in 0.0f64..1e-5) {
            let (wo, wp) = (angular(51e3), angular(3e3));
            let a = heating_variance(t, 17.0, 5e6, M, wo, wp);
            let b = heating_variance(t + dt, 17.0, 5e6, M, wo, wp);
            prop_assert!(b >= a * (1.0 - 1e-14));
        }

        #[test]
        fn rotation_preserves_traces_and_determinants(
            tx in 1e-3f64..1.0, ty in 1e-3f64..1.0, fx in 2e4f64..8e4, fy in 2e4f64..8e4,
        ) {
            let (wx, wy) = (angular(fx), angular(fy));
            let st = rotate_covariance_45(tx, ty, wx, wy, M);
            let k = K_B / M;
            let (vx, vy) = (k * tx / (wx * wx), k * ty / (wy * wy));
            let (sq, sp) = (st.position_cov(), st.velocity_cov());
            prop_assert!((sq.trace() - (vx + vy)).abs() <= 1e-12 * (vx + vy));
            prop_assert!((sp.trace() - k * (tx + ty)).abs() <= 1e-12 * k * (tx + ty));
            prop_assert!((sq.determinant() - vx * vy).abs() <= 1e-10 * vx * vy);
            let (px, py) = (k * tx, k * ty);
            prop_assert!((sp.determinant() - px * py).abs() <= 1e-10 * px * py);
        }

        #[test]
        fn off_diagonals_cannot_both_vanish(
            t in 1e-3f64..1.0, fx in 2e4f64..8e4, df in 1e2f64..3e4,
        ) {
            // Σ_p off-diagonal zero forces T_x = T_y; then Σ_q's is nonzero
            // whenever ω_x ≠ ω_y.
            let (wx, wy) = (angular(fx), angular(fx + df));
            let st = rotate_covariance_45(t, t, wx, wy, M);
            prop_assert_eq!(st.cov[(2, 3)], 0.0);
            prop_assert!(st.cov[(0, 1)].abs() > 0.0);
            let expected = K_B * t / (2.0 * M) * (1.0 / (wx * wx) - 1.0 / (wy * wy));
            prop_assert!((st.cov[(0, 1)] - expected).abs() <= 1e-12 * expected.abs());
        }
    }
}
