//! Floquet model against independent oracles.
//!
//! Frozen reference values come from a separate scipy script: β from the
//! one-period monodromy matrix integrated with DOP853 (rtol 1e-13), the
//! propagator from direct integration of the driven Mathieu equation, and
//! the heating variance from the covariance (Lyapunov) ODE
//! `Σ̇ = AΣ + ΣAᵀ + D`, all at the paper operating points.

use std::f64::consts::PI;

use darkjump_core::analytic::{coherent_variance, heating_variance, ThermalInit};
use darkjump_core::floquet::{
    characteristic_exponent, floquet_coefficients, full_coherent_variance, full_heating_variance,
    model_for, q_for_beta, FloquetSolution, FullModel, TildeState, DEFAULT_BETA_TOL,
};
use darkjump_core::phys::{
    derive_mathieu_params, paper_params_at_ratio, PaulTrap, PAPER_RATIOS, PAPER_T_COM,
};

const NM2: f64 = 1e-18;

// (r, q_u at a_u = 0) from the scipy monodromy oracle.
const PAPER_Q: [(f64, f64); 3] = [
    (8.8, 0.476_986_467_191_841_3),
    (14.5, 0.298_803_596_698_999_9),
    (24.3, 0.180_403_679_628_721_1),
];

fn solution(a: f64, q: f64, n_max: usize) -> FloquetSolution {
    let beta = characteristic_exponent(a, q, DEFAULT_BETA_TOL).unwrap();
    floquet_coefficients(a, q, beta, n_max).unwrap()
}

#[test]
fn beta_against_monodromy_oracle() {
    let beta = characteristic_exponent(0.04, 0.05, 1e-13).unwrap();
    assert!((beta - 0.203_232_503_321_865_54).abs() < 1e-9, "{beta}");
    // Leading-order series β² ≈ a + q²/2 only holds to O(q²·a).
    assert!((beta - (0.04f64 + 0.05 * 0.05 / 2.0).sqrt()).abs() < 2e-4);
}

#[test]
fn paper_operating_points_match_oracle_q() {
    for (r, q) in PAPER_Q {
        let (_, _, paul) = paper_params_at_ratio(r).unwrap();
        assert!((paul.q_u - q).abs() < 1e-9, "r = {r}: {} vs {q}", paul.q_u);
    }
}

#[test]
fn secular_six_kilohertz_at_thirty_three() {
    // Drive and secular frequency from the trap description: β = 12/33.
    let target = 12.0 / 33.0;
    let q = q_for_beta(0.0, target).unwrap();
    assert!((q - 0.487_945_514_537_847_5).abs() < 1e-9, "{q}");
    // Same point reached through electrode curvatures.
    let (n_e, mass, omega_rf) = (1, 5.371e-18, 2.0 * PI * 33e3);
    let d2phi_rf = q * mass * omega_rf * omega_rf / (2.0 * 1.602_176_634e-19);
    let (a, q2) = derive_mathieu_params(n_e, mass, omega_rf, 0.0, d2phi_rf).unwrap();
    let beta = characteristic_exponent(a, q2, DEFAULT_BETA_TOL).unwrap();
    assert!((beta - target).abs() < 1e-10);
    let trap = PaulTrap::new(omega_rf, a, q2, 0.0).unwrap();
    assert!((trap.omega_p / (2.0 * PI) - 6e3).abs() < 1e-5);
}

#[test]
fn derivatives_match_finite_differences() {
    let sol = solution(0.0, PAPER_Q[0].1, 8);
    let h = 1e-3;
    for k in 0..50 {
        let tau = k as f64 * PI / 50.0;
        let fd1 = (sol.lambda1(tau + h) - sol.lambda1(tau - h)) / (2.0 * h);
        let fd2 = (sol.lambda2(tau + h) - 2.0 * sol.lambda2(tau) + sol.lambda2(tau - h)) / (h * h);
        assert!((fd1 - sol.lambda1_prime(tau)).abs() < 1e-5);
        assert!((fd2 - sol.lambda2_second(tau)).abs() < 1e-5);
    }
}

#[test]
fn ode_residual_and_wronskian_over_a_drive_period() {
    for (_, q) in PAPER_Q {
        let sol = solution(0.0, q, 8);
        let mut peak: f64 = 0.0;
        let mut worst: f64 = 0.0;
        let mut w_dev: f64 = 0.0;
        for k in 0..=100 {
            let tau = k as f64 * PI / 100.0;
            peak = peak.max(sol.lambda1(tau).abs()).max(sol.lambda2(tau).abs());
            let (r1, r2) = sol.ode_residual(tau);
            worst = worst.max(r1.abs()).max(r2.abs());
            w_dev = w_dev.max((sol.local_wronskian(tau) / sol.wronskian - 1.0).abs());
        }
        assert!(worst < 1e-8 * peak, "q = {q}: residual {worst}");
        assert!(w_dev < 1e-8, "q = {q}: wronskian drift {w_dev}");
        // W = Σ(2n+β)C² under Σ C = 1.
        let direct: f64 = sol.terms().map(|(k, c)| k * c * c).sum();
        assert!((direct - sol.wronskian).abs() < 1e-14);
    }
}

#[test]
fn truncation_converges_between_five_and_eight() {
    let init = ThermalInit::single(PAPER_T_COM);
    for r in PAPER_RATIOS {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let (du0, dv0) = (init.du0(p.mass, &o), init.dv0(p.mass));
        let m5 = model_for(&paul, 5).unwrap();
        let m8 = model_for(&paul, 8).unwrap();
        for k in 1..=16 {
            let t = paul.secular_period() * k as f64 / 16.0;
            let c5 = m5.coherent_variance(t, du0, dv0);
            let c8 = m8.coherent_variance(t, du0, dv0);
            let h5 = m5.heating_variance(t, p.gamma, p.t_bath, p.mass);
            let h8 = m8.heating_variance(t, p.gamma, p.t_bath, p.mass);
            assert!((c5 / c8 - 1.0).abs() < 1e-6, "r = {r}, t = {t}");
            assert!((h5 / h8 - 1.0).abs() < 1e-6, "r = {r}, t = {t}");
        }
    }
}

#[test]
fn first_order_truncation_sits_between_zeroth_and_converged() {
    let init = ThermalInit::single(PAPER_T_COM);
    for r in PAPER_RATIOS {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let (du0, dv0) = (init.du0(p.mass, &o), init.dv0(p.mass));
        let t = paul.secular_period() / 4.0;
        let total = |n| {
            let m = model_for(&paul, n).unwrap();
            m.coherent_variance(t, du0, dv0) + m.heating_variance(t, p.gamma, p.t_bath, p.mass)
        };
        let (v0, v1, v5) = (total(0), total(1), total(5));
        assert!(v0.min(v5) <= v1 && v1 <= v0.max(v5), "r = {r}: {v0} {v1} {v5}");
    }
}

#[test]
fn full_model_against_direct_integration() {
    // (r, phase, Δu_c²(T_p/4), Δu_c²(T_p/2)) in nm².
    let cases = [
        (8.8, 0.0, 301.772_103_445_218_36, 7.003_128_369_310_716),
        (8.8, PI, 356.847_076_089_191_2, 7.388_703_425_391_175),
        (14.5, 0.0, 704.684_698_594_593_1, 7.271_700_562_810_352),
        (14.5, PI, 994.959_969_098_736_8, 3.266_477_485_911_95),
        (24.3, 0.0, 1643.955_430_362_301, 4.978_913_932_471_48),
        (24.3, PI, 3163.202_522_774_339_3, 3.947_665_224_221_348_4),
    ];
    let init = ThermalInit::single(PAPER_T_COM);
    for (r, phase, quarter, half) in cases {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let model = model_for(&paul.with_rf_phase(phase), 8).unwrap();
        let (du0, dv0) = (init.du0(p.mass, &o), init.dv0(p.mass));
        let tp = paul.secular_period();
        let got_q = model.coherent_variance(tp / 4.0, du0, dv0) / NM2;
        let got_h = model.coherent_variance(tp / 2.0, du0, dv0) / NM2;
        assert!((got_q / quarter - 1.0).abs() < 1e-7, "r = {r}, φ = {phase}: {got_q}");
        assert!((got_h / half - 1.0).abs() < 1e-6, "r = {r}, φ = {phase}: {got_h}");
    }
}

#[test]
fn heating_against_covariance_ode() {
    // (r, Δu_h²(T_p/2), Δu_h²(T_p)) in nm² for release at phase π.
    let cases = [
        (8.8, 3.709_625_479_975_193_3, 4.172_535_976_575_44),
        (14.5, 9.358_208_878_450_538, 20.711_817_069_020_277),
        (24.3, 52.853_216_473_743_664, 85.762_192_746_262_26),
    ];
    for (r, half, full) in cases {
        let (p, _, paul) = paper_params_at_ratio(r).unwrap();
        let model = model_for(&paul.with_rf_phase(PI), 8).unwrap();
        let tp = paul.secular_period();
        let h = |t| model.heating_variance(t, p.gamma, p.t_bath, p.mass) / NM2;
        assert!((h(tp / 2.0) / half - 1.0).abs() < 1e-6, "r = {r}: {}", h(tp / 2.0));
        assert!((h(tp) / full - 1.0).abs() < 1e-6, "r = {r}: {}", h(tp));
    }
}

#[test]
fn closed_form_heating_agrees_with_quadrature() {
    for r in PAPER_RATIOS {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let model = model_for(&paul, 8).unwrap();
        let simple_at = |t: f64| {
            heating_variance(t, r, p.gamma_heat, p.mass, o.omega_u_eff, paul.omega_p)
        };
        for k in 1..=8 {
            let t = paul.secular_period() * k as f64 / 8.0;
            let closed = model.heating_variance(t, p.gamma, p.t_bath, p.mass);
            let quad = model
                .heating_variance_quadrature(t, p.gamma, p.t_bath, p.mass)
                .unwrap();
            assert!((closed - quad).abs() < 1e-4 * simple_at(t), "r = {r}, k = {k}");
        }
    }
}

#[test]
fn heating_slope_tracks_simple_model() {
    for r in PAPER_RATIOS {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let model = model_for(&paul, 8).unwrap();
        let tp = paul.secular_period();
        let full = model.heating_variance(tp, p.gamma, p.t_bath, p.mass);
        let simple = heating_variance(tp, r, p.gamma_heat, p.mass, o.omega_u_eff, paul.omega_p);
        assert!((full / simple - 1.0).abs() < 0.2, "r = {r}: {}", full / simple);
    }
}

/// Amplitude of the `cos/sin(ωt)` component of `ys` after removing a
/// quadratic trend.
fn tone_amplitude(ts: &[f64], ys: &[f64], omega: f64) -> f64 {
    let n = ts.len() as f64;
    let t0 = ts[0];
    let span = ts[ts.len() - 1] - t0;
    // Least squares on [1, s, s²] with s in [0, 1].
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&t, &y) in ts.iter().zip(ys) {
        let s = (t - t0) / span;
        let row = nalgebra::Vector3::new(1.0, s, s * s);
        ata += row * row.transpose();
        aty += row * y;
    }
    let c = ata.lu().solve(&aty).unwrap();
    let (mut re, mut im) = (0.0, 0.0);
    for (&t, &y) in ts.iter().zip(ys) {
        let s = (t - t0) / span;
        let resid = y - (c[0] + c[1] * s + c[2] * s * s);
        re += resid * (omega * t).cos();
        im += resid * (omega * t).sin();
    }
    2.0 * (re * re + im * im).sqrt() / n
}

#[test]
fn heating_is_modulated_at_the_drive() {
    let (p, _, paul) = paper_params_at_ratio(8.8).unwrap();
    let model = model_for(&paul, 8).unwrap();
    let pseudo = model_for(&PaulTrap::pseudo_potential(paul.omega_rf, paul.omega_p).unwrap(), 0)
        .unwrap();
    let t_rf = paul.rf_period();
    let ts: Vec<f64> = (0..64).map(|k| 0.25 * paul.secular_period() + k as f64 * t_rf / 32.0).collect();
    let amp = |m: &FullModel| {
        let ys: Vec<f64> = ts.iter().map(|&t| m.heating_variance(t, p.gamma, p.t_bath, p.mass)).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        tone_amplitude(&ts, &ys, paul.omega_rf) / mean
    };
    // The pseudo-potential curve only leaks its secular curvature.
    let (full, smooth) = (amp(&model), amp(&pseudo));
    assert!(full > 0.1 && full > 10.0 * smooth, "{full} vs {smooth}");
}

#[test]
fn pseudo_potential_reduces_to_simple_model() {
    let init = ThermalInit::single(PAPER_T_COM);
    for r in PAPER_RATIOS {
        let (p, o, paul) = paper_params_at_ratio(r).unwrap();
        let trap = PaulTrap::pseudo_potential(paul.omega_rf, paul.omega_p).unwrap();
        let sol = floquet_coefficients(trap.a_u, 0.0, trap.beta, 8).unwrap();
        let (du0, dv0) = (init.du0(p.mass, &o), init.dv0(p.mass));
        let spread = TildeState::from_physical(du0, dv0, &sol);
        for k in 0..=64 {
            let t = 2.0 * trap.secular_period() * k as f64 / 64.0;
            let full = full_coherent_variance(t, spread, o.omega_u_eff, trap.omega_rf, &sol);
            let simple = coherent_variance(t, du0, dv0, o.omega_u_eff, trap.omega_p);
            assert!((full / simple - 1.0).abs() < 1e-10, "r = {r}, t = {t}");
            let fh = full_heating_variance(t, p.gamma, p.t_bath, p.mass, trap.omega_rf, &sol);
            let sh = heating_variance(t, r, p.gamma_heat, p.mass, o.omega_u_eff, trap.omega_p);
            if sh > 0.0 {
                assert!((fh / sh - 1.0).abs() < 1e-10, "r = {r}, t = {t}: {fh} {sh}");
            }
        }
    }
}

#[test]
fn zero_damping_means_zero_heating() {
    let (p, _, paul) = paper_params_at_ratio(14.5).unwrap();
    let model = model_for(&paul, 8).unwrap();
    for k in 0..10 {
        let t = k as f64 * 1e-5;
        assert_eq!(model.heating_variance(t, 0.0, p.t_bath, p.mass), 0.0);
    }
    assert_eq!(model.heating_variance(0.0, p.gamma, p.t_bath, p.mass), 0.0);
}
