//! Trajectory simulator against closed-form and Floquet oracles.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use darkjump_core::analytic::{coherent_variance, heating_variance, rotate_covariance_45, ThermalInit};
use darkjump_core::dsp::variance;
use darkjump_core::dynamics::{
    run_ensemble, run_protocol, sample_initial_state, step_langevin, Detection, EnsembleConfig,
    Experiment, Potential, ProtocolSchedule,
};
use darkjump_core::floquet::model_for;
use darkjump_core::phys::{PaulTrap, K_B};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ideal(n: usize, seed: u64) -> EnsembleConfig {
    EnsembleConfig::new(n, seed, ProtocolSchedule::default().without_delays(), Detection::Ideal)
}

fn pseudo(mut exp: Experiment) -> Experiment {
    exp.paul = PaulTrap::pseudo_potential(exp.paul.omega_rf, exp.paul.omega_p).unwrap();
    exp
}

fn noiseless(mut exp: Experiment) -> Experiment {
    exp.particle = exp.particle.without_bath();
    exp
}

fn var_u(stats: &darkjump_core::dynamics::EnsembleStats) -> f64 {
    variance(&stats.u_values())
}

#[test]
fn zero_dark_time_is_the_identity() {
    let exp = Experiment::paper(14.5).unwrap();
    let sched = ProtocolSchedule {
        t_post: 0.0,
        ..ProtocolSchedule::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let traj = run_protocol(&sched, &exp, 3, &mut rng).unwrap();
    assert_eq!(traj.samples.len(), 1);
    assert_eq!(traj.release_state, traj.samples[0]);
    assert_eq!(traj.recapture_state, traj.samples[0]);
    // The ensemble reads the same state back.
    let stats = &run_ensemble(&[0.0], &exp, &ideal(4, 3)).unwrap()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let first = run_protocol(&sched.without_delays(), &exp, 3, &mut rng).unwrap();
    assert_eq!(stats.truth[0], first.recapture_u());
}

#[test]
fn thermal_draws_match_the_rotated_covariance() {
    let exp = Experiment::paper(14.5).unwrap();
    let (m, o) = (exp.particle.mass, exp.optical);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let (mut us, mut vs, mut uds) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let [x, y, vx, vy] = sample_initial_state(&exp.init, m, &o, &mut rng);
        us.push(FRAC_1_SQRT_2 * (x + y));
        vs.push(FRAC_1_SQRT_2 * (x - y));
        uds.push(FRAC_1_SQRT_2 * (vx + vy));
    }
    let du = variance(&us).sqrt();
    assert!((du / 2.026_398_307_673_788_7e-9 - 1.0).abs() < 0.02, "{du}");
    assert!((du / exp.init.du0(m, &o) - 1.0).abs() < 0.02);
    assert!((variance(&uds).sqrt() / 6.311_933_512_380_214e-4 - 1.0).abs() < 0.02);

    let cov = rotate_covariance_45(exp.init.t_x, exp.init.t_y, o.omega_x, o.omega_y, m).cov;
    let rho = cov[(0, 1)] / cov[(0, 0)];
    let c: f64 = us.iter().zip(&vs).map(|(u, v)| u * v).sum::<f64>() / n as f64;
    let rho_mc = c / (variance(&us) * variance(&vs)).sqrt();
    let sigma = (1.0 - rho * rho) / (n as f64).sqrt();
    assert!((rho_mc - rho).abs() < 3.0 * sigma, "{rho_mc} vs {rho}");
}

#[test]
fn zero_temperature_start_is_at_rest() {
    let exp = Experiment::paper(8.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let s = sample_initial_state(&ThermalInit::single(0.0), exp.particle.mass, &exp.optical, &mut rng);
    assert_eq!(s, [0.0; 4]);
}

#[test]
fn static_trap_thermalizes_to_equipartition() {
    let exp = Experiment::paper(14.5).unwrap();
    let (m, t_bath) = (exp.particle.mass, 293.0);
    // Strong damping so that a short run holds many correlation times.
    let gamma = 2.0 * PI * 5e3;
    let diffusion = 2.0 * gamma * K_B * t_bath / m;
    let pot = Potential::optical(&exp.optical);
    let h = exp.optical.period_y() / 400.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut state = [0.0; 4];
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    let burn = (20.0 / gamma / h) as usize;
    let every = (1.0 / gamma / h) as usize;
    for k in 0..burn + 20_000 * every {
        step_langevin(&mut state, k as f64 * h, h, &pot, gamma, diffusion, &mut rng);
        if k >= burn && (k - burn) % every == 0 {
            xs.push(state[0]);
            vs.push(state[2]);
        }
    }
    let kt_m = K_B * t_bath / m;
    assert!((variance(&vs) / kt_m - 1.0).abs() < 0.05, "{}", variance(&vs) / kt_m);
    let x_eq = kt_m / exp.optical.omega_x.powi(2);
    assert!((variance(&xs) / x_eq - 1.0).abs() < 0.05, "{}", variance(&xs) / x_eq);
}

#[test]
fn record_marks_follow_the_schedule() {
    let exp = Experiment::paper(14.5).unwrap();
    let sched = ProtocolSchedule {
        t_pre: 20e-6,
        t_d: 50.5e-6,
        t_post: 100e-6,
        ..ProtocolSchedule::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let traj = run_protocol(&sched, &exp, 1, &mut rng).unwrap();
    assert_eq!(traj.samples.len(), 172);
    assert!(traj.release_index < traj.recapture_index);
    assert!(traj.time(traj.release_index) >= 0.0 && traj.time(traj.release_index - 1) < 0.0);
    assert!(traj.time(traj.recapture_index) > sched.t_d);
    assert!(traj.time(traj.recapture_index - 1) <= sched.t_d);
    assert!((0.0..sched.trigger_jitter).contains(&traj.trigger_delay));
    assert_eq!(traj.fixed_delay, 1.5e-6);
}

#[test]
fn ensembles_are_reproducible_across_thread_counts() {
    let exp = Experiment::paper(14.5).unwrap();
    let cfg = ideal(64, 99);
    let t_ds = [0.0, 37e-6, 70.4e-6];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ensemble(&t_ds, &exp, &cfg).unwrap())
    };
    assert_eq!(run(1), run(4));
    let mut rng_a = ChaCha8Rng::seed_from_u64(7);
    let mut rng_b = ChaCha8Rng::seed_from_u64(7);
    let sched = ProtocolSchedule::default().with_t_d(50e-6);
    assert_eq!(
        run_protocol(&sched, &exp, 7, &mut rng_a).unwrap(),
        run_protocol(&sched, &exp, 7, &mut rng_b).unwrap()
    );
}

#[test]
fn forced_seed_gives_identical_shots() {
    let exp = Experiment::paper(14.5).unwrap();
    let mut cfg = ideal(8, 1);
    cfg.forced_seed = Some(42);
    let stats = &run_ensemble(&[40e-6], &exp, &cfg).unwrap()[0];
    assert_eq!(stats.raw_var_u, 0.0);
    assert_eq!(stats.du, 0.0);
}

#[test]
fn pseudo_potential_ensemble_matches_closed_form() {
    let n = 2000;
    for r in [8.8, 24.3] {
        let exp = noiseless(pseudo(Experiment::paper(r).unwrap()));
        let tp = exp.paul.secular_period();
        let t_ds: Vec<f64> = (0..5).map(|k| k as f64 * tp / 8.0).collect();
        let (du0, dv0) = (exp.init.du0(exp.particle.mass, &exp.optical), exp.init.dv0(exp.particle.mass));
        for stats in run_ensemble(&t_ds, &exp, &ideal(n, 2024)).unwrap() {
            let want = coherent_variance(stats.t_d, du0, dv0, exp.optical.omega_u_eff, exp.paul.omega_p);
            let rel = var_u(&stats) / want - 1.0;
            assert!(rel.abs() < 4.0 / (2.0 * n as f64).sqrt(), "r = {r}, t_d = {}: {rel}", stats.t_d);
        }
    }
}

#[test]
fn full_mathieu_ensemble_matches_floquet_model() {
    let n = 1000;
    for r in [8.8, 14.5] {
        let exp = noiseless(Experiment::paper(r).unwrap());
        let model = model_for(&exp.paul, 8).unwrap();
        let tp = exp.paul.secular_period();
        let (du0, dv0) = (exp.init.du0(exp.particle.mass, &exp.optical), exp.init.dv0(exp.particle.mass));
        for stats in run_ensemble(&[tp / 4.0, tp / 2.0, 0.8 * tp], &exp, &ideal(n, 77)).unwrap() {
            let want = model.coherent_variance(stats.t_d, du0, dv0);
            let rel = var_u(&stats) / want - 1.0;
            assert!(rel.abs() < 3.0 * (2.0 / n as f64).sqrt(), "r = {r}, t_d = {}: {rel}", stats.t_d);
        }
    }
}

/// Heating-only displacements: the same shots with and without the gas.
fn heating_displacements(exp: &Experiment, t_d: f64, n: usize, seed: u64) -> Vec<f64> {
    let cfg = ideal(n, seed);
    let hot = &run_ensemble(&[t_d], exp, &cfg).unwrap()[0];
    let cold = &run_ensemble(&[t_d], &noiseless(*exp), &cfg).unwrap()[0];
    assert_eq!(hot.excluded + cold.excluded, 0);
    hot.u_values().iter().zip(cold.u_values()).map(|(a, b)| a - b).collect()
}

#[test]
fn heating_grows_as_ratio_squared() {
    let n = 4000;
    let mut slopes = Vec::new();
    for r in [8.8, 24.3] {
        let exp = pseudo(Experiment::paper(r).unwrap());
        let tp = exp.paul.secular_period();
        let h = variance(&heating_displacements(&exp, tp, n, 5));
        let p = exp.particle;
        let want = heating_variance(tp, r, p.gamma_heat, p.mass, exp.optical.omega_u_eff, exp.paul.omega_p);
        assert!((h / want - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "r = {r}: {h} vs {want}");
        slopes.push(h / tp);
    }
    let ratio = slopes[1] / slopes[0];
    let want = (24.3f64 / 8.8).powi(2);
    assert!((ratio / want - 1.0).abs() < 0.1, "{ratio} vs {want}");
}

#[test]
fn micromotion_heating_matches_floquet_model() {
    let n = 4000;
    for r in [8.8, 24.3] {
        let exp = Experiment::paper(r).unwrap();
        let tp = exp.paul.secular_period();
        let h = variance(&heating_displacements(&exp, tp, n, 6));
        let p = exp.particle;
        let want = model_for(&exp.paul, 8).unwrap().heating_variance(tp, p.gamma, p.t_bath, p.mass);
        assert!((h / want - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "r = {r}: {h} vs {want}");
    }
}

#[test]
fn large_ratio_expands_by_about_r() {
    let exp = noiseless(Experiment::paper(24.3).unwrap());
    let tp = exp.paul.secular_period();
    let stats = &run_ensemble(&[tp / 4.0], &exp, &ideal(500, 8)).unwrap()[0];
    let du0 = exp.init.du0(exp.particle.mass, &exp.optical);
    let scale = stats.du / (0.85 * 24.3 * du0);
    assert!((0.5..2.5).contains(&scale), "{scale}");
}

/// Relative amplitude of the drive tone in `Δu²(t_d)` over `ts`, after
/// removing a quadratic trend.
fn drive_line(ts: &[f64], ys: &[f64], omega: f64) -> f64 {
    let t0 = ts[0];
    let span = ts[ts.len() - 1] - t0;
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
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    2.0 * (re * re + im * im).sqrt() / ys.len() as f64 / mean
}

#[test]
fn micromotion_signature_washes_out_with_random_drive_phase() {
    let exp = noiseless(Experiment::paper(8.8).unwrap());
    let t_rf = exp.paul.rf_period();
    let start = exp.paul.secular_period() / 8.0;
    let ts: Vec<f64> = (0..64).map(|k| start + k as f64 * t_rf / 32.0).collect();
    let line = |randomize: bool| {
        let mut cfg = ideal(400, 12);
        cfg.schedule.randomize_rf_phase = randomize;
        let ys: Vec<f64> = run_ensemble(&ts, &exp, &cfg).unwrap().iter().map(var_u).collect();
        drive_line(&ts, &ys, exp.paul.omega_rf)
    };
    let (locked, random) = (line(false), line(true));
    assert!(locked > 5.0 * random, "locked {locked}, random {random}");
}
