//! Acceptance checks, one function per criterion. Each returns a [`Check`]
//! with the measured value, the tolerance and the wall time.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use darkjump_core::analytic::{
    coherent_variance, heating_variance, total_variance_simple, SimpleModel,
};
use darkjump_core::dsp::{variance, PipelineConfig, PAPER_NOISE_VAR};
use darkjump_core::dynamics::{
    run_ensemble, Detection, EnsembleConfig, EnsembleStats, Experiment, ProtocolSchedule,
};
use darkjump_core::floquet::{
    beta_from_monodromy, model_for, FloquetSolution, FullModel, MONODROMY_STEPS,
};
use darkjump_core::phys::{PaulTrap, DEFAULT_DENSITY, HBAR, PAPER_RATIOS, PAPER_T_COM};

use crate::commands::cmd_ensemble;
use crate::config::ExperimentConfig;

const NM: f64 = 1e9;
const SEED: u64 = 20_240_917;

#[derive(Debug, Clone)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub value: String,
    pub tolerance: String,
    /// The numerical condition alone.
    pub within: bool,
    pub seconds: f64,
    pub budget: f64,
    pub note: Option<String>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.within && self.seconds <= self.budget
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} (tolerance {}) in {:.2} s of {:.0} s",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.value,
            self.tolerance,
            self.seconds,
            self.budget
        )?;
        if let Some(n) = &self.note {
            write!(f, "\n       note: {n}")?;
        }
        Ok(())
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Self(Instant::now())
    }

    fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

fn paper(r: f64) -> Experiment {
    Experiment::paper(r).expect("paper operating point is valid")
}

fn pseudo(mut exp: Experiment) -> Experiment {
    exp.paul = PaulTrap::pseudo_potential(exp.paul.omega_rf, exp.paul.omega_p)
        .expect("pseudo-potential trap is valid");
    exp
}

fn without_bath(mut exp: Experiment) -> Experiment {
    exp.particle = exp.particle.without_bath();
    exp
}

fn ideal(n: usize, seed: u64) -> EnsembleConfig {
    EnsembleConfig::new(n, seed, ProtocolSchedule::default().without_delays(), Detection::Ideal)
}

fn pipeline(n: usize, seed: u64, p: PipelineConfig) -> EnsembleConfig {
    EnsembleConfig::new(n, seed, ProtocolSchedule::default(), Detection::Pipeline(p))
}

fn spreads(exp: &Experiment) -> (f64, f64) {
    let m = exp.particle.mass;
    (exp.init.du0(m, &exp.optical), exp.init.dv0(m))
}

fn full_total(model: &FullModel, exp: &Experiment, t: f64) -> f64 {
    let (du0, dv0) = spreads(exp);
    let p = exp.particle;
    model.coherent_variance(t, du0, dv0) + model.heating_variance(t, p.gamma, p.t_bath, p.mass)
}

fn one(t_d: f64, exp: &Experiment, cfg: &EnsembleConfig) -> Result<EnsembleStats> {
    Ok(run_ensemble(&[t_d], exp, cfg)?.remove(0))
}

/// 1. Full model with `q_u = 0` against the closed forms over two secular
/// periods.
pub fn criterion_1() -> Result<Check> {
    let timer = Timer::start();
    let mut worst: f64 = 0.0;
    for r in PAPER_RATIOS {
        let exp = pseudo(paper(r));
        let model = model_for(&exp.paul, 8)?;
        let (du0, dv0) = spreads(&exp);
        let p = exp.particle;
        let (wo, wp) = (exp.optical.omega_u_eff, exp.paul.omega_p);
        for k in 0..=400 {
            let t = 2.0 * exp.paul.secular_period() * k as f64 / 400.0;
            let c = coherent_variance(t, du0, dv0, wo, wp);
            let h = heating_variance(t, r, p.gamma_heat, p.mass, wo, wp);
            let fc = model.coherent_variance(t, du0, dv0);
            let fh = model.heating_variance(t, p.gamma, p.t_bath, p.mass);
            worst = worst.max((fc / c - 1.0).abs());
            worst = worst.max(if h == 0.0 { fh.abs() } else { (fh / h - 1.0).abs() });
        }
    }
    Ok(Check {
        id: 1,
        name: "pseudo-potential limit",
        value: format!("max relative error {worst:.2e}"),
        tolerance: "< 1e-10".into(),
        within: worst < 1e-10,
        seconds: timer.secs(),
        budget: 1.0,
        note: None,
    })
}

/// Largest ODE residual and Wronskian drift of `sol` over one drive period.
pub fn mathieu_residuals(sol: &FloquetSolution) -> (f64, f64) {
    let (mut res, mut drift): (f64, f64) = (0.0, 0.0);
    for k in 0..=1000 {
        let tau = k as f64 * PI / 1000.0;
        let (r1, r2) = sol.ode_residual(tau);
        res = res.max(r1.abs()).max(r2.abs());
        drift = drift.max((sol.local_wronskian(tau) / sol.wronskian - 1.0).abs());
    }
    (res, drift)
}

/// 2. Floquet solutions at the three paper points: residual, Wronskian and
/// β against the monodromy matrix.
pub fn criterion_2() -> Result<Check> {
    let timer = Timer::start();
    let (mut res, mut drift, mut dbeta): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for r in PAPER_RATIOS {
        let paul = paper(r).paul;
        let model = model_for(&paul, 8)?;
        let (a, b) = mathieu_residuals(&model.sol);
        res = res.max(a);
        drift = drift.max(b);
        let oracle = beta_from_monodromy(paul.a_u, paul.q_u, MONODROMY_STEPS)?;
        dbeta = dbeta.max((oracle - paul.beta).abs());
    }
    Ok(Check {
        id: 2,
        name: "Mathieu correctness",
        value: format!("residual {res:.2e}, Wronskian drift {drift:.2e}, |Δβ| {dbeta:.2e}"),
        tolerance: "each < 1e-8".into(),
        within: res < 1e-8 && drift < 1e-8 && dbeta < 1e-8,
        seconds: timer.secs(),
        budget: 5.0,
        note: None,
    })
}

/// 3. Noiseless ensemble (γ = 0) against the coherent full model over one
/// secular period at r = 14.5.
pub fn criterion_3() -> Result<Check> {
    let timer = Timer::start();
    let n = 2000;
    let exp = without_bath(paper(14.5));
    let model = model_for(&exp.paul, 8)?;
    let tp = exp.paul.secular_period();
    let t_ds: Vec<f64> = (0..16).map(|k| tp * k as f64 / 15.0).collect();
    let (du0, dv0) = spreads(&exp);
    let mut worst: f64 = 0.0;
    for s in run_ensemble(&t_ds, &exp, &ideal(n, SEED))? {
        let want = model.coherent_variance(s.t_d, du0, dv0).sqrt();
        worst = worst.max((s.du / want - 1.0).abs());
    }
    let tol = 4.0 / (2.0 * n as f64).sqrt();
    Ok(Check {
        id: 3,
        name: "Monte Carlo vs coherent model",
        value: format!("max |Δu_mc/Δu_model − 1| = {worst:.4} over 16 t_d"),
        tolerance: format!("< 4/√(2n) = {tol:.4}"),
        within: worst < tol,
        seconds: timer.secs(),
        budget: 120.0,
        note: None,
    })
}

/// Heating-only displacements: identical shots with and without the gas.
fn heating_displacements(exp: &Experiment, t_d: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let cfg = ideal(n, seed);
    let hot = one(t_d, exp, &cfg)?;
    let cold = one(t_d, &without_bath(*exp), &cfg)?;
    anyhow::ensure!(hot.excluded + cold.excluded == 0, "shots lost in the heating check");
    Ok(hot.u_values().iter().zip(cold.u_values()).map(|(a, b)| a - b).collect())
}

/// 4. Heating law, with the analytic side's Γ scaled by `gamma_scale`
/// (1 for the real check). The simulated particle keeps its own Γ.
pub fn criterion_4_with(gamma_scale: f64) -> Result<Check> {
    let timer = Timer::start();
    let exp = pseudo(paper(14.5));
    let p = exp.particle;
    let (wo, r) = (exp.optical.omega_u_eff, 14.5);
    let half = exp.paul.secular_period() / 2.0;
    let (du0, _) = spreads(&exp);
    let gamma_heat = p.gamma_heat * gamma_scale;
    let expected = (du0 * du0 + r * r * HBAR * gamma_heat / (p.mass * wo) * half).sqrt();
    let model = SimpleModel::new(&exp.optical, &exp.paul, p.mass, gamma_heat);
    let (_, dv0) = spreads(&exp);
    let closed = total_variance_simple(half, du0, dv0, &model).sqrt();
    anyhow::ensure!((closed / expected - 1.0).abs() < 1e-9, "closed form disagrees with Eq. 4 at T_p/2");

    let n = 2000;
    let mc = one(half, &exp, &ideal(n, SEED))?;
    let dev = (mc.du - expected).abs() / mc.bootstrap_err;

    let n_pair = 4000;
    let mut slopes = Vec::new();
    for r in [8.8, 24.3] {
        let e = pseudo(paper(r));
        let tp = e.paul.secular_period();
        slopes.push(variance(&heating_displacements(&e, tp, n_pair, SEED + 1)?) / tp);
    }
    let ratio = slopes[1] / slopes[0];
    let want = (24.3f64 / 8.8).powi(2);
    let ratio_err = (ratio / want - 1.0).abs();
    Ok(Check {
        id: 4,
        name: "heating law",
        value: format!(
            "Δu(T_p/2) = {:.3} ± {:.3} nm vs {:.3} nm ({dev:.2}σ); slope ratio {ratio:.3} vs {want:.3} ({:.1}%)",
            mc.du * NM,
            mc.bootstrap_err * NM,
            expected * NM,
            100.0 * ratio_err
        ),
        tolerance: "≤ 3σ; ratio within 10%".into(),
        within: dev <= 3.0 && ratio_err < 0.1,
        seconds: timer.secs(),
        budget: 180.0,
        note: Some("Monte Carlo in the pseudo-potential trap (q_u = 0, a_u = β²), where Eq. 4 is exact".into()),
    })
}

pub fn criterion_4() -> Result<Check> {
    criterion_4_with(1.0)
}

/// 5. Expansion factor at r = 24.3 through the noisy pipeline.
pub fn criterion_5() -> Result<Check> {
    let timer = Timer::start();
    let exp = paper(24.3);
    let tp = exp.paul.secular_period();
    let t_ds: Vec<f64> = (0..=12).map(|k| tp * k as f64 / 24.0).collect();
    let stats = run_ensemble(&t_ds, &exp, &pipeline(500, SEED, PipelineConfig::default()))?;
    let du0 = stats[0].du;
    let (best, at) = stats
        .iter()
        .map(|s| (s.du, s.t_d))
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let factor = best / du0;
    Ok(Check {
        id: 5,
        name: "expansion factor",
        value: format!(
            "{factor:.1} (Δu {:.1} nm at t_d = {:.0} µs over Δu(0) = {:.2} nm)",
            best * NM,
            at * 1e6,
            du0 * NM
        ),
        tolerance: "≥ 20".into(),
        within: factor >= 20.0,
        seconds: timer.secs(),
        budget: 120.0,
        note: None,
    })
}

/// 6. Peak of the full model over the peak of the simplified model at
/// r = 8.8.
pub fn criterion_6() -> Result<Check> {
    let timer = Timer::start();
    let exp = paper(8.8);
    let p = exp.particle;
    let model = model_for(&exp.paul, 8)?;
    let simple = SimpleModel::new(&exp.optical, &exp.paul, p.mass, p.gamma_heat);
    let (du0, dv0) = spreads(&exp);
    let tp = exp.paul.secular_period();
    let (mut pf, mut ps): (f64, f64) = (0.0, 0.0);
    for k in 0..=4000 {
        let t = tp * k as f64 / 4000.0;
        pf = pf.max(full_total(&model, &exp, t));
        ps = ps.max(total_variance_simple(t, du0, dv0, &simple));
    }
    let ratio = (pf / ps).sqrt();
    Ok(Check {
        id: 6,
        name: "micromotion doubling",
        value: format!("peak ratio {ratio:.3} ({:.1} nm / {:.1} nm)", pf.sqrt() * NM, ps.sqrt() * NM),
        tolerance: "in [1.3, 2.2]".into(),
        within: (1.3..=2.2).contains(&ratio),
        seconds: timer.secs(),
        budget: 1.0,
        note: Some(format!("release at drive phase {:.4} rad", exp.paul.rf_phase0)),
    })
}

/// The dark time at which the full model predicts `target` (m), searched
/// between a quarter and half a secular period.
fn t_d_for_size(exp: &Experiment, model: &FullModel, target: f64) -> f64 {
    let tp = exp.paul.secular_period();
    let (mut lo, mut hi) = (0.25 * tp, 0.5 * tp);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if full_total(model, exp, mid).sqrt() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// 7. Pipeline against the simulator: noiseless per-shot accuracy, noise
/// floor, and the noise-subtracted size.
pub fn criterion_7() -> Result<Check> {
    let timer = Timer::start();
    let exp0 = without_bath(paper(14.5));
    let tp = exp0.paul.secular_period();
    let w = exp0.optical.omega_u_eff;
    let t_ds = [0.0, tp / 8.0, tp / 4.0, 3.0 * tp / 8.0];
    let mut worst: f64 = 0.0;
    for s in run_ensemble(&t_ds, &exp0, &pipeline(200, SEED, PipelineConfig::default().noiseless()))? {
        for (pt, &(u, u_dot)) in s.points.iter().zip(&s.truth) {
            let radius = u.hypot(u_dot / w);
            let err = (pt.u - u).abs().max((pt.u_dot - u_dot).abs() / w);
            worst = worst.max(err / radius);
        }
    }

    let exp = paper(14.5);
    let model = model_for(&exp.paul, 8)?;
    let t_d = t_d_for_size(&exp, &model, 5e-9);
    let s = one(t_d, &exp, &pipeline(2000, SEED, PipelineConfig::default()))?;
    let floor_err = (s.noise_var / PAPER_NOISE_VAR - 1.0).abs();
    let truth: Vec<f64> = s.truth.iter().map(|t| t.0).collect();
    let du_truth = variance(&truth).sqrt();
    let bias = s.du / du_truth - 1.0;
    let raw_bias = s.raw_var_u.sqrt() / du_truth - 1.0;
    Ok(Check {
        id: 7,
        name: "pipeline ground truth",
        value: format!(
            "noiseless max error {:.3}%; floor {:.3} nm² ({:.1}%); Δu {:.3} vs {:.3} nm ({:+.2}%, {:+.2}% without subtraction)",
            100.0 * worst,
            s.noise_var * 1e18,
            100.0 * floor_err,
            s.du * NM,
            du_truth * NM,
            100.0 * bias,
            100.0 * raw_bias
        ),
        tolerance: "2%; 15%; 2%".into(),
        within: worst < 0.02 && floor_err < 0.15 && bias.abs() < 0.02,
        seconds: timer.secs(),
        budget: 60.0,
        note: Some(format!(
            "noiseless part with γ = 0; noisy part at t_d = {:.1} µs where the model gives 5 nm, n = 2000",
            t_d * 1e6
        )),
    })
}

/// 8. Initial state size at the paper temperature, through the pipeline.
pub fn criterion_8() -> Result<Check> {
    let timer = Timer::start();
    let exp = paper(14.5);
    let s = one(0.0, &exp, &pipeline(500, SEED, PipelineConfig::default()))?;
    let target = 1.5e-9;
    let reported = 0.1e-9;
    let tol = s.bootstrap_err.hypot(reported);
    let (du0, _) = spreads(&exp);
    // Δu₀ ∝ 1/sqrt(m T): what would bring the model to 1.5 nm.
    let scale = (du0 / target).powi(2);
    Ok(Check {
        id: 8,
        name: "initial-state consistency",
        value: format!(
            "Δu(0) = {:.3} ± {:.3} nm (model {:.3} nm) vs 1.5 ± 0.1 nm",
            s.du * NM,
            s.bootstrap_err * NM,
            du0 * NM
        ),
        tolerance: format!("|Δ| ≤ {:.3} nm", tol * NM),
        within: (s.du - target).abs() <= tol,
        seconds: timer.secs(),
        budget: 60.0,
        note: Some(format!(
            "mass {:.3e} kg (density {DEFAULT_DENSITY} kg/m³); 1.5 nm needs {:.2}× the mass \
             (density ≈ {:.0} kg/m³) or T_CoM ≈ {:.0} mK at this mass",
            exp.particle.mass,
            scale,
            DEFAULT_DENSITY * scale,
            PAPER_T_COM / scale * 1e3
        )),
    })
}

fn scratch_dir(tag: &str) -> PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    std::env::temp_dir().join(format!(
        "darkjump-{tag}-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ))
}

/// 9. Two `ensemble` runs with the same seed write identical bytes.
pub fn criterion_9() -> Result<Check> {
    let timer = Timer::start();
    let mut cfg = ExperimentConfig::default();
    cfg.n_shots = 100;
    cfg.base_seed = 9;
    cfg.sweep.t_d_stop = 60e-6;
    cfg.sweep.t_d_step = 20e-6;
    let (a, b) = (scratch_dir("a"), scratch_dir("b"));
    let run = || -> Result<(usize, bool)> {
        let fa = cmd_ensemble(&cfg, &a)?.files;
        let fb = cmd_ensemble(&cfg, &b)?.files;
        let mut same = fa.len() == fb.len();
        for (x, y) in fa.iter().zip(&fb) {
            let bx = std::fs::read(x).with_context(|| x.display().to_string())?;
            let by = std::fs::read(y).with_context(|| y.display().to_string())?;
            same &= bx == by && x.strip_prefix(&a).ok() == y.strip_prefix(&b).ok();
        }
        Ok((fa.len(), same))
    };
    let result = run();
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
    let (files, same) = result?;
    Ok(Check {
        id: 9,
        name: "determinism",
        value: format!("{files} files, {}", if same { "byte-identical" } else { "differ" }),
        tolerance: "identical".into(),
        within: same,
        seconds: timer.secs(),
        budget: 60.0,
        note: None,
    })
}

pub type Criterion = fn() -> Result<Check>;

pub const CRITERIA: [Criterion; 9] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
];

/// Runs every criterion; an error inside one is reported as its failure.
pub fn run_all() -> Vec<Check> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let timer = Timer::start();
            c().unwrap_or_else(|e| Check {
                id: i as u8 + 1,
                name: "error",
                value: format!("{e:#}"),
                tolerance: "-".into(),
                within: false,
                seconds: timer.secs(),
                budget: f64::INFINITY,
                note: None,
            })
        })
        .collect()
}
