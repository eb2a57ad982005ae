use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use darkjump_core::analytic::{total_variance_simple, SimpleModel};
use darkjump_core::dynamics::{run_ensemble, Detection, EnsembleConfig, Experiment};
use darkjump_core::floquet::{model_for, FullModel};

use crate::config::ExperimentConfig;
use crate::output::{points_csv, provenance, sweep_csv, write_file, SweepRow};

pub const ANALYTIC_FILE: &str = "analytic.csv";
pub const ENSEMBLE_FILE: &str = "ensemble.csv";
pub const POINTS_DIR: &str = "points";

struct Models {
    simple: Option<SimpleModel>,
    full: Option<FullModel>,
    du0: f64,
    dv0: f64,
    exp: Experiment,
}

impl Models {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let exp = cfg.experiment()?;
        let p = exp.particle;
        let simple = cfg
            .models
            .simple
            .then(|| SimpleModel::new(&exp.optical, &exp.paul, p.mass, p.gamma_heat));
        let full = if cfg.models.full {
            Some(model_for(&exp.paul, cfg.models.n_max).context("full model")?)
        } else {
            None
        };
        Ok(Self {
            simple,
            full,
            du0: exp.init.du0(p.mass, &exp.optical),
            dv0: exp.init.dv0(p.mass),
            exp,
        })
    }

    fn row(&self, t_d: f64) -> SweepRow {
        let p = self.exp.particle;
        SweepRow {
            t_d,
            du_simple: self
                .simple
                .as_ref()
                .map(|m| total_variance_simple(t_d, self.du0, self.dv0, m).sqrt()),
            du_full: self.full.as_ref().map(|m| {
                (m.coherent_variance(t_d, self.du0, self.dv0)
                    + m.heating_variance(t_d, p.gamma, p.t_bath, p.mass))
                .sqrt()
            }),
            du_heating_simple: self.simple.as_ref().map(|m| m.heating(t_d).sqrt()),
            ..SweepRow::default()
        }
    }
}

/// Simplified and full model curves over the sweep.
pub fn analytic_rows(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let models = Models::new(cfg)?;
    Ok(cfg.t_d_values().into_iter().map(|t| models.row(t)).collect())
}

pub fn cmd_analytic(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let rows = analytic_rows(cfg)?;
    let mut flags = cfg.models.clone();
    flags.montecarlo = false;
    let header = provenance("analytic", &cfg.hash(), cfg.base_seed, &[]);
    let path = out.join(ANALYTIC_FILE);
    write_file(&path, &sweep_csv(&header, &rows, &flags))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct EnsembleOutput {
    pub rows: Vec<SweepRow>,
    /// Aggregate file first, then one point file per sweep value.
    pub files: Vec<PathBuf>,
}

/// Monte Carlo through the detection pipeline at every sweep value, with
/// the analytic columns alongside.
pub fn cmd_ensemble(cfg: &ExperimentConfig, out: &Path) -> Result<EnsembleOutput> {
    if !cfg.models.montecarlo {
        bail!("models.montecarlo is off; use `analytic` for model curves only");
    }
    let models = Models::new(cfg)?;
    let t_ds = cfg.t_d_values();
    let ens = EnsembleConfig::new(
        cfg.n_shots,
        cfg.base_seed,
        cfg.schedule(),
        Detection::Pipeline(cfg.pipeline_config()),
    );
    let stats = run_ensemble(&t_ds, &models.exp, &ens)?;

    let hash = cfg.hash();
    let omega_o = models.exp.optical.omega_u_eff;
    let mut rows = Vec::with_capacity(stats.len());
    let mut files = vec![out.join(ENSEMBLE_FILE)];
    for (k, s) in stats.iter().enumerate() {
        let lost = s.excluded + s.dsp_failures;
        if lost > 0 {
            eprintln!(
                "t_d = {:.3} µs: {} of {} shots excluded ({} lost, {} unprocessable)",
                s.t_d * 1e6,
                lost,
                s.n_shots,
                s.excluded,
                s.dsp_failures
            );
        }
        rows.push(SweepRow {
            du_mc: Some(s.du),
            du_mc_err: Some(s.bootstrap_err),
            excluded_shots: Some(lost),
            ..models.row(s.t_d)
        });
        let mut extra = vec![
            ("t_d_us", format!("{}", s.t_d * 1e6)),
            ("noise_floor_nm2", format!("{}", s.noise_var * 1e18)),
        ];
        if let Some(f) = s.freqs {
            extra.push(("demod_hz", format!("{} {}", f.omega_x / std::f64::consts::TAU, f.omega_y / std::f64::consts::TAU)));
        }
        let header = provenance("ensemble", &hash, cfg.base_seed, &extra);
        let path = out.join(POINTS_DIR).join(format!("td_{k:03}.csv"));
        write_file(&path, &points_csv(&header, &s.points, omega_o))
            .with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
    }
    let header = provenance(
        "ensemble",
        &hash,
        cfg.base_seed,
        &[("n_shots", cfg.n_shots.to_string())],
    );
    write_file(&files[0], &sweep_csv(&header, &rows, &cfg.models))
        .with_context(|| format!("writing {}", files[0].display()))?;
    Ok(EnsembleOutput { rows, files })
}
