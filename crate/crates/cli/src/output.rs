//! CSV writers. Values are written in µs and nm with the unit in the column
//! name; every file opens with `#` provenance lines.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use darkjump_core::dsp::RetrodictedPoint;

use crate::config::ModelFlags;

const US: f64 = 1e6;
const NM: f64 = 1e9;

/// One row of a sweep; `None` for models that were not run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepRow {
    /// s
    pub t_d: f64,
    /// m
    pub du_simple: Option<f64>,
    pub du_full: Option<f64>,
    pub du_mc: Option<f64>,
    pub du_mc_err: Option<f64>,
    pub du_heating_simple: Option<f64>,
    /// Shots missing from the Monte Carlo estimate (lost or unprocessable).
    pub excluded_shots: Option<usize>,
}

/// Provenance block: tool version, command, config hash, seed.
pub fn provenance(command: &str, config_hash: &str, seed: u64, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# darkjump {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# command: {command}");
    let _ = writeln!(s, "# config_sha256: {config_hash}");
    let _ = writeln!(s, "# seed: {seed}");
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

fn columns(models: &ModelFlags) -> Vec<&'static str> {
    let mut c = vec!["t_d_us"];
    if models.simple {
        c.push("du_simple_nm");
    }
    if models.full {
        c.push("du_full_nm");
    }
    if models.montecarlo {
        c.extend(["du_mc_nm", "du_mc_err_nm"]);
    }
    if models.simple {
        c.push("du_heating_simple_nm");
    }
    if models.montecarlo {
        c.push("excluded_shots");
    }
    c
}

fn cell(v: Option<f64>, scale: f64) -> String {
    v.map(|x| format!("{}", x * scale)).unwrap_or_default()
}

pub fn sweep_csv(header: &str, rows: &[SweepRow], models: &ModelFlags) -> String {
    let mut out = String::from(header);
    out.push_str(&columns(models).join(","));
    out.push('\n');
    for r in rows {
        let mut f = vec![format!("{}", r.t_d * US)];
        if models.simple {
            f.push(cell(r.du_simple, NM));
        }
        if models.full {
            f.push(cell(r.du_full, NM));
        }
        if models.montecarlo {
            f.push(cell(r.du_mc, NM));
            f.push(cell(r.du_mc_err, NM));
        }
        if models.simple {
            f.push(cell(r.du_heating_simple, NM));
        }
        if models.montecarlo {
            f.push(r.excluded_shots.map(|n| n.to_string()).unwrap_or_default());
        }
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

/// Retrodicted points of one sweep value; velocities are divided by the
/// optical frequency `omega_o` so that both axes are lengths.
pub fn points_csv(header: &str, points: &[RetrodictedPoint], omega_o: f64) -> String {
    let mut out = String::from(header);
    out.push_str("shot,u_nm,u_dot_over_omega_nm,v_nm,v_dot_over_omega_nm,trigger_delay_us\n");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{}",
            p.u * NM,
            p.u_dot / omega_o * NM,
            p.v * NM,
            p.v_dot / omega_o * NM,
            p.trigger_delay * US
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()
}
