use std::io::Read;

use super::DspError;
use crate::dynamics::Trajectory;

/// Two-channel position record as produced by the quadrant detector.
///
/// Sample `k` is stamped `t0 + k·dt` on the acquisition clock.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorRecord {
    pub dt: f64,
    pub t0: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// m/V; unity when the channels are already in metres.
    pub gain_x: f64,
    pub gain_y: f64,
    /// White noise variance per sample and channel, m².
    pub noise_var: f64,
}

impl DetectorRecord {
    pub fn new(dt: f64, t0: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self, DspError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DspError::InvalidInput(format!("dt = {dt}")));
        }
        if x.len() != y.len() {
            return Err(DspError::InvalidInput(format!(
                "channel lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        Ok(Self {
            dt,
            t0,
            x,
            y,
            gain_x: 1.0,
            gain_y: 1.0,
            noise_var: 0.0,
        })
    }

    /// What the detector sees of a simulated shot: the optical-phase
    /// positions after recapture, stamped on the acquisition clock, which
    /// runs `trigger_delay + fixed_delay` ahead of the protocol clock.
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let start = traj.recapture_index.min(traj.samples.len());
        let offset = traj.trigger_delay + traj.fixed_delay;
        let (x, y) = traj.samples[start..].iter().map(|s| (s[0], s[1])).unzip();
        Self {
            dt: traj.dt,
            t0: traj.time(start) + offset,
            x,
            y,
            gain_x: 1.0,
            gain_y: 1.0,
            noise_var: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Channels converted to metres with the stored gains.
    pub fn in_metres(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.x.iter().map(|v| v * self.gain_x).collect(),
            self.y.iter().map(|v| v * self.gain_y).collect(),
        )
    }

    /// Reads the trajectory export format (`t_s,x_m,y_m,vx_m_s,vy_m_s`).
    /// Velocities are ignored; the time column must be uniform.
    pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Self, DspError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let expected = ["t_s", "x_m", "y_m", "vx_m_s", "vy_m_s"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(DspError::InvalidInput(format!(
                "unexpected header {:?}",
                headers
            )));
        }
        let mut t = Vec::new();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64, DspError> {
                rec[i].trim().parse::<f64>().map_err(|e| {
                    DspError::InvalidInput(format!("row {}: column {}: {e}", line + 2, expected[i]))
                })
            };
            t.push(field(0)?);
            x.push(field(1)?);
            y.push(field(2)?);
        }
        if t.len() < 2 {
            return Err(DspError::InvalidInput("need at least two samples".into()));
        }
        let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        for w in t.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
                return Err(DspError::InvalidInput("time column is not uniform".into()));
            }
        }
        Self::new(dt, t[0], x, y)
    }
}
