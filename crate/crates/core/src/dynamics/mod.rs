//! Stochastic trajectories of the protocol: thermal initialization in the
//! optical trap, dark evolution in the Paul trap, recapture. Ensembles run
//! each shot through the detection pipeline.

mod ensemble;
mod integrator;
mod protocol;
mod schedule;

pub use ensemble::{run_ensemble, shot_seed, Detection, EnsembleConfig, EnsembleStats};
pub use integrator::{step_langevin, Potential};
pub use protocol::{run_protocol, sample_initial_state, Experiment, SimulationSettings, Trajectory};
pub use schedule::{
    ProtocolSchedule, AOM_DELAY, DEFAULT_TRIGGER_JITTER, DEFAULT_T_POST, UNEXPLAINED_DELAY,
};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("particle lost at t = {t:e} s with u = {u:e} m")]
    RecaptureFailure { t: f64, u: f64 },
    #[error("ensemble needs at least two shots, got {0}")]
    TooFewShots(usize),
}
