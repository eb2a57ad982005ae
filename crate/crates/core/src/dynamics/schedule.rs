use super::DynamicsError;

/// Timing of one repetition of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSchedule {
    /// Optical record before release, s.
    pub t_pre: f64,
    /// Dark evolution in the Paul trap, s.
    pub t_d: f64,
    /// Record after recapture, s.
    pub t_post: f64,
    /// Upper end of the uniform per-shot trigger offset, s.
    pub trigger_jitter: f64,
    /// Constant acquisition delay (AOM response plus the unexplained part), s.
    pub fixed_delay: f64,
    /// Drive phase at release; `None` keeps the trap's own `rf_phase0`.
    pub rf_phase0: Option<f64>,
    /// Draw the release phase uniformly per shot instead.
    pub randomize_rf_phase: bool,
}

pub const AOM_DELAY: f64 = 0.6e-6;
pub const UNEXPLAINED_DELAY: f64 = 0.9e-6;
pub const DEFAULT_TRIGGER_JITTER: f64 = 2e-6;
pub const DEFAULT_T_POST: f64 = 1e-3;

impl Default for ProtocolSchedule {
    fn default() -> Self {
        Self {
            t_pre: 0.0,
            t_d: 0.0,
            t_post: DEFAULT_T_POST,
            trigger_jitter: DEFAULT_TRIGGER_JITTER,
            fixed_delay: AOM_DELAY + UNEXPLAINED_DELAY,
            rf_phase0: None,
            randomize_rf_phase: false,
        }
    }
}

impl ProtocolSchedule {
    pub fn with_t_d(mut self, t_d: f64) -> Self {
        self.t_d = t_d;
        self
    }

    /// No acquisition delays at all.
    pub fn without_delays(mut self) -> Self {
        self.trigger_jitter = 0.0;
        self.fixed_delay = 0.0;
        self
    }

    pub fn total_duration(&self) -> f64 {
        self.t_pre + self.t_d + self.t_post
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (name, v) in [
            ("t_pre", self.t_pre),
            ("t_d", self.t_d),
            ("t_post", self.t_post),
            ("trigger_jitter", self.trigger_jitter),
            ("fixed_delay", self.fixed_delay),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DynamicsError::InvalidSchedule(format!(
                    "{name} must be a non-negative duration, got {v}"
                )));
            }
        }
        if let Some(p) = self.rf_phase0 {
            if !p.is_finite() {
                return Err(DynamicsError::InvalidSchedule(format!("rf_phase0 = {p}")));
            }
        }
        Ok(())
    }
}
