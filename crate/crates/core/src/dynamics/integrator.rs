use rand::Rng;
use rand_distr::StandardNormal;

use crate::phys::{OpticalTrap, PaulTrap};

/// Restoring force per unit mass acting on the in-plane coordinates.
#[derive(Debug, Clone, Copy)]
pub enum Potential {
    /// Harmonic along the optical axes x and y.
    Optical { wx2: f64, wy2: f64 },
    /// Independent Mathieu oscillators along u and v. The drive enters as
    /// `cos(Ω t + φ)` with t measured from release.
    Paul {
        omega_rf: f64,
        phase: f64,
        a_u: f64,
        q_u: f64,
        a_v: f64,
        q_v: f64,
    },
}

impl Potential {
    pub fn optical(trap: &OpticalTrap) -> Self {
        Self::Optical {
            wx2: trap.omega_x * trap.omega_x,
            wy2: trap.omega_y * trap.omega_y,
        }
    }

    pub fn paul(trap: &PaulTrap, phase: f64) -> Self {
        Self::Paul {
            omega_rf: trap.omega_rf,
            phase,
            a_u: trap.a_u,
            q_u: trap.q_u,
            a_v: trap.a_v,
            q_v: trap.q_v,
        }
    }

    /// Acceleration `(ẍ, ÿ)` at position `(x, y)` and time `t`.
    #[inline]
    pub fn accel(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        match *self {
            Potential::Optical { wx2, wy2 } => (-wx2 * x, -wy2 * y),
            Potential::Paul {
                omega_rf,
                phase,
                a_u,
                q_u,
                a_v,
                q_v,
            } => {
                let k = std::f64::consts::FRAC_1_SQRT_2;
                let (u, v) = (k * (x + y), k * (x - y));
                let drive = (omega_rf * t + phase).cos();
                let scale = 0.25 * omega_rf * omega_rf;
                let au = -scale * (a_u - 2.0 * q_u * drive) * u;
                let av = -scale * (a_v - 2.0 * q_v * drive) * v;
                (k * (au + av), k * (au - av))
            }
        }
    }
}

/// One step of `ẍ = F(x, t) − γẋ + sqrt(D) ξ(t)` on the state `(x, y, ẋ, ẏ)`,
/// with `D = 2γk_BT/m`: the semi-implicit Euler–Maruyama update with its
/// force kick split into two halves around the drift, so that positions and
/// velocities refer to the same instant. No random numbers are drawn when
/// `diffusion == 0`.
#[inline]
pub fn step_langevin<R: Rng + ?Sized>(
    state: &mut [f64; 4],
    t: f64,
    dt: f64,
    potential: &Potential,
    gamma: f64,
    diffusion: f64,
    rng: &mut R,
) {
    let half = 0.5 * dt;
    let (ax, ay) = potential.accel(state[0], state[1], t);
    state[2] += half * ax - gamma * state[2] * dt;
    state[3] += half * ay - gamma * state[3] * dt;
    if diffusion > 0.0 {
        let kick = (diffusion * dt).sqrt();
        let (nx, ny): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        state[2] += kick * nx;
        state[3] += kick * ny;
    }
    state[0] += state[2] * dt;
    state[1] += state[3] * dt;
    let (ax, ay) = potential.accel(state[0], state[1], t + dt);
    state[2] += half * ax;
    state[3] += half * ay;
}
