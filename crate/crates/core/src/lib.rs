//! Simulation and analysis of frequency-jump state expansion for a charged
//! nanoparticle handed between an optical tweezer and a linear Paul trap.
//!
//! * [`phys`]: constants, units, particle and trap parameters.
//! * [`analytic`]: closed-form state-size model and the xy → uv covariance
//!   rotation.
//! * [`floquet`]: Mathieu/Floquet model including micromotion.
//! * [`dynamics`]: Langevin trajectories of the full protocol and ensembles.
//! * [`dsp`]: detector-record processing: calibration, retrodiction, delay
//!   correction, noise floor and bootstrap statistics.

pub mod analytic;
pub mod dsp;
pub mod dynamics;
pub mod floquet;
pub mod phys;
