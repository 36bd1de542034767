//! Waiting-time statistics for the next photodetection from a driven,
//! damped resonator dispersively coupled to a qubit.
//!
//! The conditional no-jump state is a qubit-resolved Fock-space amplitude
//! vector; its norm `W(t)` is the probability that no photon has been
//! detected by time `t`.

pub mod closed_form;
pub mod cubic;
pub mod engine;
pub mod error;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod readout;
pub mod sampler;
pub mod special;

pub use closed_form::{
    closed_form_record, mean_jump_time, mean_jump_time_with_cutoff, survival_exact,
    CoherentTrajectory, SurvivalModel,
};
pub use engine::{evolve, propagate, EvolutionSpec, Regime};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use ode::StepControl;
pub use params::{
    initial_state, jump_density, make_params, FockTruncation, NoJumpState, QubitLevel, Source,
    SurvivalPoint, SurvivalRecord, SystemParams,
};
pub use readout::{
    characteristic_roots, evolve_reduced, readout_error, BrightNorm, DriveCoupling,
    EigenvalueSet, ReducedOptions, ReducedState,
};
pub use sampler::{histogram_vs_density, sample_jump_times, FitReport, JumpSampleSet};
