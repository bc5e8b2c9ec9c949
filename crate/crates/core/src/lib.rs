//! Extended high-resolution range profiling for stepped-frequency radar with
//! missing pulses.
//!
//! The pipeline synthesizes (or loads) a target response matrix, builds the
//! linear model `Y = Φh + U` over the pulses that survived, and reconstructs
//! the profile `h` across every coarse range bin of the gate with ℓ1 sparse
//! recovery. Ridge least squares and classical stretch (per-column IDFT)
//! processing are provided as baselines.

pub mod echo;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod radar;
pub mod seed;
pub mod sensing;
pub mod solvers;

pub use echo::{build_trm, random_missing_schedule, synthesize_echo_sample, NoiseModel, PulseSchedule, RangeProfile, Trm};
pub use error::{Error, Result};
pub use radar::{carrier_frequency, pulse_shape_eval, range_axis, PulseKind, PulseShape, RadarConfig, Window};
pub use sensing::{build_sensing_system, projection_row, SensingSystem};
pub use solvers::{
    solve_least_squares, solve_sparse_l1, solve_stretch_idft, EpsilonRule, Method, RecoveryResult, RidgeRule,
    SolverOptions,
};
