//! General planar linkages: specification, validation, pose solving,
//! sweeps and reflection.

pub mod error;
pub mod graph;
pub mod mirror;
pub mod solver;
pub mod spec;
pub mod sweep;

pub use error::{SolveError, ValidationError};
pub use graph::{validate_mechanism, Loop, MechanismGraph, ParameterInfo};
pub use mirror::{bilateral, mirror_mechanism, mirror_spec};
pub use solver::{solve_configuration, Configuration, Pose, MAX_ITERATIONS, SOLVER_TOLERANCE};
pub use spec::LinkageSpec;
pub use sweep::{phase_grid, sweep_gait, GaitTrajectory, SweepMode, MIN_SAMPLES};
