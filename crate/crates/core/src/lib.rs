//! Kinematics, gait fitting and sensitivity analysis for gear- and
//! crank-driven planar linkage chains of the kind used in flapping armwings.

pub mod analysis;
pub mod cli;
mod error;
pub mod fitting;
pub mod fourbar;
pub mod gear;
pub mod geom;
pub mod io;
pub mod linkage;
pub mod target;

pub use error::Error;
pub use fourbar::{grashof_classify, solve_fourbar, Branch, FourBar, FourBarError, GrashofClass};
pub use gear::{gear_couple, GearMap, ZeroRatio};
pub use linkage::{
    bilateral, mirror_mechanism, phase_grid, solve_configuration, sweep_gait, validate_mechanism, Configuration,
    GaitTrajectory, LinkageSpec, MechanismGraph, SolveError, SweepMode, ValidationError,
};
pub use target::{sample_targets, target_elbow, target_shoulder, GaitShape, TargetGait};
