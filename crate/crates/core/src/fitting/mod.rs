//! Fitting mechanism parameters to target gaits.

pub mod constraints;
pub mod design;
pub mod optimizer;
pub mod residual;
pub mod stage;

use thiserror::Error;

use crate::linkage::{SolveError, ValidationError};

pub use constraints::{evaluate_constraints, ConstraintValues};
pub use design::{DesignVector, Stage};
pub use optimizer::{OptimizerSettings, Problem, StartResult};
pub use residual::{cost, mechanism_residuals, penalized_residuals, residuals, ResidualVector};
pub use stage::{optimize_armwing, optimize_stage, FitOptions, FitReport, StageOrder, StageProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("residual vector is empty")]
    EmptyResidual,
    #[error("phase grids differ: {simulated} simulated samples vs {targets} target samples")]
    GridMismatch { simulated: usize, targets: usize },
    #[error("no target series for output `{0}`")]
    UnknownTarget(String),
    #[error("{stage} stage: no multistart reached a feasible design")]
    NoFeasibleStart { stage: Stage },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("{stage} stage: {source}")]
    InStage { stage: Stage, source: Box<FitError> },
}

impl FitError {
    pub fn kind(&self) -> &'static str {
        match self {
            FitError::EmptyResidual => "EmptyResidual",
            FitError::GridMismatch { .. } => "GridMismatch",
            FitError::UnknownTarget(_) => "UnknownTarget",
            FitError::NoFeasibleStart { .. } => "NoFeasibleStart",
            FitError::Solve(e) => e.kind(),
            FitError::Validation(e) => e.kind(),
            FitError::InStage { source, .. } => source.kind(),
        }
    }

    pub(crate) fn in_stage(self, stage: Stage) -> FitError {
        match self {
            e @ (FitError::NoFeasibleStart { .. } | FitError::InStage { .. }) => e,
            e => FitError::InStage { stage, source: Box::new(e) },
        }
    }
}
