//! Parameter sensitivity and hinge material checks.

pub mod material;
pub mod sensitivity;

use thiserror::Error;

use crate::linkage::{SolveError, ValidationError};

pub use material::{
    mooney_rivlin_uniaxial, strain_budget_check, MaterialDb, MaterialSpec, MooneyRivlin, StrainBudget, MATERIALS_ENV,
};
pub use sensitivity::{
    scale_range, sensitivity_rank, sensitivity_sweep, FailureMarker, RankEntry, ScaleOutcome, SensitivityResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("invalid scale factors: {0}")]
    InvalidScales(String),
    #[error("perturbation fraction {0} outside (0, 0.1]")]
    InvalidDelta(f64),
    #[error("mechanism has no point output to track")]
    NoTrackedPoint,
    #[error("stretch ratio must be positive, got {0}")]
    NonPositiveStretch(f64),
    #[error("material `{0}` has no Mooney-Rivlin constants")]
    MissingConstants(String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("material `{name}`: {reason}")]
    InvalidMaterial { name: String, reason: String },
    #[error("material database: {0}")]
    Database(String),
    #[error("{0}")]
    InvalidInput(String),
}

impl AnalysisError {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::Validation(e) => e.kind(),
            AnalysisError::Solve(e) => e.kind(),
            AnalysisError::InvalidScales(_) => "InvalidScales",
            AnalysisError::InvalidDelta(_) => "InvalidDelta",
            AnalysisError::NoTrackedPoint => "NoTrackedPoint",
            AnalysisError::NonPositiveStretch(_) => "NonPositiveStretch",
            AnalysisError::MissingConstants(_) => "MissingConstants",
            AnalysisError::UnknownMaterial(_) => "UnknownMaterial",
            AnalysisError::InvalidMaterial { .. } => "InvalidMaterial",
            AnalysisError::Database(_) => "MaterialDatabase",
            AnalysisError::InvalidInput(_) => "InvalidInput",
        }
    }
}
