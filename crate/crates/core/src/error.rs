use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::fitting::FitError;
use crate::io::IoError;
use crate::linkage::{SolveError, ValidationError};

/// Any error the toolkit reports, with a stable machine-readable kind.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(e) => e.kind(),
            Error::Solve(e) => e.kind(),
            Error::Fit(e) => e.kind(),
            Error::Analysis(e) => e.kind(),
            Error::Io(e) => e.kind(),
        }
    }

    /// Phase (degrees) at which a solver failure happened, if any.
    pub fn phase_deg(&self) -> Option<f64> {
        let mut fit = match self {
            Error::Solve(e) => return e.phase_deg(),
            Error::Analysis(AnalysisError::Solve(e)) => return e.phase_deg(),
            Error::Fit(e) => e,
            _ => return None,
        };
        loop {
            match fit {
                FitError::Solve(e) => return e.phase_deg(),
                FitError::InStage { source, .. } => fit = source,
                _ => return None,
            }
        }
    }
}
