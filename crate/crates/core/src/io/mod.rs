//! Mechanism files, trajectory CSV and SVG plots.

pub mod mechanism_file;
pub mod svg;
pub mod trajectory_csv;

use std::path::Path;

use thiserror::Error;

pub use mechanism_file::{mechanism_to_string, parse_mechanism_file, parse_mechanism_str, write_mechanism_file};
pub use svg::{render_svg, sensitivity_plot, write_svg, PlotSpec, Series, SeriesStyle};
pub use trajectory_csv::{
    parse_trajectory_csv, read_trajectory_csv, rows_csv_string, targets_csv_string, targets_from_rows, trajectory_csv_string,
    write_targets_csv, write_trajectory_csv, TrajectoryRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported format_version {found} (expected {expected})")]
    Version { found: String, expected: u32 },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error("nothing to plot: {0}")]
    EmptyPlot(String),
    #[error("series `{series}` has {found} samples, expected {expected}")]
    GridMismatch { series: String, expected: usize, found: usize },
    #[error("{path}: {message}")]
    File { path: String, message: String },
}

impl IoError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> IoError {
        IoError::File { path: path.display().to_string(), message: e.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            IoError::Syntax { .. } => "SyntaxError",
            IoError::Schema { .. } => "SchemaError",
            IoError::Version { .. } => "VersionError",
            IoError::Csv { .. } => "CsvError",
            IoError::EmptyTrajectory => "EmptyTrajectory",
            IoError::EmptyPlot(_) => "EmptyPlot",
            IoError::GridMismatch { .. } => "GridMismatch",
            IoError::File { .. } => "IoError",
        }
    }
}
