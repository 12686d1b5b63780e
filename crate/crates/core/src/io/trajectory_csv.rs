//! Seven-column CSV trajectory files.
//!
//! Angles in degrees, points in mm, fixed 12-decimal formatting. Series a
//! mechanism does not provide are written as `NaN`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::linkage::{phase_grid, GaitTrajectory};
use crate::target::TargetGait;

pub const HEADER: &str = "phi_deg,theta_s_deg,theta_e_deg,elbow_x_mm,elbow_y_mm,tip_x_mm,tip_y_mm";

/// One parsed CSV row, in column order.
pub type TrajectoryRow = [f64; 7];

fn push_row(out: &mut String, row: &TrajectoryRow) {
    let cells: Vec<String> = row.iter().map(|v| format!("{v:.12}")).collect();
    writeln!(out, "{}", cells.join(",")).expect("writing to a String");
}

pub fn trajectory_rows(traj: &GaitTrajectory) -> Vec<TrajectoryRow> {
    traj.samples
        .iter()
        .map(|c| {
            let deg = |name: &str| c.angle(name).map_or(f64::NAN, f64::to_degrees);
            let pt = |name: &str| c.point(name).unwrap_or([f64::NAN, f64::NAN]);
            let (e, t) = (pt("elbow"), pt("wingtip"));
            [c.phase.to_degrees(), deg("shoulder"), deg("elbow"), e[0], e[1], t[0], t[1]]
        })
        .collect()
}

pub fn rows_csv_string(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 120);
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        push_row(&mut out, r);
    }
    out
}

pub fn trajectory_csv_string(traj: &GaitTrajectory) -> Result<String, IoError> {
    if traj.is_empty() {
        return Err(IoError::EmptyTrajectory);
    }
    Ok(rows_csv_string(&trajectory_rows(traj)))
}

pub fn targets_csv_string(targets: &TargetGait) -> Result<String, IoError> {
    if targets.is_empty() {
        return Err(IoError::EmptyTrajectory);
    }
    let nan = f64::NAN;
    let rows: Vec<TrajectoryRow> = (0..targets.len())
        .map(|k| [targets.phases[k].to_degrees(), targets.shoulder_deg[k], targets.elbow_deg[k], nan, nan, nan, nan])
        .collect();
    Ok(rows_csv_string(&rows))
}

pub fn write_trajectory_csv(traj: &GaitTrajectory, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, trajectory_csv_string(traj)?).map_err(|e| IoError::io(path, e))
}

pub fn write_targets_csv(targets: &TargetGait, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, targets_csv_string(targets)?).map_err(|e| IoError::io(path, e))
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>, IoError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HEADER) {
        return Err(IoError::Csv { line: 1, message: format!("expected header `{HEADER}`") });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 7 {
            return Err(IoError::Csv { line: line_no, message: format!("expected 7 columns, found {}", cells.len()) });
        }
        let mut row = [0.0; 7];
        for (slot, cell) in row.iter_mut().zip(&cells) {
            *slot = cell
                .trim()
                .parse()
                .map_err(|_| IoError::Csv { line: line_no, message: format!("not a number: `{cell}`") })?;
        }
        if let Some(prev) = rows.last() {
            let prev: &TrajectoryRow = prev;
            if !(row[0] > prev[0]) {
                return Err(IoError::Csv { line: line_no, message: "phi_deg must increase strictly".into() });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IoError::EmptyTrajectory);
    }
    Ok(rows)
}

pub fn read_trajectory_csv(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRow>, IoError> {
    let path = path.as_ref();
    parse_trajectory_csv(&fs::read_to_string(path).map_err(|e| IoError::io(path, e))?)
}

/// Target gait from CSV rows. The phase column must be the uniform grid
/// (to 1e-9 deg); the exact grid is then used.
pub fn targets_from_rows(rows: &[TrajectoryRow]) -> Result<TargetGait, IoError> {
    let phases = phase_grid(rows.len());
    for (k, (row, phi)) in rows.iter().zip(&phases).enumerate() {
        if (row[0] - phi.to_degrees()).abs() > 1e-9 {
            return Err(IoError::Csv { line: k + 2, message: "phi_deg is not the uniform 360 k / N grid".into() });
        }
    }
    Ok(TargetGait {
        shape: None,
        phases,
        shoulder_deg: rows.iter().map(|r| r[1]).collect(),
        elbow_deg: rows.iter().map(|r| r[2]).collect(),
    })
}
