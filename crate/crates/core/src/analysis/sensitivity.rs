//! One-at-a-time parameter perturbation of the wingtip path.
//!
//! A parameter's score is the largest wingtip displacement (mm) over the
//! cycle per 1% change of the parameter, differenced between the scales
//! nearest to 1 on either side. Perturbed designs may leave the fitting
//! bounds; failures are recorded with the phase where assembly was lost.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::geom::{norm, sub, Vec2};
use crate::linkage::sweep::check_samples;
use crate::linkage::{GaitTrajectory, MechanismGraph, SolveError, SweepMode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureMarker {
    pub scale: f64,
    /// Phase (degrees) of the first failed sample; `None` when the scaled
    /// design is not even a valid mechanism (e.g. a non-positive length).
    pub phase_deg: Option<f64>,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleOutcome {
    pub scale: f64,
    pub value: f64,
    pub trajectory: Result<GaitTrajectory, FailureMarker>,
    /// Largest distance (mm) from the nominal tracked point over the cycle.
    pub max_deviation_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    pub parameter: String,
    pub nominal_value: f64,
    /// Output point whose path is compared, normally `wingtip`.
    pub tracked_point: String,
    pub outcomes: Vec<ScaleOutcome>,
    /// mm per 1% change; `None` if a neighbouring scale failed.
    pub score: Option<f64>,
}

impl SensitivityResult {
    pub fn scales(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.scale).collect()
    }

    pub fn failures(&self) -> Vec<&FailureMarker> {
        self.outcomes.iter().filter_map(|o| o.trajectory.as_ref().err()).collect()
    }

    pub fn outcome(&self, scale: f64) -> Option<&ScaleOutcome> {
        self.outcomes.iter().find(|o| o.scale == scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub parameter: String,
    pub score: Option<f64>,
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 1e-12 so
/// that grid values such as 1.0 come out exact.
pub fn scale_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, AnalysisError> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(AnalysisError::InvalidScales(format!("bad range {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

fn tracked_point(mech: &MechanismGraph) -> Result<String, AnalysisError> {
    let mut names = mech.point_output_names();
    if mech.point_output_names().any(|n| n == "wingtip") {
        return Ok("wingtip".into());
    }
    names.next().map(str::to_string).ok_or(AnalysisError::NoTrackedPoint)
}

fn marker(scale: f64, kind: &str, phase_deg: Option<f64>, message: String) -> FailureMarker {
    FailureMarker { scale, phase_deg, kind: kind.to_string(), message }
}

fn solve_failure(scale: f64, e: &SolveError) -> FailureMarker {
    marker(scale, e.kind(), e.phase_deg(), e.to_string())
}

fn path(traj: &GaitTrajectory, point: &str) -> Vec<Vec2> {
    traj.point_series(point).expect("tracked point is an output of every perturbed copy")
}

fn max_distance(a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter().zip(b).map(|(p, q)| norm(sub(*p, *q))).fold(0.0, f64::max)
}

/// Sweeps `name` over `scales` with the nominal trajectory already solved.
fn run_scales(
    mech: &MechanismGraph,
    name: &str,
    scales: &[f64],
    n: usize,
    nominal: &Result<GaitTrajectory, SolveError>,
    point: &str,
) -> Result<SensitivityResult, AnalysisError> {
    let resolved = mech.resolve_parameter(name)?.to_string();
    let nominal_value = mech.parameter(&resolved)?;
    let nominal_path = nominal.as_ref().ok().map(|t| path(t, point));

    let outcomes: Vec<ScaleOutcome> = scales
        .par_iter()
        .map(|&scale| {
            let value = scale * nominal_value;
            let trajectory = if scale == 1.0 {
                nominal.clone().map_err(|e| solve_failure(scale, &e))
            } else {
                match mech.with_parameter_unbounded(&resolved, value) {
                    Ok(m) => m.sweep(n, SweepMode::Continuation).map_err(|e| solve_failure(scale, &e)),
                    Err(e) => Err(marker(scale, e.kind(), None, e.to_string())),
                }
            };
            let max_deviation_mm = match (&trajectory, &nominal_path) {
                (Ok(t), Some(p0)) => Some(max_distance(&path(t, point), p0)),
                _ => None,
            };
            ScaleOutcome { scale, value, trajectory, max_deviation_mm }
        })
        .collect();

    let score = score(&outcomes, point);
    Ok(SensitivityResult { parameter: resolved, nominal_value, tracked_point: point.to_string(), outcomes, score })
}

fn score(outcomes: &[ScaleOutcome], point: &str) -> Option<f64> {
    let nearest = |below: bool| {
        outcomes
            .iter()
            .filter(|o| if below { o.scale < 1.0 } else { o.scale > 1.0 })
            .min_by(|a, b| (a.scale - 1.0).abs().total_cmp(&(b.scale - 1.0).abs()))
    };
    let unit = outcomes.iter().find(|o| o.scale == 1.0);
    let (lo, hi) = match (nearest(true), nearest(false)) {
        (None, None) => return Some(0.0),
        (Some(lo), Some(hi)) => (lo, hi),
        (Some(one), None) | (None, Some(one)) => (one, unit?),
    };
    let (a, b) = (lo.trajectory.as_ref().ok()?, hi.trajectory.as_ref().ok()?);
    let span = (hi.scale - lo.scale).abs() * 100.0;
    Some(max_distance(&path(a, point), &path(b, point)) / span)
}

/// Sweeps one parameter over a family of scale factors (must include 1).
pub fn sensitivity_sweep(
    mech: &MechanismGraph,
    param: &str,
    scales: &[f64],
    n: usize,
) -> Result<SensitivityResult, AnalysisError> {
    mech.resolve_parameter(param)?;
    if !scales.contains(&1.0) {
        return Err(AnalysisError::InvalidScales("scale factors must include 1.0".into()));
    }
    if let Some(bad) = scales.iter().find(|s| !s.is_finite()) {
        return Err(AnalysisError::InvalidScales(format!("scale {bad} is not finite")));
    }
    check_samples(n)?;
    let point = tracked_point(mech)?;
    let nominal = mech.sweep(n, SweepMode::Continuation);
    run_scales(mech, param, scales, n, &nominal, &point)
}

/// Orders a ranking: descending score, failed (`None`) first, ties by name.
fn rank_order(a: &RankEntry, b: &RankEntry) -> Ordering {
    let key = |s: Option<f64>| s.unwrap_or(f64::INFINITY);
    key(b.score).total_cmp(&key(a.score)).then_with(|| a.parameter.cmp(&b.parameter))
}

/// Scores every parameter at scales `1 - delta` and `1 + delta`.
pub fn sensitivity_rank(mech: &MechanismGraph, delta: f64, n: usize) -> Result<Vec<RankEntry>, AnalysisError> {
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(AnalysisError::InvalidDelta(delta));
    }
    check_samples(n)?;
    let point = tracked_point(mech)?;
    let nominal = mech.sweep(n, SweepMode::Continuation);
    let scales = [1.0 - delta, 1.0, 1.0 + delta];
    let names: Vec<String> = mech.parameter_names().map(str::to_string).collect();
    let mut entries = names
        .par_iter()
        .map(|name| {
            let r = run_scales(mech, name, &scales, n, &nominal, &point)?;
            Ok(RankEntry { parameter: r.parameter, score: r.score })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    entries.sort_by(rank_order);
    Ok(entries)
}
