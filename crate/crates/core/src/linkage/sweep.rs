//! Sampling a mechanism over one crank revolution.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::error::SolveError;
use super::graph::{AngleVar, MechanismGraph};
use super::solver::Configuration;
use crate::geom::{self, Vec2};

/// Smallest accepted sample count. Quarter-phase grids are useful for
/// spot checks, so this is lower than the eight used elsewhere as a default.
pub const MIN_SAMPLES: usize = 4;
/// Allowed joint-angle mismatch (rad) when the sweep wraps back to phase 0.
pub const PERIODIC_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Each sample starts Newton from the previous one; sequential.
    #[default]
    Continuation,
    /// Each sample is assembled from scratch; samples run in parallel.
    Independent,
}

/// `2 pi k / n` for `k = 0..n`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

pub(crate) fn check_samples(n: usize) -> Result<(), SolveError> {
    if n < MIN_SAMPLES {
        return Err(SolveError::TooFewSamples { requested: n, minimum: MIN_SAMPLES });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitTrajectory {
    pub samples: Vec<Configuration>,
}

impl GaitTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.phase).collect()
    }

    /// Named angle output over the cycle, radians.
    pub fn angle_series(&self, name: &str) -> Result<Vec<f64>, SolveError> {
        self.samples.iter().map(|c| c.angle(name)).collect()
    }

    pub fn point_series(&self, name: &str) -> Result<Vec<Vec2>, SolveError> {
        self.samples.iter().map(|c| c.point(name)).collect()
    }

    pub fn shoulder(&self) -> Result<Vec<f64>, SolveError> {
        self.angle_series("shoulder")
    }

    pub fn elbow(&self) -> Result<Vec<f64>, SolveError> {
        self.angle_series("elbow")
    }

    pub fn elbow_path(&self) -> Result<Vec<Vec2>, SolveError> {
        self.point_series("elbow")
    }

    pub fn wingtip_path(&self) -> Result<Vec<Vec2>, SolveError> {
        self.point_series("wingtip")
    }
}

pub fn sweep_gait(mech: &MechanismGraph, n: usize) -> Result<GaitTrajectory, SolveError> {
    mech.sweep(n, SweepMode::Continuation)
}

impl MechanismGraph {
    pub fn sweep(&self, n: usize, mode: SweepMode) -> Result<GaitTrajectory, SolveError> {
        check_samples(n)?;
        let phases = phase_grid(n);
        let states = self.solve_states(&phases, mode);
        let states: Vec<Vec<f64>> = states.into_iter().collect::<Result<_, _>>()?;
        if mode == SweepMode::Continuation {
            self.check_periodic(&states)?;
        }
        let samples = phases.iter().zip(states).map(|(&phi, z)| self.configuration_from_state(phi, z)).collect();
        Ok(GaitTrajectory { samples })
    }

    /// Solves every phase, keeping failures in place. In continuation mode a
    /// failed or branch-jumping step restarts from closed-form assembly.
    pub(crate) fn solve_states(&self, phases: &[f64], mode: SweepMode) -> Vec<Result<Vec<f64>, SolveError>> {
        match mode {
            SweepMode::Independent => phases
                .par_iter()
                .map(|&phi| self.solve_state(phi, None).map(|z| self.normalized(z)))
                .collect(),
            SweepMode::Continuation => {
                let mut out = Vec::with_capacity(phases.len());
                let mut prev: Option<Vec<f64>> = None;
                for &phi in phases {
                    let res = self.continue_from(phi, prev.as_deref());
                    prev = res.as_ref().ok().cloned();
                    out.push(res);
                }
                out
            }
        }
    }

    fn continue_from(&self, phi: f64, prev: Option<&[f64]>) -> Result<Vec<f64>, SolveError> {
        let first = self.solve_state(phi, prev);
        let z = match first {
            Err(SolveError::BranchMismatch { .. } | SolveError::NoConvergence { .. } | SolveError::SingularJacobian { .. })
                if prev.is_some() && self.plan.is_some() =>
            {
                log::debug!("continuation restart at phi = {:.3} deg", phi.to_degrees());
                self.solve_state(phi, None)?
            }
            other => other?,
        };
        Ok(self.normalized(z))
    }

    /// Wraps free angles into (-pi, pi]; the pose is unchanged.
    fn normalized(&self, mut z: Vec<f64>) -> Vec<f64> {
        for s in &self.states {
            if let AngleVar::Free(i) = s.angle {
                z[i] = geom::wrap_pi(z[i]);
            }
        }
        z
    }

    fn check_periodic(&self, states: &[Vec<f64>]) -> Result<(), SolveError> {
        let (Some(first), Some(last)) = (states.first(), states.last()) else { return Ok(()) };
        let wrapped = self.continue_from(2.0 * PI, Some(last))?;
        let mut deviation: f64 = 0.0;
        for s in &self.states {
            if let AngleVar::Free(i) = s.angle {
                deviation = deviation.max(geom::wrap_pi(wrapped[i] - first[i]).abs());
            }
        }
        for j in &self.joints {
            let rel = |z: &[f64], phi: f64| self.body_angle(j.b, z, phi) - self.body_angle(j.a, z, phi);
            deviation = deviation.max(geom::wrap_pi(rel(&wrapped, 2.0 * PI) - rel(first, 0.0)).abs());
        }
        if deviation > PERIODIC_TOLERANCE {
            return Err(SolveError::NotPeriodic { deviation });
        }
        Ok(())
    }
}
