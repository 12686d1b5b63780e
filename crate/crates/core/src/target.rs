//! Desired shoulder and elbow trajectories over one wingbeat.
//!
//! The shoulder follows a plain sinusoid. The elbow follows a skewed
//! sinusoid, `-k atan(-k sin(x) / (1 + k cos(x))) * gain + offset` with
//! `x = phi + psi`, whose arctangent is taken in radians and scaled by a
//! per-radian gain. The shoulder angle is measured positive downward, so
//! the wing travels down while it increases, i.e. on `phi` in (-pi/2, pi/2).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::geom;
use crate::linkage::sweep::{check_samples, phase_grid};
use crate::linkage::{GaitTrajectory, SolveError};

/// Constants of the target family. Angles in degrees except `elbow_phase`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitShape {
    pub shoulder_amplitude_deg: f64,
    pub shoulder_offset_deg: f64,
    pub elbow_skew: f64,
    /// Radians.
    pub elbow_phase: f64,
    /// Degrees of elbow motion per radian of the inner arctangent.
    pub elbow_gain_deg: f64,
    pub elbow_offset_deg: f64,
}

impl Default for GaitShape {
    fn default() -> Self {
        GaitShape {
            shoulder_amplitude_deg: 35.0,
            shoulder_offset_deg: -10.0,
            elbow_skew: 0.5,
            elbow_phase: 2.0 * PI / 3.0,
            elbow_gain_deg: 45.0,
            elbow_offset_deg: 120.0,
        }
    }
}

impl GaitShape {
    pub fn shoulder(&self, phase: f64) -> f64 {
        self.shoulder_amplitude_deg * geom::wrap_2pi(phase).sin() + self.shoulder_offset_deg
    }

    pub fn elbow(&self, phase: f64) -> f64 {
        let k = self.elbow_skew;
        let x = geom::wrap_2pi(phase) + self.elbow_phase;
        -k * (-k * x.sin() / (1.0 + k * x.cos())).atan() * self.elbow_gain_deg + self.elbow_offset_deg
    }
}

/// Shoulder target in degrees.
pub fn target_shoulder(phase: f64) -> f64 {
    GaitShape::default().shoulder(phase)
}

/// Elbow target in degrees.
pub fn target_elbow(phase: f64) -> f64 {
    GaitShape::default().elbow(phase)
}

/// True on the wing-lowering half of the cycle.
pub fn is_downstroke(phase: f64) -> bool {
    geom::wrap_pi(phase).abs() < FRAC_PI_2
}

/// Sampled targets on the uniform grid `2 pi k / N`. Angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetGait {
    /// `None` when the series were taken from a simulated trajectory.
    pub shape: Option<GaitShape>,
    pub phases: Vec<f64>,
    pub shoulder_deg: Vec<f64>,
    pub elbow_deg: Vec<f64>,
}

impl TargetGait {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Targets reproducing a simulated trajectory; useful for recovery tests.
    pub fn from_trajectory(traj: &GaitTrajectory) -> Result<Self, SolveError> {
        Ok(TargetGait {
            shape: None,
            phases: traj.phases(),
            shoulder_deg: traj.shoulder()?.into_iter().map(f64::to_degrees).collect(),
            elbow_deg: traj.elbow()?.into_iter().map(f64::to_degrees).collect(),
        })
    }

    /// Series for an output name (`shoulder` or `elbow`).
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        match name {
            "shoulder" => Some(&self.shoulder_deg),
            "elbow" => Some(&self.elbow_deg),
            _ => None,
        }
    }
}

pub fn sample_targets(n: usize) -> Result<TargetGait, SolveError> {
    sample_shape(&GaitShape::default(), n)
}

pub fn sample_shape(shape: &GaitShape, n: usize) -> Result<TargetGait, SolveError> {
    check_samples(n)?;
    let phases = phase_grid(n);
    Ok(TargetGait {
        shape: Some(*shape),
        shoulder_deg: phases.iter().map(|&p| shape.shoulder(p)).collect(),
        elbow_deg: phases.iter().map(|&p| shape.elbow(p)).collect(),
        phases,
    })
}
