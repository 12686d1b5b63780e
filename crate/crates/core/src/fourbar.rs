//! Closed-form kinematics of a single planar four-bar.
//!
//! The ground pivot of the crank sits at the origin, the rocker pivot at
//! `ground * (cos g, sin g)` where `g` is the ground orientation. All returned
//! angles are absolute, counterclockwise from +x.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Vec2};

/// Assembly branch of a dyad.
///
/// `Open` places the coupler/rocker joint to the left of the line running from
/// the coupler's known end (the crank tip) to the rocker pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Open,
    Crossed,
}

impl Branch {
    pub fn side(self) -> f64 {
        match self {
            Branch::Open => 1.0,
            Branch::Crossed => -1.0,
        }
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::Open => Branch::Crossed,
            Branch::Crossed => Branch::Open,
        }
    }

    pub fn from_side(side: f64) -> Branch {
        if side >= 0.0 {
            Branch::Open
        } else {
            Branch::Crossed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourBar {
    pub ground: f64,
    pub crank: f64,
    pub coupler: f64,
    pub rocker: f64,
    /// Orientation of the ground link, radians.
    pub ground_angle: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrashofClass {
    /// Shortest link is the input crank; it rotates fully.
    CrankRocker,
    /// Shortest link is the output rocker; the input only oscillates.
    RockerCrank,
    DoubleCrank,
    DoubleRocker,
    ChangePoint,
    NonGrashof,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourBarError {
    #[error("four-bar cannot assemble at input angle {input_deg:.6} deg (margin {margin:.6} mm)")]
    NotAssemblable { input_deg: f64, margin: f64 },
    #[error("coupler and rocker are collinear at input angle {input_deg:.6} deg; branch is ambiguous")]
    SingularConfiguration { input_deg: f64 },
    #[error("four-bar link lengths must be positive")]
    NonPositiveLength,
}

/// Collinearity threshold for the coupler/rocker pair, radians.
pub const SINGULAR_ANGLE: f64 = 1e-9;

impl FourBar {
    pub fn new(ground: f64, crank: f64, coupler: f64, rocker: f64) -> Self {
        FourBar { ground, crank, coupler, rocker, ground_angle: 0.0, branch: Branch::Open }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_ground_angle(mut self, angle: f64) -> Self {
        self.ground_angle = angle;
        self
    }

    pub fn lengths(&self) -> [f64; 4] {
        [self.ground, self.crank, self.coupler, self.rocker]
    }

    pub fn rocker_pivot(&self) -> Vec2 {
        let (s, c) = self.ground_angle.sin_cos();
        [self.ground * c, self.ground * s]
    }

    pub fn crank_tip(&self, input: f64) -> Vec2 {
        let (s, c) = input.sin_cos();
        [self.crank * c, self.crank * s]
    }

    /// Vector loop-closure residual (mm) for a candidate pose.
    pub fn loop_residual(&self, input: f64, coupler_angle: f64, rocker_angle: f64) -> Vec2 {
        let a = self.crank_tip(input);
        let via_coupler = geom::add(a, geom::rotate([self.coupler, 0.0], coupler_angle));
        let via_rocker = geom::add(self.rocker_pivot(), geom::rotate([self.rocker, 0.0], rocker_angle));
        geom::sub(via_coupler, via_rocker)
    }
}

/// Classifies a four-bar by the Grashof inequality and the position of its
/// shortest link.
pub fn grashof_classify(fb: &FourBar) -> GrashofClass {
    let lengths = fb.lengths();
    let (mut s_idx, mut l_idx) = (0, 0);
    for i in 1..4 {
        if lengths[i] < lengths[s_idx] {
            s_idx = i;
        }
        if lengths[i] > lengths[l_idx] {
            l_idx = i;
        }
    }
    let total: f64 = lengths.iter().sum();
    let s = lengths[s_idx];
    let l = lengths[l_idx];
    let lhs = s + l;
    let rhs = total - lhs;
    let tol = 1e-12 * total;
    if (lhs - rhs).abs() <= tol {
        return GrashofClass::ChangePoint;
    }
    if lhs > rhs {
        return GrashofClass::NonGrashof;
    }
    match s_idx {
        0 => GrashofClass::DoubleCrank,
        1 => GrashofClass::CrankRocker,
        2 => GrashofClass::DoubleRocker,
        _ => GrashofClass::RockerCrank,
    }
}

/// Solves the four-bar at crank angle `input`, returning the absolute
/// (coupler, rocker) angles on the configured branch.
pub fn solve_fourbar(fb: &FourBar, input: f64) -> Result<(f64, f64), FourBarError> {
    if fb.lengths().iter().any(|&l| !(l > 0.0)) {
        return Err(FourBarError::NonPositiveLength);
    }
    let a = fb.crank_tip(input);
    let pivot = fb.rocker_pivot();
    let sol = geom::circle_intersection(a, fb.coupler, pivot, fb.rocker, fb.branch.side()).map_err(|margin| {
        FourBarError::NotAssemblable { input_deg: input.to_degrees(), margin }
    })?;
    if sol.sin_transmission.abs() < SINGULAR_ANGLE.sin() {
        return Err(FourBarError::SingularConfiguration { input_deg: input.to_degrees() });
    }
    let coupler_angle = geom::heading(geom::sub(sol.point, a));
    let rocker_angle = geom::heading(geom::sub(sol.point, pivot));
    Ok((coupler_angle, rocker_angle))
}
