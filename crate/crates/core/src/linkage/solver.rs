//! Pose solving: closed-form dyad assembly followed by a damped Newton
//! polish on the stacked joint-closure equations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::error::SolveError;
use super::graph::{AngleVar, MechanismGraph, Step, GROUND_BODY};
use crate::fourbar::SINGULAR_ANGLE;
use crate::geom::{self, Vec2};

/// Closure residual accepted as solved, in mm.
pub const SOLVER_TOLERANCE: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 50;
/// Number of step halvings tried before a Newton step is taken as is.
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

/// A solved pose at one phase. Angles in radians, points in mm.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub phase: f64,
    /// Relative angle of every joint, `angle(b) - angle(a)`, wrapped to (-pi, pi].
    pub joint_angles: BTreeMap<String, f64>,
    pub link_poses: BTreeMap<String, Pose>,
    /// Every link point as `link.point`, plus named point outputs.
    pub points: BTreeMap<String, Vec2>,
    /// Named angle outputs, wrapped to (-pi, pi].
    pub angles: BTreeMap<String, f64>,
    pub residual_norm: f64,
    pub(crate) state: Vec<f64>,
}

impl Configuration {
    pub fn angle(&self, name: &str) -> Result<f64, SolveError> {
        self.angles.get(name).copied().ok_or_else(|| SolveError::MissingOutput { name: name.to_string() })
    }

    pub fn point(&self, name: &str) -> Result<Vec2, SolveError> {
        self.points.get(name).copied().ok_or_else(|| SolveError::MissingOutput { name: name.to_string() })
    }

    pub fn link_angle(&self, link: &str) -> Option<f64> {
        self.link_poses.get(link).map(|p| p.angle)
    }
}

/// Per-dyad diagnostics from one closed-form assembly attempt.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DyadReport {
    /// Circle-intersection margin (mm); positive when the dyad cannot close.
    pub margin: f64,
    pub sin_transmission: f64,
}

pub fn solve_configuration(
    mech: &MechanismGraph,
    phase: f64,
    guess: Option<&Configuration>,
) -> Result<Configuration, SolveError> {
    mech.solve(phase, guess)
}

impl MechanismGraph {
    pub fn solve(&self, phase: f64, guess: Option<&Configuration>) -> Result<Configuration, SolveError> {
        let state = self.solve_state(phase, guess.map(|g| g.state.as_slice()))?;
        Ok(self.configuration_from_state(phase, state))
    }

    /// Solves the raw state vector. A guess skips the closed-form assembly.
    pub(crate) fn solve_state(&self, phase: f64, guess: Option<&[f64]>) -> Result<Vec<f64>, SolveError> {
        let start = match guess {
            Some(g) if g.len() == self.n_state => g.to_vec(),
            _ => self.initial_state(phase)?,
        };
        let state = self.newton(phase, start)?;
        self.check_branches(phase, &state)?;
        Ok(state)
    }

    fn initial_state(&self, phase: f64) -> Result<Vec<f64>, SolveError> {
        if self.plan.is_some() {
            self.assemble(phase, |_, _| {})
        } else {
            Ok(self.home_state.clone().expect("validated graphs have a plan or a home pose"))
        }
    }

    /// Closed-form assembly along the dyad plan. `report` sees every dyad
    /// that could be evaluated, including the one that fails to close.
    pub(crate) fn assemble(
        &self,
        phase: f64,
        mut report: impl FnMut(usize, DyadReport),
    ) -> Result<Vec<f64>, SolveError> {
        let plan = self.plan.as_ref().expect("assemble requires a dyad plan");
        let mut z = vec![0.0; self.n_state];
        let mut dyad_index = 0;
        for step in plan {
            match step {
                Step::Rotating { body, known_body, known_local, local, .. } => {
                    let theta = self.body_angle(*body, &z, phase);
                    let w = self.world_point(*known_body, *known_local, &z, phase);
                    let origin = geom::sub(w, geom::rotate(*local, theta));
                    let s = &self.states[*body];
                    z[s.x] = origin[0];
                    z[s.y] = origin[1];
                }
                Step::Dyad(d) => {
                    let fa = &d.first_anchor;
                    let sa = &d.second_anchor;
                    let k1 = self.world_point(fa.known_body, fa.known_local, &z, phase);
                    let k2 = self.world_point(sa.known_body, sa.known_local, &z, phase);
                    let joint = &self.joints[d.mid].id;
                    let sol = match geom::circle_intersection(k1, fa.arm, k2, sa.arm, d.side) {
                        Ok(sol) => sol,
                        Err(margin) => {
                            report(dyad_index, DyadReport { margin, sin_transmission: 0.0 });
                            return Err(SolveError::NotAssemblable {
                                phase_deg: phase.to_degrees(),
                                joint: joint.clone(),
                                margin,
                            });
                        }
                    };
                    report(dyad_index, DyadReport { margin: sol.margin, sin_transmission: sol.sin_transmission });
                    if sol.sin_transmission.abs() < SINGULAR_ANGLE.sin() {
                        return Err(SolveError::SingularConfiguration {
                            phase_deg: phase.to_degrees(),
                            joint: joint.clone(),
                        });
                    }
                    for (body, anchor, known) in [(d.first, fa, k1), (d.second, sa, k2)] {
                        let theta = geom::heading(geom::sub(sol.point, known))
                            - geom::heading(geom::sub(anchor.mid_local, anchor.anchor_local));
                        let origin = geom::sub(known, geom::rotate(anchor.anchor_local, theta));
                        let s = &self.states[body];
                        z[s.x] = origin[0];
                        z[s.y] = origin[1];
                        if let AngleVar::Free(i) = s.angle {
                            z[i] = theta;
                        }
                    }
                    dyad_index += 1;
                }
            }
        }
        Ok(z)
    }

    pub(crate) fn dyad_count(&self) -> usize {
        self.plan.as_ref().map_or(0, |p| p.iter().filter(|s| matches!(s, Step::Dyad(_))).count())
    }

    /// Joint ids closing each dyad, in plan order.
    pub fn dyad_joints(&self) -> Vec<&str> {
        self.plan
            .iter()
            .flatten()
            .filter_map(|s| match s {
                Step::Dyad(d) => Some(self.joints[d.mid].id.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Four-bars formed by a dyad hung between a ground pivot and a link
    /// turned by the driver about another ground pivot. Lengths are
    /// `[ground, crank, coupler, rocker]`.
    pub(crate) fn driven_fourbars(&self) -> Vec<(String, [f64; 4])> {
        let Some(plan) = &self.plan else { return Vec::new() };
        let mut cranks = std::collections::HashMap::new();
        for step in plan {
            if let Step::Rotating { body, known_body: GROUND_BODY, known_local, local } = step {
                if let AngleVar::Imposed(aff) = &self.states[*body].angle {
                    if aff.phase != 0.0 {
                        cranks.insert(*body, (*known_local, *local));
                    }
                }
            }
        }
        let mut out = Vec::new();
        for step in plan {
            let Step::Dyad(d) = step else { continue };
            for (driven, grounded) in [(&d.first_anchor, &d.second_anchor), (&d.second_anchor, &d.first_anchor)] {
                if grounded.known_body != GROUND_BODY {
                    continue;
                }
                if let Some(&(pivot_world, pivot_local)) = cranks.get(&driven.known_body) {
                    let ground = geom::norm(geom::sub(pivot_world, grounded.known_local));
                    let crank = geom::norm(geom::sub(driven.known_local, pivot_local));
                    out.push((self.joints[d.mid].id.clone(), [ground, crank, driven.arm, grounded.arm]));
                    break;
                }
            }
        }
        out
    }

    /// Stacked closure residual `p_a - p_b` over all joints.
    pub(crate) fn residual(&self, state: &[f64], phase: f64) -> DVector<f64> {
        let mut r = DVector::zeros(2 * self.joints.len());
        for (k, j) in self.joints.iter().enumerate() {
            let d = geom::sub(self.world_point(j.a, j.pa, state, phase), self.world_point(j.b, j.pb, state, phase));
            r[2 * k] = d[0];
            r[2 * k + 1] = d[1];
        }
        r
    }

    fn jacobian(&self, state: &[f64], phase: f64) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(2 * self.joints.len(), self.n_state);
        for (k, j) in self.joints.iter().enumerate() {
            for (body, local, sign) in [(j.a, j.pa, 1.0), (j.b, j.pb, -1.0)] {
                if body == GROUND_BODY {
                    continue;
                }
                let s = &self.states[body];
                jac[(2 * k, s.x)] += sign;
                jac[(2 * k + 1, s.y)] += sign;
                let d = geom::rotate_deriv(local, self.body_angle(body, state, phase));
                let mut add = |col: usize, coef: f64| {
                    jac[(2 * k, col)] += sign * coef * d[0];
                    jac[(2 * k + 1, col)] += sign * coef * d[1];
                };
                match &s.angle {
                    AngleVar::Ground => {}
                    AngleVar::Free(i) => add(*i, 1.0),
                    AngleVar::Imposed(aff) => {
                        for &(i, c) in &aff.terms {
                            add(i, c);
                        }
                    }
                }
            }
        }
        jac
    }

    fn newton(&self, phase: f64, mut z: Vec<f64>) -> Result<Vec<f64>, SolveError> {
        let phase_deg = phase.to_degrees();
        let mut r = self.residual(&z, phase);
        let mut norm = r.norm();
        let mut iterations = 0;
        while !(norm <= SOLVER_TOLERANCE) {
            if iterations == MAX_ITERATIONS || !norm.is_finite() {
                return Err(SolveError::NoConvergence { phase_deg, iterations, residual: norm });
            }
            iterations += 1;
            let step = self
                .jacobian(&z, phase)
                .lu()
                .solve(&r)
                .filter(|s| s.iter().all(|v| v.is_finite()))
                .ok_or(SolveError::SingularJacobian { phase_deg })?;
            let mut t = 1.0;
            let mut trial = Vec::with_capacity(z.len());
            for _ in 0..=MAX_HALVINGS {
                trial.clear();
                trial.extend(z.iter().zip(step.iter()).map(|(zi, si)| zi - t * si));
                let rt = self.residual(&trial, phase);
                let nt = rt.norm();
                if nt < norm {
                    r = rt;
                    norm = nt;
                    break;
                }
                t *= 0.5;
            }
            if t < 0.5f64.powi(MAX_HALVINGS as i32) {
                // no decrease along the Newton direction
                return Err(SolveError::NoConvergence { phase_deg, iterations, residual: norm });
            }
            std::mem::swap(&mut z, &mut trial);
        }
        Ok(z)
    }

    /// Confirms each dyad sits on its flagged branch.
    fn check_branches(&self, phase: f64, z: &[f64]) -> Result<(), SolveError> {
        let Some(plan) = &self.plan else { return Ok(()) };
        for step in plan {
            let Step::Dyad(d) = step else { continue };
            let fa = &d.first_anchor;
            let sa = &d.second_anchor;
            let k1 = self.world_point(fa.known_body, fa.known_local, z, phase);
            let k2 = self.world_point(sa.known_body, sa.known_local, z, phase);
            let j = &self.joints[d.mid];
            let m = self.world_point(j.a, j.pa, z, phase);
            let (u, v) = (geom::sub(m, k1), geom::sub(m, k2));
            let sin = geom::cross(u, v) / (geom::norm(u) * geom::norm(v));
            if !(sin.abs() >= SINGULAR_ANGLE.sin()) {
                return Err(SolveError::SingularConfiguration { phase_deg: phase.to_degrees(), joint: j.id.clone() });
            }
            let side = geom::cross(geom::sub(k2, k1), geom::sub(m, k1));
            if side * d.side <= 0.0 {
                return Err(SolveError::BranchMismatch { phase_deg: phase.to_degrees(), joint: j.id.clone() });
            }
        }
        Ok(())
    }

    pub(crate) fn angle_output_value(&self, index: usize, z: &[f64], phase: f64) -> f64 {
        let o = &self.angle_outputs[index];
        let rel = self.body_angle(o.to, z, phase) - self.body_angle(o.from, z, phase);
        geom::wrap_pi(o.sense * rel + o.offset)
    }

    pub(crate) fn point_output_value(&self, index: usize, z: &[f64], phase: f64) -> Vec2 {
        let o = &self.point_outputs[index];
        self.world_point(o.body, o.local, z, phase)
    }

    pub(crate) fn angle_output_index(&self, name: &str) -> Result<usize, SolveError> {
        self.angle_outputs
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| SolveError::MissingOutput { name: name.to_string() })
    }

    pub(crate) fn configuration_from_state(&self, phase: f64, state: Vec<f64>) -> Configuration {
        let residual_norm = self.residual(&state, phase).norm();
        let mut link_poses = BTreeMap::new();
        let mut points = BTreeMap::new();
        for (bi, body) in self.bodies.iter().enumerate() {
            if bi != GROUND_BODY {
                let o = self.body_origin(bi, &state);
                let angle = geom::wrap_pi(self.body_angle(bi, &state, phase));
                link_poses.insert(body.id.clone(), Pose { x: o[0], y: o[1], angle });
            }
            for (name, &local) in &body.points {
                points.insert(format!("{}.{}", body.id, name), self.world_point(bi, local, &state, phase));
            }
        }
        for i in 0..self.point_outputs.len() {
            points.insert(self.point_outputs[i].name.clone(), self.point_output_value(i, &state, phase));
        }
        let angles = (0..self.angle_outputs.len())
            .map(|i| (self.angle_outputs[i].name.clone(), self.angle_output_value(i, &state, phase)))
            .collect();
        let joint_angles = self
            .joints
            .iter()
            .map(|j| {
                let rel = self.body_angle(j.b, &state, phase) - self.body_angle(j.a, &state, phase);
                (j.id.clone(), geom::wrap_pi(rel))
            })
            .collect();
        Configuration { phase, joint_angles, link_poses, points, angles, residual_norm, state }
    }

    /// Re-evaluates joint closure from the reported link poses alone.
    pub fn closure_residual(&self, conf: &Configuration) -> f64 {
        let world = |body: usize, local: Vec2| -> Vec2 {
            if body == GROUND_BODY {
                return local;
            }
            let p = conf.link_poses[&self.bodies[body].id];
            geom::add([p.x, p.y], geom::rotate(local, p.angle))
        };
        self.joints
            .iter()
            .map(|j| {
                let d = geom::sub(world(j.a, j.pa), world(j.b, j.pb));
                d[0] * d[0] + d[1] * d[1]
            })
            .sum::<f64>()
            .sqrt()
    }
}
