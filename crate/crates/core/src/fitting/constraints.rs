//! Feasibility measures `f_c`; every entry must be `<= 0`.
//!
//! * `assembly:<joint>` - worst circle-intersection margin (mm) of the dyad
//!   closed at `<joint>` over the phase grid.
//! * `transmission:<joint>` - `sin(10 deg)` minus the smallest |sine| of the
//!   angle between the two dyad arms.
//! * `grashof:<joint>` and `crank:<joint>` - for four-bars turned by the
//!   driver, `s + l - p - q` and crank length minus the shortest other link;
//!   both negative means the crank turns fully.
//! * `symmetry:<n>:lo|hi` - each equality `h = 0` as `h - tol` and `-h - tol`.
//!
//! Entries that cannot be computed because an earlier dyad failed take
//! [`UNCOMPUTABLE`].

use serde::{Deserialize, Serialize};

use super::residual::{angle_error_deg, FAILED_SAMPLE_PENALTY};
use crate::linkage::spec::SymmetryConstraint;
use crate::linkage::sweep::phase_grid;
use crate::linkage::{MechanismGraph, SolveError};

pub const UNCOMPUTABLE: f64 = 1e6;
pub const MIN_TRANSMISSION_DEG: f64 = 10.0;
/// Slack of symmetry equalities (mm or degrees).
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintValues {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl ConstraintValues {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_feasible(&self) -> bool {
        self.values.iter().all(|&v| v <= 0.0)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Constraint values together with angle residuals from one pass over the grid.
pub(crate) struct Evaluation {
    pub residuals: Vec<f64>,
    pub constraints: Vec<f64>,
}

pub(crate) fn constraint_names(mech: &MechanismGraph) -> Vec<String> {
    let mut names = Vec::new();
    if mech.is_dyad_decomposable() {
        for j in mech.dyad_joints() {
            names.push(format!("assembly:{j}"));
        }
        for j in mech.dyad_joints() {
            names.push(format!("transmission:{j}"));
        }
    } else {
        names.push("assembly".to_string());
    }
    for (j, _) in mech.driven_fourbars() {
        names.push(format!("grashof:{j}"));
        names.push(format!("crank:{j}"));
    }
    for i in 0..mech.spec().constraints.len() {
        names.push(format!("symmetry:{i}:lo"));
        names.push(format!("symmetry:{i}:hi"));
    }
    names
}

/// Evaluates `f_c` on the `samples`-point phase grid.
pub fn evaluate_constraints(mech: &MechanismGraph, samples: usize) -> ConstraintValues {
    let eval = evaluate(mech, &phase_grid(samples), &[]);
    ConstraintValues { names: constraint_names(mech), values: eval.constraints }
}

/// One pass over `phases`: residuals of the listed `(output index, target
/// degrees)` series, then all constraint entries.
pub(crate) fn evaluate(mech: &MechanismGraph, phases: &[f64], outputs: &[(usize, &[f64])]) -> Evaluation {
    let n_dyads = mech.dyad_count();
    let mut worst_margin = vec![f64::NEG_INFINITY; n_dyads];
    let mut min_sin = vec![f64::INFINITY; n_dyads];
    let mut reached = vec![true; n_dyads];
    let mut residuals = vec![FAILED_SAMPLE_PENALTY; phases.len() * outputs.len()];
    let mut all_solved = true;
    for (k, &phi) in phases.iter().enumerate() {
        let solved: Result<Vec<f64>, SolveError> = if mech.is_dyad_decomposable() {
            let mut seen = 0;
            let assembled = mech.assemble(phi, |i, rep| {
                seen = i + 1;
                worst_margin[i] = worst_margin[i].max(rep.margin);
                min_sin[i] = min_sin[i].min(rep.sin_transmission.abs());
            });
            for r in reached.iter_mut().skip(seen) {
                *r = false;
            }
            assembled.and_then(|z| mech.solve_state(phi, Some(&z)))
        } else {
            mech.solve_state(phi, None)
        };
        match solved {
            Ok(z) => {
                for (o, &(idx, target)) in outputs.iter().enumerate() {
                    residuals[o * phases.len() + k] = angle_error_deg(mech.angle_output_value(idx, &z, phi), target[k]);
                }
            }
            Err(_) => all_solved = false,
        }
    }

    let mut constraints = Vec::new();
    if mech.is_dyad_decomposable() {
        for i in 0..n_dyads {
            constraints.push(if reached[i] { worst_margin[i] } else { UNCOMPUTABLE });
        }
        let floor = MIN_TRANSMISSION_DEG.to_radians().sin();
        for i in 0..n_dyads {
            constraints.push(if reached[i] { floor - min_sin[i] } else { UNCOMPUTABLE });
        }
    } else {
        constraints.push(if all_solved { -1.0 } else { UNCOMPUTABLE });
    }
    for (_, lengths) in mech.driven_fourbars() {
        let [ground, crank, coupler, rocker] = lengths;
        let s = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let l = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = lengths.iter().sum();
        constraints.push(2.0 * (s + l) - total);
        constraints.push(crank - ground.min(coupler).min(rocker));
    }
    for c in &mech.spec().constraints {
        let h = symmetry_gap(mech, c);
        constraints.push(h - SYMMETRY_TOLERANCE);
        constraints.push(-h - SYMMETRY_TOLERANCE);
    }
    Evaluation { residuals, constraints }
}

/// Signed violation of a symmetry equality; `UNCOMPUTABLE` when the pose
/// it refers to cannot be solved.
fn symmetry_gap(mech: &MechanismGraph, c: &SymmetryConstraint) -> f64 {
    match c {
        SymmetryConstraint::PivotX { pivot, value } => mech
            .spec()
            .pivots
            .iter()
            .find(|p| &p.id == pivot)
            .map_or(UNCOMPUTABLE, |p| p.x - value),
        SymmetryConstraint::LinkAngle { link, phase_deg, angle_deg } => match mech.solve(phase_deg.to_radians(), None) {
            Ok(conf) => conf.link_angle(link).map_or(UNCOMPUTABLE, |a| angle_error_deg(a, *angle_deg)),
            Err(_) => UNCOMPUTABLE,
        },
    }
}
