use serde::{Deserialize, Serialize};

use super::design::Stage;
use super::FitError;
use crate::geom;
use crate::linkage::{GaitTrajectory, MechanismGraph, SweepMode};
use crate::target::TargetGait;

/// Residual used for a sample whose pose could not be solved, in degrees.
pub const FAILED_SAMPLE_PENALTY: f64 = 1e3;

/// Stacked angle errors in degrees, one block of `samples` entries per
/// compared output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualVector {
    pub values: Vec<f64>,
    pub samples: usize,
}

/// Mean square of the residual entries (deg^2).
pub fn cost(y: &ResidualVector) -> Result<f64, FitError> {
    mean_square(&y.values)
}

pub fn mean_square(values: &[f64]) -> Result<f64, FitError> {
    if values.is_empty() {
        return Err(FitError::EmptyResidual);
    }
    Ok(values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64)
}

/// Angle error in degrees, wrapped so a full turn counts as no error.
pub(crate) fn angle_error_deg(simulated: f64, target_deg: f64) -> f64 {
    geom::wrap_pi(simulated - target_deg.to_radians()).to_degrees()
}

fn target_series<'a>(targets: &'a TargetGait, name: &str) -> Result<&'a [f64], FitError> {
    targets.series(name).ok_or_else(|| FitError::UnknownTarget(name.to_string()))
}

/// Residuals of a swept trajectory. The grids must match exactly.
pub fn residuals(traj: &GaitTrajectory, targets: &TargetGait, stage: Stage) -> Result<ResidualVector, FitError> {
    let phases = traj.phases();
    if phases != targets.phases {
        return Err(FitError::GridMismatch { simulated: phases.len(), targets: targets.len() });
    }
    let mut values = Vec::with_capacity(phases.len() * stage.outputs().len());
    for name in stage.outputs() {
        let sim = traj.angle_series(name)?;
        let tgt = target_series(targets, name)?;
        values.extend(sim.iter().zip(tgt).map(|(&s, &t)| angle_error_deg(s, t)));
    }
    Ok(ResidualVector { values, samples: phases.len() })
}

/// Sweeps `mech` on the target grid and returns its residuals, raising the
/// first solver failure.
pub fn mechanism_residuals(
    mech: &MechanismGraph,
    targets: &TargetGait,
    stage: Stage,
) -> Result<ResidualVector, FitError> {
    let traj = mech.sweep(targets.len(), SweepMode::Continuation)?;
    residuals(&traj, targets, stage)
}

/// Like [`mechanism_residuals`], but solves each phase independently and
/// replaces unsolvable samples with [`FAILED_SAMPLE_PENALTY`].
pub fn penalized_residuals(
    mech: &MechanismGraph,
    targets: &TargetGait,
    stage: Stage,
) -> Result<ResidualVector, FitError> {
    let states = mech.solve_states(&targets.phases, SweepMode::Independent);
    let mut values = Vec::with_capacity(states.len() * stage.outputs().len());
    for name in stage.outputs() {
        let idx = mech.angle_output_index(name)?;
        let tgt = target_series(targets, name)?;
        for ((z, &phi), &t) in states.iter().zip(&targets.phases).zip(tgt) {
            values.push(match z {
                Ok(z) => angle_error_deg(mech.angle_output_value(idx, z, phi), t),
                Err(_) => FAILED_SAMPLE_PENALTY,
            });
        }
    }
    Ok(ResidualVector { values, samples: targets.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cost_examples() {
        let zero = ResidualVector { values: vec![0.0; 4], samples: 4 };
        assert_eq!(cost(&zero).unwrap(), 0.0);
        let unit = ResidualVector { values: vec![1.0, -1.0, 1.0, -1.0], samples: 4 };
        assert_eq!(cost(&unit).unwrap(), 1.0);
        assert!(matches!(mean_square(&[]), Err(FitError::EmptyResidual)));
    }

    proptest! {
        #[test]
        fn cost_is_nonnegative_and_scales_quadratically(
            v in proptest::collection::vec(-100.0f64..100.0, 1..50),
            c in prop_oneof![Just(2.0f64), Just(0.5), Just(-4.0)],
        ) {
            let base = mean_square(&v).unwrap();
            prop_assert!(base >= 0.0);
            prop_assert_eq!(base == 0.0, v.iter().all(|&x| x == 0.0));
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            // powers of two keep the scaling exact in binary floating point
            prop_assert_eq!(mean_square(&scaled).unwrap(), base * c * c);
        }
    }
}
