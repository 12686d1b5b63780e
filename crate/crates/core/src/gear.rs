//! Affine gear couplings between joint angles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("gear ratio must be nonzero")]
pub struct ZeroRatio;

/// `out = ratio * in + offset`. External meshes carry a negative ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearMap {
    pub ratio: f64,
    /// Radians.
    pub offset: f64,
}

impl GearMap {
    pub fn new(ratio: f64, offset: f64) -> Result<Self, ZeroRatio> {
        if ratio == 0.0 || !ratio.is_finite() {
            return Err(ZeroRatio);
        }
        Ok(GearMap { ratio, offset })
    }

    pub fn apply(&self, input: f64) -> f64 {
        self.ratio * input + self.offset
    }

    /// Coupling equivalent to applying `self` and then `next`.
    pub fn then(&self, next: &GearMap) -> GearMap {
        GearMap { ratio: self.ratio * next.ratio, offset: next.ratio * self.offset + next.offset }
    }
}

pub fn gear_couple(input: f64, ratio: f64, offset: f64) -> Result<f64, ZeroRatio> {
    Ok(GearMap::new(ratio, offset)?.apply(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn external_mesh_reverses() {
        let out = gear_couple(30f64.to_radians(), -1.0, 0.0).unwrap();
        assert!((out.to_degrees() + 30.0).abs() < 1e-12);
    }

    #[test]
    fn motor_reduction() {
        let out = gear_couple(75.0 * 2.0 * PI, 1.0 / 75.0, 0.0).unwrap();
        assert!((out - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_ratio_rejected() {
        assert_eq!(gear_couple(1.0, 0.0, 0.0), Err(ZeroRatio));
    }

    proptest! {
        #[test]
        fn composition_is_affine(
            x in -10.0f64..10.0,
            r1 in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0],
            r2 in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0],
            c1 in -3.0f64..3.0,
            c2 in -3.0f64..3.0,
        ) {
            let g1 = GearMap::new(r1, c1).unwrap();
            let g2 = GearMap::new(r2, c2).unwrap();
            let chained = g2.apply(g1.apply(x));
            let single = g1.then(&g2).apply(x);
            prop_assert!((chained - single).abs() < 1e-10);
        }
    }
}
