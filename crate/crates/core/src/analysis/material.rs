//! Hinge material screening: uniaxial Mooney-Rivlin stress and a strain
//! budget against elongation at break.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Environment variable naming a material database to use instead of the
/// bundled one.
pub const MATERIALS_ENV: &str = "ARMWING_MATERIALS";

const BUNDLED: &str = include_str!("../../data/materials.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MooneyRivlin {
    pub c10_mpa: f64,
    pub c01_mpa: f64,
    pub poisson_ratio: f64,
}

impl MooneyRivlin {
    /// Nominal (engineering) stress in uniaxial tension/compression of an
    /// incompressible solid at stretch `lambda`.
    pub fn uniaxial_stress(&self, lambda: f64) -> Result<f64, AnalysisError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(AnalysisError::NonPositiveStretch(lambda));
        }
        Ok(2.0 * (lambda - lambda.powi(-2)) * (self.c10_mpa + self.c01_mpa / lambda))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(skip)]
    pub name: String,
    pub shore_hardness_a: [f64; 2],
    pub elongation_at_break_pct: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_g_cm3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mooney_rivlin: Option<MooneyRivlin>,
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |reason: &str| Err(AnalysisError::InvalidMaterial { name: self.name.clone(), reason: reason.into() });
        let [lo, hi] = self.elongation_at_break_pct;
        if !(lo >= 0.0 && lo <= hi) {
            return bad("elongation at break must satisfy 0 <= min <= max");
        }
        if self.shore_hardness_a[0] > self.shore_hardness_a[1] {
            return bad("shore hardness min exceeds max");
        }
        if let Some(mr) = &self.mooney_rivlin {
            if !(mr.poisson_ratio > 0.0 && mr.poisson_ratio <= 0.5) {
                return bad("Poisson's ratio must lie in (0, 0.5]");
            }
        }
        Ok(())
    }

    pub fn min_elongation_pct(&self) -> f64 {
        self.elongation_at_break_pct[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialDb {
    materials: BTreeMap<String, MaterialSpec>,
}

impl MaterialDb {
    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let mut materials: BTreeMap<String, MaterialSpec> = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| AnalysisError::Database(format!("at `{}`: {}", e.path(), e.inner())))?;
        for (name, m) in materials.iter_mut() {
            m.name = name.clone();
            m.validate()?;
        }
        Ok(MaterialDb { materials })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled material database is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, AnalysisError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| AnalysisError::Database(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The database named by `ARMWING_MATERIALS`, else the bundled one.
    pub fn load_default() -> Result<Self, AnalysisError> {
        match std::env::var_os(MATERIALS_ENV) {
            Some(p) if !p.is_empty() => Self::from_path(p),
            _ => Ok(Self::bundled()),
        }
    }

    pub fn get(&self, name: &str) -> Result<&MaterialSpec, AnalysisError> {
        self.materials.get(name).ok_or_else(|| AnalysisError::UnknownMaterial(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.keys().map(String::as_str)
    }
}

pub fn mooney_rivlin_uniaxial(lambda: f64, mat: &MaterialSpec) -> Result<f64, AnalysisError> {
    let mr = mat.mooney_rivlin.as_ref().ok_or_else(|| AnalysisError::MissingConstants(mat.name.clone()))?;
    mr.uniaxial_stress(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrainBudget {
    pub pass: bool,
    /// Strain times safety factor, percent.
    pub demand_pct: f64,
    /// Lower end of the elongation-at-break range, percent.
    pub limit_pct: f64,
    /// `limit - demand`, percentage points; negative on failure.
    pub margin_pct: f64,
}

pub fn strain_budget_check(strain_pct: f64, mat: &MaterialSpec, safety_factor: f64) -> Result<StrainBudget, AnalysisError> {
    if !(strain_pct >= 0.0) || !strain_pct.is_finite() {
        return Err(AnalysisError::InvalidInput(format!("strain must be >= 0, got {strain_pct}")));
    }
    if !(safety_factor >= 1.0) || !safety_factor.is_finite() {
        return Err(AnalysisError::InvalidInput(format!("safety factor must be >= 1, got {safety_factor}")));
    }
    let demand_pct = strain_pct * safety_factor;
    let limit_pct = mat.min_elongation_pct();
    Ok(StrainBudget { pass: demand_pct <= limit_pct, demand_pct, limit_pct, margin_pct: limit_pct - demand_pct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flx9870() -> MaterialSpec {
        MaterialDb::bundled().get("FLX9870").unwrap().clone()
    }

    #[test]
    fn bundled_table() {
        let db = MaterialDb::bundled();
        assert_eq!(db.names().collect::<Vec<_>>(), ["FLX9850", "FLX9870", "FLX9885"]);
        assert_eq!(db.get("FLX9885").unwrap().elongation_at_break_pct, [70.0, 90.0]);
        assert!(matches!(db.get("FLX9999"), Err(AnalysisError::UnknownMaterial(_))));
        assert!(matches!(
            mooney_rivlin_uniaxial(1.2, db.get("FLX9850").unwrap()),
            Err(AnalysisError::MissingConstants(_))
        ));
    }

    #[test]
    fn stress_reference_points() {
        let m = flx9870();
        assert_eq!(mooney_rivlin_uniaxial(1.0, &m).unwrap(), 0.0);
        assert!((mooney_rivlin_uniaxial(1.43, &m).unwrap() - 0.628).abs() < 1e-3);
        assert!(matches!(mooney_rivlin_uniaxial(0.0, &m), Err(AnalysisError::NonPositiveStretch(_))));
    }

    #[test]
    fn strain_budget() {
        let m = flx9870();
        let r = strain_budget_check(43.0, &m, 1.0).unwrap();
        assert!(r.pass && r.margin_pct == 77.0);
        assert!(strain_budget_check(30.0, &m, 1.0).unwrap().pass);
        assert!(!strain_budget_check(130.0, &m, 1.0).unwrap().pass);
        assert!(!strain_budget_check(43.0, &m, 3.0).unwrap().pass);
        assert!(strain_budget_check(43.0, &m, 0.5).is_err());
    }

    #[test]
    fn invalid_entries_are_rejected() {
        let text = r#"{"X": {"shore_hardness_a": [1, 2], "elongation_at_break_pct": [5, 1]}}"#;
        assert!(matches!(MaterialDb::parse(text), Err(AnalysisError::InvalidMaterial { .. })));
        let text = r#"{"X": {"shore_hardness_a": [1, 2], "elongation_at_break_pct": [1, 5],
            "mooney_rivlin": {"c10_mpa": 1, "c01_mpa": 0, "poisson_ratio": 0.7}}}"#;
        assert!(matches!(MaterialDb::parse(text), Err(AnalysisError::InvalidMaterial { .. })));
        assert!(matches!(MaterialDb::parse(r#"{"X": {"shore": 1}}"#), Err(AnalysisError::Database(_))));
    }

    proptest! {
        #[test]
        fn stress_sign_follows_stretch(lambda in 0.05f64..20.0) {
            let s = mooney_rivlin_uniaxial(lambda, &flx9870()).unwrap();
            prop_assert_eq!(s.partial_cmp(&0.0), lambda.partial_cmp(&1.0));
        }

        #[test]
        fn budget_is_monotone(a in 0.0f64..300.0, b in 0.0f64..300.0, f in 1.0f64..4.0) {
            let m = flx9870();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (p_lo, p_hi) = (strain_budget_check(lo, &m, f).unwrap().pass, strain_budget_check(hi, &m, f).unwrap().pass);
            prop_assert!(!(p_hi && !p_lo));
        }
    }
}
