use serde::{Deserialize, Serialize};

use crate::linkage::spec::StageTag;
use crate::linkage::{MechanismGraph, ValidationError};

/// Which part of the armwing a fit addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Humerus,
    Radius,
    All,
}

impl Stage {
    /// Angle outputs compared against their targets.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Humerus => &["shoulder"],
            Stage::Radius => &["elbow"],
            Stage::All => &["shoulder", "elbow"],
        }
    }

    pub fn frees(self, tag: StageTag) -> bool {
        match self {
            Stage::Humerus => tag == StageTag::Humerus,
            Stage::Radius => tag == StageTag::Radius,
            Stage::All => tag != StageTag::Fixed,
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "humerus" => Ok(Stage::Humerus),
            "radius" => Ok(Stage::Radius),
            "all" => Ok(Stage::All),
            other => Err(format!("unknown stage `{other}` (expected humerus, radius or all)")),
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Humerus => "humerus",
            Stage::Radius => "radius",
            Stage::All => "all",
        })
    }
}

/// The mechanism's parameter table as parallel arrays. Values in mm or
/// radians, in the mechanism's declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub stages: Vec<StageTag>,
}

impl DesignVector {
    pub fn from_mechanism(mech: &MechanismGraph) -> Self {
        let table = mech.parameter_table();
        DesignVector {
            names: table.iter().map(|p| p.name.clone()).collect(),
            values: table.iter().map(|p| p.value).collect(),
            lower: table.iter().map(|p| p.min).collect(),
            upper: table.iter().map(|p| p.max).collect(),
            stages: table.iter().map(|p| p.stage).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    /// Indices of entries a stage may move.
    pub fn free_indices(&self, stage: Stage) -> Vec<usize> {
        (0..self.len()).filter(|&i| stage.frees(self.stages[i])).collect()
    }

    pub fn within_bounds(&self) -> bool {
        (0..self.len()).all(|i| self.lower[i] <= self.values[i] && self.values[i] <= self.upper[i])
    }

    /// Writes every value back into a copy of `mech`.
    pub fn apply(&self, mech: &MechanismGraph) -> Result<MechanismGraph, ValidationError> {
        mech.with_parameters(self.names.iter().map(String::as_str).zip(self.values.iter().copied()))
    }
}
