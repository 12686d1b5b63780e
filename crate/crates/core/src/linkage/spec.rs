//! Declarative description of a planar linkage, as stored in mechanism files.
//!
//! Lengths and coordinates are millimetres, angles are degrees. Every link
//! has two implicit points, `a` at the link origin and `b` at `(length, 0)`;
//! further points are given in link-local `(u, v)` coordinates. Ground
//! pivots are addressed as `ground.<pivot id>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fourbar::{Branch, FourBar};

pub const FORMAT_VERSION: u32 = 1;
pub const GROUND: &str = "ground";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkageSpec {
    pub format_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub pivots: Vec<Pivot>,
    pub links: Vec<Link>,
    pub joints: Vec<Joint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver: Option<Driver>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gears: Vec<GearCoupling>,
    #[serde(default)]
    pub outputs: Outputs,
    /// Bounds and stage tags keyed by parameter name. Parameters not listed
    /// are fixed at their current value.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, ParameterBounds>,
    /// Short names (e.g. `l4`) for parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<SymmetryConstraint>,
    /// Starting pose for mechanisms that cannot be assembled dyad by dyad.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home: Option<HomePose>,
}

impl LinkageSpec {
    /// A lone four-bar with the crank driven directly (`phase` = crank
    /// angle). Outputs: `shoulder`, the absolute rocker angle, and
    /// `wingtip`, the coupler/rocker joint. No parameter bounds.
    pub fn four_bar(fb: &FourBar) -> LinkageSpec {
        let pivot = |id: &str, [x, y]: [f64; 2]| Pivot { id: id.into(), x, y };
        let link = |id: &str, length: f64| Link { id: id.into(), length, points: Vec::new() };
        let joint = |id: &str, a: &str, b: &str, branch: Option<Branch>| Joint {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            branch,
        };
        LinkageSpec {
            format_version: FORMAT_VERSION,
            name: "four-bar".into(),
            description: String::new(),
            pivots: vec![pivot("crank", [0.0, 0.0]), pivot("rocker", fb.rocker_pivot())],
            links: vec![link("crank", fb.crank), link("coupler", fb.coupler), link("rocker", fb.rocker)],
            joints: vec![
                joint("crank", "ground.crank", "crank.a", None),
                joint("crank_pin", "crank.b", "coupler.a", None),
                joint("rocker", "ground.rocker", "rocker.a", None),
                joint("close", "coupler.b", "rocker.b", Some(fb.branch)),
            ],
            driver: Some(Driver { joint: "crank".into(), direction: 1.0, offset_deg: 0.0 }),
            gears: Vec::new(),
            outputs: Outputs {
                angles: vec![AngleOutput {
                    name: "shoulder".into(),
                    from: GROUND.into(),
                    to: "rocker".into(),
                    sense: 1.0,
                    offset_deg: 0.0,
                }],
                points: vec![PointOutput { name: "wingtip".into(), at: "rocker.b".into() }],
            },
            parameters: BTreeMap::new(),
            aliases: BTreeMap::new(),
            constraints: Vec::new(),
            home: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pivot {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub id: String,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<LocalPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalPoint {
    pub name: String,
    pub u: f64,
    pub v: f64,
}

/// Revolute joint between `a` and `b`, each written `link.point`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Joint {
    pub id: String,
    pub a: String,
    pub b: String,
    /// Required on joints that close a loop during assembly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

/// The driven joint angle (angle of `b` minus angle of `a`) equals
/// `direction * phase + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Driver {
    pub joint: String,
    #[serde(default = "one")]
    pub direction: f64,
    #[serde(default)]
    pub offset_deg: f64,
}

fn one() -> f64 {
    1.0
}

/// `angle(output joint) = ratio * angle(input joint) + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GearCoupling {
    pub id: String,
    pub input: String,
    pub output: String,
    pub ratio: f64,
    #[serde(default)]
    pub offset_deg: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub angles: Vec<AngleOutput>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointOutput>,
}

/// Reported angle `sense * (angle(to) - angle(from)) + offset`, wrapped to
/// (-180, 180]. `from` may be `ground`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleOutput {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default = "one")]
    pub sense: f64,
    #[serde(default)]
    pub offset_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointOutput {
    pub name: String,
    pub at: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StageTag {
    Humerus,
    Radius,
    #[default]
    Fixed,
}

/// Bounds in file units (mm, or degrees for offsets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBounds {
    pub min: f64,
    pub max: f64,
    #[serde(default)]
    pub stage: StageTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymmetryConstraint {
    /// Pivot x coordinate pinned to `value` mm.
    PivotX { pivot: String, value: f64 },
    /// Absolute link angle at a given phase pinned to `angle_deg`.
    LinkAngle { link: String, phase_deg: f64, angle_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomePose {
    pub phase_deg: f64,
    pub poses: BTreeMap<String, LinkPose>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkPose {
    pub x: f64,
    pub y: f64,
    pub angle_deg: f64,
}

/// Splits `link.point` into its two halves.
pub fn split_ref(reference: &str) -> Option<(&str, &str)> {
    let (link, point) = reference.split_once('.')?;
    if link.is_empty() || point.is_empty() {
        return None;
    }
    Some((link, point))
}
