//! Reflection across the body y axis (`x -> -x`).
//!
//! A body at `(x, y, theta)` reflects to `(-x, y, pi - theta)` once its local
//! `v` coordinates are negated; ground keeps angle 0 and only its pivots
//! move. Relative joint angles therefore map to `kappa - angle`, where
//! `kappa = pi * ([a is ground] - [b is ground])`, which fixes how driver,
//! gear and output offsets transform. Dyad branches swap sides.

use std::collections::BTreeMap;

use super::graph::MechanismGraph;
use super::spec::{self, GearCoupling, LinkageSpec, ParameterBounds, SymmetryConstraint, GROUND};

fn is_ground_ref(reference: &str) -> bool {
    spec::split_ref(reference).is_some_and(|(link, _)| link == GROUND)
}

/// `kappa` in degrees for a joint id of `spec`.
fn joint_kappa(spec: &LinkageSpec, joint: &str) -> f64 {
    spec.joints
        .iter()
        .find(|j| j.id == joint)
        .map_or(0.0, |j| 180.0 * (is_ground_ref(&j.a) as i32 - is_ground_ref(&j.b) as i32) as f64)
}

fn flip_bounds(b: &ParameterBounds, center: f64) -> ParameterBounds {
    ParameterBounds { min: center - b.max, max: center - b.min, stage: b.stage }
}

/// Reflects a spec. Applying it twice restores the original values.
pub fn mirror_spec(src: &LinkageSpec) -> LinkageSpec {
    let mut out = src.clone();
    for p in &mut out.pivots {
        p.x = -p.x;
    }
    for l in &mut out.links {
        for p in &mut l.points {
            p.v = -p.v;
        }
    }
    for j in &mut out.joints {
        j.branch = j.branch.map(|b| b.flipped());
    }
    let mut offset_centers: BTreeMap<String, f64> = BTreeMap::new();
    if let Some(d) = &mut out.driver {
        let kappa = joint_kappa(src, &d.joint);
        d.direction = -d.direction;
        d.offset_deg = kappa - d.offset_deg;
        offset_centers.insert("driver.offset".into(), kappa);
    }
    for g in &mut out.gears {
        let kappa = joint_kappa(src, &g.output) - g.ratio * joint_kappa(src, &g.input);
        g.offset_deg = kappa - g.offset_deg;
        offset_centers.insert(format!("gear.{}.offset", g.id), kappa);
    }
    for o in &mut out.outputs.angles {
        let kappa = 180.0 * ((o.from == GROUND) as i32 - (o.to == GROUND) as i32) as f64;
        o.offset_deg += o.sense * kappa;
        o.sense = -o.sense;
    }
    for (name, b) in out.parameters.iter_mut() {
        if (name.starts_with("pivot.") && name.ends_with(".x")) || (name.starts_with("link.") && name.ends_with(".v")) {
            *b = flip_bounds(b, 0.0);
        } else if let Some(&c) = offset_centers.get(name) {
            *b = flip_bounds(b, c);
        }
    }
    for c in &mut out.constraints {
        match c {
            SymmetryConstraint::PivotX { value, .. } => *value = -*value,
            SymmetryConstraint::LinkAngle { angle_deg, .. } => *angle_deg = 180.0 - *angle_deg,
        }
    }
    if let Some(home) = &mut out.home {
        for pose in home.poses.values_mut() {
            pose.x = -pose.x;
            pose.angle_deg = 180.0 - pose.angle_deg;
        }
    }
    out
}

pub fn mirror_mechanism(mech: &MechanismGraph) -> MechanismGraph {
    MechanismGraph::new(mirror_spec(mech.spec())).expect("reflection preserves validity")
}

fn prefixed(spec: &LinkageSpec, prefix: &str) -> LinkageSpec {
    let rename_ref = |r: &str| match spec::split_ref(r) {
        Some((link, point)) if link == GROUND => format!("{GROUND}.{prefix}{point}"),
        Some((link, point)) => format!("{prefix}{link}.{point}"),
        None => r.to_string(),
    };
    let rename_body = |b: &str| if b == GROUND { b.to_string() } else { format!("{prefix}{b}") };
    let mut out = spec.clone();
    for p in &mut out.pivots {
        p.id = format!("{prefix}{}", p.id);
    }
    for l in &mut out.links {
        l.id = format!("{prefix}{}", l.id);
    }
    for j in &mut out.joints {
        j.id = format!("{prefix}{}", j.id);
        j.a = rename_ref(&j.a);
        j.b = rename_ref(&j.b);
    }
    if let Some(d) = &mut out.driver {
        d.joint = format!("{prefix}{}", d.joint);
    }
    for g in &mut out.gears {
        g.id = format!("{prefix}{}", g.id);
        g.input = format!("{prefix}{}", g.input);
        g.output = format!("{prefix}{}", g.output);
    }
    for o in &mut out.outputs.angles {
        o.name = format!("{prefix}{}", o.name);
        o.from = rename_body(&o.from);
        o.to = rename_body(&o.to);
    }
    for o in &mut out.outputs.points {
        o.name = format!("{prefix}{}", o.name);
        o.at = rename_ref(&o.at);
    }
    out.parameters = spec
        .parameters
        .iter()
        .map(|(name, b)| {
            let renamed = match name.split_once('.') {
                Some((kind, rest)) if kind != "driver" => format!("{kind}.{prefix}{rest}"),
                _ => name.clone(),
            };
            (renamed, b.clone())
        })
        .collect();
    out.aliases.clear();
    for c in &mut out.constraints {
        match c {
            SymmetryConstraint::PivotX { pivot, .. } => *pivot = format!("{prefix}{pivot}"),
            SymmetryConstraint::LinkAngle { link, .. } => *link = format!("{prefix}{link}"),
        }
    }
    if let Some(home) = &mut out.home {
        home.poses = home.poses.iter().map(|(k, v)| (format!("{prefix}{k}"), *v)).collect();
    }
    out
}

/// Builds a two-wing mechanism: the given wing (prefixed `right_`) and its
/// reflection (prefixed `left_`). The left driver joint is slaved to the
/// right one through an external mesh of ratio -1, so a single phase drives
/// both wings with mirror-symmetric outputs.
pub fn bilateral(mech: &MechanismGraph) -> MechanismGraph {
    let right = prefixed(mech.spec(), "right_");
    let mut left = prefixed(&mirror_spec(mech.spec()), "left_");
    let mut out = right.clone();
    out.name = format!("{}-bilateral", mech.spec().name);
    let driver = right.driver.as_ref().expect("validated mechanisms have a driver");
    let left_driver = left.driver.take().expect("validated mechanisms have a driver");
    // kappa of the left driver joint: its offset is kappa - right offset.
    let kappa = joint_kappa(&left, &left_driver.joint);
    // the left driver parameter is replaced by the coupling below
    left.parameters.remove("driver.offset");
    out.pivots.extend(left.pivots);
    out.links.extend(left.links);
    out.joints.extend(left.joints);
    out.gears.push(GearCoupling {
        id: "center_mesh".into(),
        input: driver.joint.clone(),
        output: left_driver.joint,
        ratio: -1.0,
        offset_deg: kappa,
    });
    out.gears.extend(left.gears);
    out.outputs.angles.extend(left.outputs.angles);
    out.outputs.points.extend(left.outputs.points);
    out.parameters.extend(left.parameters);
    out.constraints.extend(left.constraints);
    if let (Some(h), Some(lh)) = (&mut out.home, left.home) {
        h.poses.extend(lh.poses);
    }
    MechanismGraph::new(out).expect("a mirrored pair of valid wings is valid")
}
