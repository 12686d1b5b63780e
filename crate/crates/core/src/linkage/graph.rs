//! Validated, indexed form of a [`LinkageSpec`].
//!
//! Every moving link is a rigid body with pose `(x, y, angle)`. Revolute
//! joints contribute two closure equations each. Angles fixed by the driver
//! or by gear couplings are eliminated as affine functions of the phase and
//! of the remaining free angles, so the Newton system is square.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::error::ValidationError;
use super::spec::{self, LinkageSpec, StageTag, SymmetryConstraint, GROUND};
use crate::fourbar::Branch;
use crate::geom::{self, Vec2};

pub(crate) const GROUND_BODY: usize = 0;

#[derive(Debug, Clone)]
pub(crate) struct Body {
    pub id: String,
    pub points: BTreeMap<String, Vec2>,
}

#[derive(Debug, Clone)]
pub(crate) struct JointModel {
    pub id: String,
    pub a: usize,
    pub pa: Vec2,
    pub b: usize,
    pub pb: Vec2,
    pub branch: Option<Branch>,
}

/// `phase * phi + constant + sum(coef * state[idx])`.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Affine {
    pub phase: f64,
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl Affine {
    fn scaled(&self, k: f64) -> Affine {
        Affine {
            phase: self.phase * k,
            constant: self.constant * k,
            terms: self.terms.iter().map(|&(i, c)| (i, c * k)).collect(),
        }
    }

    fn add(&mut self, other: &Affine) {
        self.phase += other.phase;
        self.constant += other.constant;
        for &(i, c) in &other.terms {
            match self.terms.iter_mut().find(|(j, _)| *j == i) {
                Some(t) => t.1 += c,
                None => self.terms.push((i, c)),
            }
        }
    }

    pub fn eval(&self, state: &[f64], phase: f64) -> f64 {
        self.terms.iter().fold(self.phase * phase + self.constant, |acc, &(i, c)| acc + c * state[i])
    }
}

#[derive(Debug, Clone)]
pub(crate) enum AngleVar {
    Ground,
    Free(usize),
    Imposed(Affine),
}

#[derive(Debug, Clone)]
pub(crate) struct BodyState {
    pub x: usize,
    pub y: usize,
    pub angle: AngleVar,
}

#[derive(Debug, Clone)]
pub(crate) struct Anchor {
    pub known_body: usize,
    pub known_local: Vec2,
    pub anchor_local: Vec2,
    pub mid_local: Vec2,
    pub arm: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Dyad {
    pub mid: usize,
    pub first: usize,
    pub second: usize,
    pub first_anchor: Anchor,
    pub second_anchor: Anchor,
    pub side: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    /// Body with an imposed angle hung from a placed body.
    Rotating { body: usize, known_body: usize, known_local: Vec2, local: Vec2 },
    Dyad(Dyad),
}

#[derive(Debug, Clone)]
pub(crate) struct AngleOutputModel {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub sense: f64,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct PointOutputModel {
    pub name: String,
    pub body: usize,
    pub local: Vec2,
}

/// Which scalar of the linkage description a parameter addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ParamTarget {
    PivotX(usize),
    PivotY(usize),
    LinkLength(usize),
    PointU(usize, usize),
    PointV(usize, usize),
    DriverOffset,
    GearOffset(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterInfo {
    pub name: String,
    /// Current value; mm, or radians for angular parameters.
    pub value: f64,
    pub min: f64,
    pub max: f64,
    pub stage: StageTag,
    pub angular: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct ParamDef {
    pub name: String,
    pub target: ParamTarget,
    pub angular: bool,
}

/// Ordered joint cycle of the body graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loop {
    pub joints: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct MechanismGraph {
    pub(crate) spec: LinkageSpec,
    pub(crate) bodies: Vec<Body>,
    pub(crate) joints: Vec<JointModel>,
    pub(crate) states: Vec<BodyState>,
    pub(crate) n_state: usize,
    pub(crate) plan: Option<Vec<Step>>,
    pub(crate) home_state: Option<Vec<f64>>,
    pub(crate) angle_outputs: Vec<AngleOutputModel>,
    pub(crate) point_outputs: Vec<PointOutputModel>,
    pub(crate) params: Vec<ParamDef>,
    pub(crate) loops: Vec<Loop>,
}

fn unknown(reference: &str, context: impl Into<String>) -> ValidationError {
    ValidationError::UnknownReference { reference: reference.to_string(), context: context.into() }
}

/// Validates a spec and builds its indexed graph.
pub fn validate_mechanism(spec: LinkageSpec) -> Result<MechanismGraph, ValidationError> {
    MechanismGraph::new(spec)
}

impl MechanismGraph {
    pub fn new(spec: LinkageSpec) -> Result<Self, ValidationError> {
        let mut ids = HashSet::new();
        let mut check_id = |id: &str| -> Result<(), ValidationError> {
            if id.is_empty() || id.contains('.') || !ids.insert(id.to_string()) {
                return Err(ValidationError::DuplicateId(id.to_string()));
            }
            Ok(())
        };
        check_id(GROUND)?;
        for l in &spec.links {
            check_id(&l.id)?;
        }

        // bodies
        let mut bodies = vec![Body {
            id: GROUND.to_string(),
            points: BTreeMap::new(),
        }];
        let mut pivot_ids = HashSet::new();
        for p in &spec.pivots {
            if !pivot_ids.insert(p.id.as_str()) || p.id.contains('.') {
                return Err(ValidationError::DuplicateId(format!("{GROUND}.{}", p.id)));
            }
            finite(&format!("pivots.{}", p.id), p.x)?;
            finite(&format!("pivots.{}", p.id), p.y)?;
            bodies[0].points.insert(p.id.clone(), [p.x, p.y]);
        }
        for l in &spec.links {
            if !(l.length > 0.0) || !l.length.is_finite() {
                return Err(ValidationError::NonPositiveLength { link: l.id.clone(), length: l.length });
            }
            let mut points = BTreeMap::new();
            points.insert("a".to_string(), [0.0, 0.0]);
            points.insert("b".to_string(), [l.length, 0.0]);
            for p in &l.points {
                finite(&format!("links.{}.{}", l.id, p.name), p.u)?;
                finite(&format!("links.{}.{}", l.id, p.name), p.v)?;
                if points.insert(p.name.clone(), [p.u, p.v]).is_some() || p.name.contains('.') {
                    return Err(ValidationError::DuplicateId(format!("{}.{}", l.id, p.name)));
                }
            }
            bodies.push(Body { id: l.id.clone(), points });
        }
        let body_index: HashMap<&str, usize> = bodies.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect();
        let resolve = |reference: &str, context: &str| -> Result<(usize, Vec2), ValidationError> {
            let (link, point) = spec::split_ref(reference).ok_or_else(|| unknown(reference, context))?;
            let &bi = body_index.get(link).ok_or_else(|| unknown(reference, context))?;
            let &local = bodies[bi].points.get(point).ok_or_else(|| unknown(reference, context))?;
            Ok((bi, local))
        };

        // joints
        let mut joint_ids = HashSet::new();
        let mut joints = Vec::with_capacity(spec.joints.len());
        for j in &spec.joints {
            if !joint_ids.insert(j.id.as_str()) {
                return Err(ValidationError::DuplicateId(j.id.clone()));
            }
            let ctx = format!("joint `{}`", j.id);
            let (a, pa) = resolve(&j.a, &ctx)?;
            let (b, pb) = resolve(&j.b, &ctx)?;
            if a == b {
                return Err(ValidationError::InvalidValue {
                    field: format!("joints.{}", j.id),
                    reason: "joint connects a body to itself".into(),
                });
            }
            joints.push(JointModel { id: j.id.clone(), a, pa, b, pb, branch: j.branch });
        }
        let joint_index: HashMap<&str, usize> = joints.iter().enumerate().map(|(i, j)| (j.id.as_str(), i)).collect();

        // angle impositions: (body, expression over body angles)
        let driver = spec.driver.as_ref().ok_or(ValidationError::MissingDriver)?;
        let &driver_joint =
            joint_index.get(driver.joint.as_str()).ok_or_else(|| unknown(&driver.joint, "driver"))?;
        if driver.direction == 0.0 || !driver.direction.is_finite() {
            return Err(ValidationError::InvalidValue {
                field: "driver.direction".into(),
                reason: "must be nonzero".into(),
            });
        }
        finite("driver.offset_deg", driver.offset_deg)?;
        // body-angle affine: phase, constant, terms over body indices
        let mut imposed: BTreeMap<usize, (f64, f64, Vec<(usize, f64)>)> = BTreeMap::new();
        let mut impose = |joint: usize,
                          phase: f64,
                          constant: f64,
                          mut terms: Vec<(usize, f64)>|
         -> Result<(), ValidationError> {
            let j = &joints[joint];
            // angle(b) - angle(a) = rhs
            let (target, other, sign) = if j.b != GROUND_BODY {
                (j.b, j.a, 1.0)
            } else if j.a != GROUND_BODY {
                (j.a, j.b, -1.0)
            } else {
                return Err(ValidationError::ImposedGroundJoint { joint: j.id.clone() });
            };
            for t in terms.iter_mut() {
                t.1 *= sign;
            }
            terms.push((other, 1.0));
            if imposed.insert(target, (phase * sign, constant * sign, terms)).is_some() {
                return Err(ValidationError::OverImposed { link: bodies[target].id.clone() });
            }
            Ok(())
        };
        impose(driver_joint, driver.direction, driver.offset_deg.to_radians(), Vec::new())?;
        let mut gear_ids = HashSet::new();
        for g in &spec.gears {
            if !gear_ids.insert(g.id.as_str()) {
                return Err(ValidationError::DuplicateId(g.id.clone()));
            }
            if g.ratio == 0.0 || !g.ratio.is_finite() {
                return Err(ValidationError::ZeroRatio { gear: g.id.clone() });
            }
            finite(&format!("gears.{}.offset_deg", g.id), g.offset_deg)?;
            let ctx = format!("gear `{}`", g.id);
            let &ji = joint_index.get(g.input.as_str()).ok_or_else(|| unknown(&g.input, &ctx))?;
            let &jo = joint_index.get(g.output.as_str()).ok_or_else(|| unknown(&g.output, &ctx))?;
            let jin = &joints[ji];
            impose(jo, 0.0, g.offset_deg.to_radians(), vec![(jin.b, g.ratio), (jin.a, -g.ratio)])?;
        }

        // state layout
        let mut n_state = 0;
        let mut states = Vec::with_capacity(bodies.len());
        states.push(BodyState { x: usize::MAX, y: usize::MAX, angle: AngleVar::Ground });
        for bi in 1..bodies.len() {
            let x = n_state;
            let y = n_state + 1;
            n_state += 2;
            let angle = if imposed.contains_key(&bi) {
                AngleVar::Imposed(Affine::default())
            } else {
                n_state += 1;
                AngleVar::Free(n_state - 1)
            };
            states.push(BodyState { x, y, angle });
        }
        // resolve impositions into state-space affines
        let mut resolved: HashMap<usize, Affine> = HashMap::new();
        fn resolve_angle(
            body: usize,
            states: &[BodyState],
            imposed: &BTreeMap<usize, (f64, f64, Vec<(usize, f64)>)>,
            resolved: &mut HashMap<usize, Affine>,
            visiting: &mut Vec<usize>,
            bodies: &[Body],
        ) -> Result<Affine, ValidationError> {
            match &states[body].angle {
                AngleVar::Ground => return Ok(Affine::default()),
                AngleVar::Free(i) => return Ok(Affine { terms: vec![(*i, 1.0)], ..Affine::default() }),
                AngleVar::Imposed(_) => {}
            }
            if let Some(a) = resolved.get(&body) {
                return Ok(a.clone());
            }
            if visiting.contains(&body) {
                return Err(ValidationError::CouplingCycle { link: bodies[body].id.clone() });
            }
            visiting.push(body);
            let (phase, constant, terms) = &imposed[&body];
            let mut out = Affine { phase: *phase, constant: *constant, terms: Vec::new() };
            for &(other, coef) in terms {
                let sub = resolve_angle(other, states, imposed, resolved, visiting, bodies)?;
                out.add(&sub.scaled(coef));
            }
            out.terms.retain(|&(_, c)| c != 0.0);
            visiting.pop();
            resolved.insert(body, out.clone());
            Ok(out)
        }
        for &body in imposed.keys() {
            let aff = resolve_angle(body, &states, &imposed, &mut resolved, &mut Vec::new(), &bodies)?;
            states[body].angle = AngleVar::Imposed(aff);
        }

        let equations = 2 * joints.len();
        if n_state != equations {
            return Err(ValidationError::DegreesOfFreedom { unknowns: n_state, equations });
        }

        let loops = find_loops(bodies.len(), &joints);
        if loops.is_empty() {
            return Err(ValidationError::OpenChain);
        }

        // outputs
        let mut angle_outputs = Vec::new();
        let mut output_names = HashSet::new();
        for o in &spec.outputs.angles {
            if !output_names.insert(("angle", o.name.as_str())) {
                return Err(ValidationError::DuplicateId(o.name.clone()));
            }
            let ctx = format!("output `{}`", o.name);
            let &from = body_index.get(o.from.as_str()).ok_or_else(|| unknown(&o.from, &ctx))?;
            let &to = body_index.get(o.to.as_str()).ok_or_else(|| unknown(&o.to, &ctx))?;
            finite(&format!("outputs.{}.sense", o.name), o.sense)?;
            angle_outputs.push(AngleOutputModel {
                name: o.name.clone(),
                from,
                to,
                sense: o.sense,
                offset: o.offset_deg.to_radians(),
            });
        }
        let mut point_outputs = Vec::new();
        for o in &spec.outputs.points {
            if !output_names.insert(("point", o.name.as_str())) {
                return Err(ValidationError::DuplicateId(o.name.clone()));
            }
            let (body, local) = resolve(&o.at, &format!("output `{}`", o.name))?;
            point_outputs.push(PointOutputModel { name: o.name.clone(), body, local });
        }
        let driven = reachable_from_driver(&joints, &spec, &joint_index, driver_joint);
        for o in &angle_outputs {
            for body in [o.from, o.to] {
                if body != GROUND_BODY && !driven.contains(&body) {
                    return Err(ValidationError::DanglingOutput { output: o.name.clone() });
                }
            }
        }
        for o in &point_outputs {
            if o.body != GROUND_BODY && !driven.contains(&o.body) {
                return Err(ValidationError::DanglingOutput { output: o.name.clone() });
            }
        }

        for c in &spec.constraints {
            match c {
                SymmetryConstraint::PivotX { pivot, value } => {
                    if !bodies[0].points.contains_key(pivot) {
                        return Err(unknown(pivot, "constraint"));
                    }
                    finite("constraints.value", *value)?;
                }
                SymmetryConstraint::LinkAngle { link, .. } => {
                    if !body_index.contains_key(link.as_str()) || link == GROUND {
                        return Err(unknown(link, "constraint"));
                    }
                }
            }
        }

        let mut graph = MechanismGraph {
            params: param_defs(&spec),
            spec,
            bodies,
            joints,
            states,
            n_state,
            plan: None,
            home_state: None,
            angle_outputs,
            point_outputs,
            loops,
        };
        graph.plan = graph.build_plan()?;
        graph.home_state = graph.home_state_from_spec()?;
        if graph.plan.is_none() && graph.home_state.is_none() {
            return Err(ValidationError::NoInitialGuess);
        }
        graph.check_parameter_table()?;
        Ok(graph)
    }

    pub fn spec(&self) -> &LinkageSpec {
        &self.spec
    }

    pub fn into_spec(self) -> LinkageSpec {
        self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn link_ids(&self) -> impl Iterator<Item = &str> {
        self.bodies[1..].iter().map(|b| b.id.as_str())
    }

    pub fn angle_output_names(&self) -> impl Iterator<Item = &str> {
        self.angle_outputs.iter().map(|o| o.name.as_str())
    }

    pub fn point_output_names(&self) -> impl Iterator<Item = &str> {
        self.point_outputs.iter().map(|o| o.name.as_str())
    }

    /// True when every pose can be built dyad by dyad in closed form.
    pub fn is_dyad_decomposable(&self) -> bool {
        self.plan.is_some()
    }

    pub(crate) fn body_angle(&self, body: usize, state: &[f64], phase: f64) -> f64 {
        match &self.states[body].angle {
            AngleVar::Ground => 0.0,
            AngleVar::Free(i) => state[*i],
            AngleVar::Imposed(a) => a.eval(state, phase),
        }
    }

    pub(crate) fn body_origin(&self, body: usize, state: &[f64]) -> Vec2 {
        if body == GROUND_BODY {
            [0.0, 0.0]
        } else {
            let s = &self.states[body];
            [state[s.x], state[s.y]]
        }
    }

    pub(crate) fn world_point(&self, body: usize, local: Vec2, state: &[f64], phase: f64) -> Vec2 {
        if body == GROUND_BODY {
            return local;
        }
        geom::add(self.body_origin(body, state), geom::rotate(local, self.body_angle(body, state, phase)))
    }

    fn build_plan(&self) -> Result<Option<Vec<Step>>, ValidationError> {
        let n = self.bodies.len();
        let mut known = vec![false; n];
        known[GROUND_BODY] = true;
        let mut state_owner = vec![usize::MAX; self.n_state];
        for (bi, s) in self.states.iter().enumerate().skip(1) {
            if let AngleVar::Free(i) = s.angle {
                state_owner[i] = bi;
            }
        }
        let mut steps = Vec::new();
        let anchor_to_known = |body: usize, skip: usize, known: &[bool]| -> Option<(usize, usize, Vec2, Vec2)> {
            self.joints.iter().enumerate().find_map(|(ji, j)| {
                if ji == skip {
                    return None;
                }
                if j.a == body && known[j.b] {
                    Some((ji, j.b, j.pb, j.pa))
                } else if j.b == body && known[j.a] {
                    Some((ji, j.a, j.pa, j.pb))
                } else {
                    None
                }
            })
        };
        loop {
            let mut progress = false;
            for bi in 1..n {
                if known[bi] {
                    continue;
                }
                if let AngleVar::Imposed(aff) = &self.states[bi].angle {
                    if aff.terms.iter().all(|&(i, _)| known[state_owner[i]]) {
                        if let Some((_, known_body, known_local, local)) = anchor_to_known(bi, usize::MAX, &known) {
                            steps.push(Step::Rotating { body: bi, known_body, known_local, local });
                            known[bi] = true;
                            progress = true;
                        }
                    }
                }
            }
            for (mi, mj) in self.joints.iter().enumerate() {
                let (first, second) = (mj.a, mj.b);
                if known[first] || known[second] {
                    continue;
                }
                let free = |b: usize| matches!(self.states[b].angle, AngleVar::Free(_));
                if !free(first) || !free(second) {
                    continue;
                }
                let (Some(fa), Some(sa)) = (anchor_to_known(first, mi, &known), anchor_to_known(second, mi, &known))
                else {
                    continue;
                };
                let branch = mj.branch.ok_or_else(|| ValidationError::MissingBranch { joint: mj.id.clone() })?;
                let make = |(_, known_body, known_local, anchor_local): (usize, usize, Vec2, Vec2),
                            mid_local: Vec2,
                            body: usize|
                 -> Result<Anchor, ValidationError> {
                    let arm = geom::norm(geom::sub(mid_local, anchor_local));
                    if !(arm > 0.0) {
                        return Err(ValidationError::DegenerateDyad { link: self.bodies[body].id.clone() });
                    }
                    Ok(Anchor { known_body, known_local, anchor_local, mid_local, arm })
                };
                let first_anchor = make(fa, mj.pa, first)?;
                let second_anchor = make(sa, mj.pb, second)?;
                steps.push(Step::Dyad(Dyad {
                    mid: mi,
                    first,
                    second,
                    first_anchor,
                    second_anchor,
                    side: branch.side(),
                }));
                known[first] = true;
                known[second] = true;
                progress = true;
            }
            if known.iter().all(|&k| k) {
                return Ok(Some(steps));
            }
            if !progress {
                return Ok(None);
            }
        }
    }

    fn home_state_from_spec(&self) -> Result<Option<Vec<f64>>, ValidationError> {
        let Some(home) = &self.spec.home else { return Ok(None) };
        let mut state = vec![0.0; self.n_state];
        for (bi, b) in self.bodies.iter().enumerate().skip(1) {
            let pose = home.poses.get(&b.id).ok_or_else(|| unknown(&b.id, "home pose"))?;
            let s = &self.states[bi];
            state[s.x] = pose.x;
            state[s.y] = pose.y;
            if let AngleVar::Free(i) = s.angle {
                state[i] = pose.angle_deg.to_radians();
            }
        }
        Ok(Some(state))
    }

    // ---- parameters -------------------------------------------------

    fn param_value(&self, def: &ParamDef) -> f64 {
        let s = &self.spec;
        match def.target {
            ParamTarget::PivotX(i) => s.pivots[i].x,
            ParamTarget::PivotY(i) => s.pivots[i].y,
            ParamTarget::LinkLength(i) => s.links[i].length,
            ParamTarget::PointU(l, p) => s.links[l].points[p].u,
            ParamTarget::PointV(l, p) => s.links[l].points[p].v,
            ParamTarget::DriverOffset => s.driver.as_ref().map_or(0.0, |d| d.offset_deg).to_radians(),
            ParamTarget::GearOffset(g) => s.gears[g].offset_deg.to_radians(),
        }
    }

    fn check_parameter_table(&self) -> Result<(), ValidationError> {
        for (name, bounds) in &self.spec.parameters {
            let def = self
                .params
                .iter()
                .find(|d| &d.name == name)
                .ok_or_else(|| ValidationError::UnknownParameter(name.clone()))?;
            let value = self.param_value(def);
            let (min, max) = internal_bounds(def, bounds.min, bounds.max);
            if !(min <= max) {
                return Err(ValidationError::InvalidValue {
                    field: format!("parameters.{name}"),
                    reason: "min exceeds max".into(),
                });
            }
            // tolerate round-off from degree/radian conversion
            let slack = 1e-12 * (1.0 + value.abs());
            if value < min - slack || value > max + slack {
                return Err(ValidationError::OutOfBounds { name: name.clone(), value, min, max });
            }
        }
        for (alias, target) in &self.spec.aliases {
            if !self.params.iter().any(|d| &d.name == target) {
                return Err(unknown(target, format!("alias `{alias}`")));
            }
        }
        Ok(())
    }

    /// Maps aliases to parameter names; names pass through unchanged.
    pub fn resolve_parameter<'a>(&'a self, name: &'a str) -> Result<&'a str, ValidationError> {
        let resolved = self.spec.aliases.get(name).map(String::as_str).unwrap_or(name);
        if self.params.iter().any(|d| d.name == resolved) {
            Ok(resolved)
        } else {
            Err(ValidationError::UnknownParameter(name.to_string()))
        }
    }

    /// Parameter map: name to current value (mm, or radians).
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        self.params.iter().map(|d| (d.name.clone(), self.param_value(d))).collect()
    }

    pub fn parameter_names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|d| d.name.as_str())
    }

    pub fn parameter(&self, name: &str) -> Result<f64, ValidationError> {
        let name = self.resolve_parameter(name)?;
        let def = self.params.iter().find(|d| d.name == name).expect("resolved");
        Ok(self.param_value(def))
    }

    /// Full parameter table in declaration order, with bounds and stage tags.
    pub fn parameter_table(&self) -> Vec<ParameterInfo> {
        self.params
            .iter()
            .map(|d| {
                let value = self.param_value(d);
                let (min, max, stage) = match self.spec.parameters.get(&d.name) {
                    Some(b) => {
                        let (min, max) = internal_bounds(d, b.min, b.max);
                        (min, max, b.stage)
                    }
                    None => (value, value, StageTag::Fixed),
                };
                ParameterInfo { name: d.name.clone(), value, min, max, stage, angular: d.angular }
            })
            .collect()
    }

    /// Returns a new graph with the named parameters replaced.
    pub fn with_parameters<'a, I>(&self, updates: I) -> Result<MechanismGraph, ValidationError>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut spec = self.spec.clone();
        for (name, value) in updates {
            let name = self.resolve_parameter(name)?;
            let def = self.params.iter().find(|d| d.name == name).expect("resolved");
            if !value.is_finite() {
                return Err(ValidationError::InvalidValue { field: name.to_string(), reason: "not finite".into() });
            }
            // untouched entries keep their file representation bit for bit
            if value != self.param_value(def) {
                write_param(&mut spec, def.target, value);
            }
        }
        MechanismGraph::new(spec)
    }

    pub fn with_parameter(&self, name: &str, value: f64) -> Result<MechanismGraph, ValidationError> {
        self.with_parameters([(name, value)])
    }

    /// Like `with_parameter`, but the fitting bounds of `name` are dropped
    /// first so perturbations may leave the optimisation box.
    pub fn with_parameter_unbounded(&self, name: &str, value: f64) -> Result<MechanismGraph, ValidationError> {
        let name = self.resolve_parameter(name)?;
        if !self.spec.parameters.contains_key(name) {
            return self.with_parameter(name, value);
        }
        let mut spec = self.spec.clone();
        spec.parameters.remove(name);
        MechanismGraph::new(spec)?.with_parameter(name, value)
    }
}

fn internal_bounds(def: &ParamDef, min: f64, max: f64) -> (f64, f64) {
    if def.angular {
        (min.to_radians(), max.to_radians())
    } else {
        (min, max)
    }
}

fn write_param(spec: &mut LinkageSpec, target: ParamTarget, value: f64) {
    match target {
        ParamTarget::PivotX(i) => spec.pivots[i].x = value,
        ParamTarget::PivotY(i) => spec.pivots[i].y = value,
        ParamTarget::LinkLength(i) => spec.links[i].length = value,
        ParamTarget::PointU(l, p) => spec.links[l].points[p].u = value,
        ParamTarget::PointV(l, p) => spec.links[l].points[p].v = value,
        ParamTarget::DriverOffset => {
            if let Some(d) = spec.driver.as_mut() {
                d.offset_deg = value.to_degrees();
            }
        }
        ParamTarget::GearOffset(g) => spec.gears[g].offset_deg = value.to_degrees(),
    }
}

fn param_defs(spec: &LinkageSpec) -> Vec<ParamDef> {
    let mut defs = Vec::new();
    let mut push = |name: String, target: ParamTarget, angular: bool| defs.push(ParamDef { name, target, angular });
    for (i, p) in spec.pivots.iter().enumerate() {
        push(format!("pivot.{}.x", p.id), ParamTarget::PivotX(i), false);
        push(format!("pivot.{}.y", p.id), ParamTarget::PivotY(i), false);
    }
    for (i, l) in spec.links.iter().enumerate() {
        push(format!("link.{}.length", l.id), ParamTarget::LinkLength(i), false);
        for (j, p) in l.points.iter().enumerate() {
            push(format!("link.{}.{}.u", l.id, p.name), ParamTarget::PointU(i, j), false);
            push(format!("link.{}.{}.v", l.id, p.name), ParamTarget::PointV(i, j), false);
        }
    }
    if spec.driver.is_some() {
        push("driver.offset".to_string(), ParamTarget::DriverOffset, true);
    }
    for (i, g) in spec.gears.iter().enumerate() {
        push(format!("gear.{}.offset", g.id), ParamTarget::GearOffset(i), true);
    }
    defs
}

fn finite(field: &str, value: f64) -> Result<(), ValidationError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::InvalidValue { field: field.to_string(), reason: "not finite".into() })
    }
}

/// Fundamental cycles of the body graph from a BFS spanning tree rooted at ground.
fn find_loops(n_bodies: usize, joints: &[JointModel]) -> Vec<Loop> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_bodies];
    for (ji, j) in joints.iter().enumerate() {
        adj[j.a].push((j.b, ji));
        adj[j.b].push((j.a, ji));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n_bodies];
    let mut depth = vec![usize::MAX; n_bodies];
    let mut tree_edge = vec![false; joints.len()];
    let mut queue = VecDeque::new();
    for root in 0..n_bodies {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(v, ji) in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some((u, ji));
                    tree_edge[ji] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut loops = Vec::new();
    for (ji, j) in joints.iter().enumerate() {
        if tree_edge[ji] {
            continue;
        }
        let (mut u, mut v) = (j.a, j.b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while u != v {
            if depth[u] >= depth[v] {
                let (p, e) = parent[u].expect("non-root");
                left.push(e);
                u = p;
            } else {
                let (p, e) = parent[v].expect("non-root");
                right.push(e);
                v = p;
            }
        }
        let mut cycle = vec![ji];
        cycle.extend(right);
        cycle.extend(left.into_iter().rev());
        loops.push(Loop { joints: cycle.into_iter().map(|e| joints[e].id.clone()).collect() });
    }
    loops
}

fn reachable_from_driver(
    joints: &[JointModel],
    spec: &LinkageSpec,
    joint_index: &HashMap<&str, usize>,
    driver_joint: usize,
) -> HashSet<usize> {
    let mut edges: Vec<(usize, usize)> = joints
        .iter()
        .filter(|j| j.a != GROUND_BODY && j.b != GROUND_BODY)
        .map(|j| (j.a, j.b))
        .collect();
    for g in &spec.gears {
        if let (Some(&ji), Some(&jo)) = (joint_index.get(g.input.as_str()), joint_index.get(g.output.as_str())) {
            for a in [joints[ji].a, joints[ji].b] {
                for b in [joints[jo].a, joints[jo].b] {
                    if a != GROUND_BODY && b != GROUND_BODY {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> =
        [joints[driver_joint].a, joints[driver_joint].b].into_iter().filter(|&b| b != GROUND_BODY).collect();
    while let Some(u) = stack.pop() {
        if !seen.insert(u) {
            continue;
        }
        for &(a, b) in &edges {
            if a == u && !seen.contains(&b) {
                stack.push(b);
            } else if b == u && !seen.contains(&a) {
                stack.push(a);
            }
        }
    }
    seen
}
