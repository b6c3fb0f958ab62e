// `!(x > 0.0)` is deliberate throughout: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::class::{ActorClass, ClassGroup};
use super::spec::{
    BehaviorKind, BehaviorScript, Condition, EvaluationMode, LaneDirection, ScenarioSpec,
    TriggerAction,
};
use crate::engine::kinematics::V_MAX;
use crate::geometry::Vec2;

/// Machine-readable violation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    IdFormat,
    WindowEmpty,
    WindowNegativeStart,
    StationaryTimeout,
    EgoSpeedRange,
    EgoOffRoad,
    GoalOffRoad,
    GoalDegenerate,
    DuplicateActorId,
    ReservedActorId,
    NonPositiveDimensions,
    NegativeElevation,
    ApparentClassNotAllowed,
    WaypointsTooFew,
    BehaviorParameterMissing,
    BehaviorParameterUnknown,
    BehaviorParameterRange,
    PursuitTarget,
    DuplicateTriggerId,
    ConditionCount,
    ConditionRange,
    DanglingActorRef,
    TriggerCycle,
    OneShotRequired,
    LaneOffRoad,
    LaneDegenerate,
    OneWayDirection,
    DuplicateLaneId,
    AnchorOffRoad,
    WeightMissing,
    WeightNegative,
    WeightHierarchy,
    ThresholdNegative,
    SeedRange,
    NonFinite,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().unwrap_or("UNKNOWN"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    pub fn contains(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, message: impl Into<String>) {
        self.violations.push(Violation {
            code,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

pub fn is_kebab_case(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('-')
        && !s.ends_with('-')
        && !s.contains("--")
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}

/// Reserved id under which the ego appears in pursuit targets.
pub const EGO_ID: &str = "ego";

/// Check every invariant of a scenario; an empty report means valid.
pub fn validate_scenario(spec: &ScenarioSpec) -> ValidationReport {
    let mut r = ValidationReport::default();
    use ViolationCode::*;

    if !is_kebab_case(&spec.id) {
        r.push(IdFormat, format!("scenario id `{}` is not kebab-case", spec.id));
    }
    check_finite(&mut r, spec);
    if spec.t0 < 0.0 {
        r.push(WindowNegativeStart, format!("t0 = {} is negative", spec.t0));
    }
    if !(spec.tn > spec.t0) {
        r.push(WindowEmpty, format!("tn = {} must exceed t0 = {}", spec.tn, spec.t0));
    }
    if !(spec.stationary_timeout > 0.0) {
        r.push(StationaryTimeout, "stationary_timeout must be positive");
    }
    if !(0.0..=V_MAX).contains(&spec.ego_speed) {
        r.push(EgoSpeedRange, format!("ego_speed {} outside [0, {V_MAX}]", spec.ego_speed));
    }
    if spec.default_seed > i64::MAX as u64 {
        r.push(SeedRange, "default_seed must fit in a signed 64-bit integer");
    }

    check_map(&mut r, spec);

    if !spec.map.is_drivable(spec.ego_spawn.position()) {
        r.push(EgoOffRoad, "ego_spawn lies outside the drivable area");
    }
    let g = &spec.goal_region;
    if !(g.max.x > g.min.x && g.max.y > g.min.y) {
        r.push(GoalDegenerate, "goal_region must have positive extent");
    }
    let goal_points = g.corners().into_iter().chain(std::iter::once(g.center()));
    if goal_points.into_iter().any(|p| !spec.map.is_drivable(p)) {
        r.push(GoalOffRoad, "goal_region extends outside the drivable area");
    }

    let mut actor_ids = BTreeSet::new();
    for a in &spec.actors {
        if !actor_ids.insert(a.id.as_str()) {
            r.push(DuplicateActorId, format!("actor id `{}` repeated", a.id));
        }
        if a.id == EGO_ID {
            r.push(ReservedActorId, "actor id `ego` is reserved");
        }
        if !(a.length > 0.0 && a.width > 0.0) {
            r.push(NonPositiveDimensions, format!("actor `{}` must have positive dimensions", a.id));
        }
        if a.elevation < 0.0 {
            r.push(NegativeElevation, format!("actor `{}` elevation is negative", a.id));
        }
        if a.apparent() != a.true_class && !a.true_class.allows_apparent_mismatch() {
            r.push(
                ApparentClassNotAllowed,
                format!("actor `{}` of class {} cannot appear as {}", a.id, a.true_class, a.apparent()),
            );
        }
        check_behavior(&mut r, &a.id, &a.behavior);
    }
    let actor_exists = |id: &str| actor_ids.contains(id);

    for a in &spec.actors {
        if let Some(t) = &a.behavior.target {
            if t != EGO_ID && !actor_exists(t) {
                r.push(DanglingActorRef, format!("actor `{}` pursues unknown `{t}`", a.id));
            }
        }
    }

    let mut trigger_ids = BTreeSet::new();
    for t in &spec.triggers {
        if !trigger_ids.insert(t.id.as_str()) {
            r.push(DuplicateTriggerId, format!("trigger id `{}` repeated", t.id));
        }
        if !t.one_shot {
            r.push(OneShotRequired, format!("trigger `{}` must be one-shot", t.id));
        }
        if t.conditions.is_empty() || t.conditions.len() > 3 {
            r.push(
                ConditionCount,
                format!("trigger `{}` has {} conditions (1 to 3 allowed)", t.id, t.conditions.len()),
            );
        }
        for c in &t.conditions {
            match c {
                Condition::TimeAtLeast { t: time } if *time < 0.0 => {
                    r.push(ConditionRange, format!("trigger `{}` time {time} is negative", t.id))
                }
                Condition::EgoWithin { radius, .. } | Condition::ActorWithin { radius, .. }
                    if *radius <= 0.0 =>
                {
                    r.push(ConditionRange, format!("trigger `{}` radius must be positive", t.id))
                }
                Condition::EgoSpeedAbove { speed } if *speed < 0.0 => {
                    r.push(ConditionRange, format!("trigger `{}` speed is negative", t.id))
                }
                _ => {}
            }
            if let Condition::ActorWithin { actor, .. } = c {
                if !actor_exists(actor) {
                    r.push(DanglingActorRef, format!("trigger `{}` watches unknown actor `{actor}`", t.id));
                }
            }
        }
        let target = t.action.actor();
        if !actor_exists(target) {
            r.push(DanglingActorRef, format!("trigger `{}` acts on unknown actor `{target}`", t.id));
        }
        if let TriggerAction::SetBehavior { behavior, .. } = &t.action {
            check_behavior(&mut r, target, behavior);
            if let Some(tg) = &behavior.target {
                if tg != EGO_ID && !actor_exists(tg) {
                    r.push(DanglingActorRef, format!("trigger `{}` pursuit target `{tg}` unknown", t.id));
                }
            }
        }
    }

    if let Some(cycle) = find_trigger_cycle(spec) {
        r.push(TriggerCycle, format!("trigger cycle through {}", cycle.join(" -> ")));
    }

    check_constraints(&mut r, spec);
    r
}

fn check_finite(r: &mut ValidationReport, spec: &ScenarioSpec) {
    let mut vals = vec![
        spec.t0,
        spec.tn,
        spec.stationary_timeout,
        spec.ego_speed,
        spec.ego_spawn.x,
        spec.ego_spawn.y,
        spec.ego_spawn.heading,
        spec.goal_region.min.x,
        spec.goal_region.min.y,
        spec.goal_region.max.x,
        spec.goal_region.max.y,
        spec.constraints.failure_threshold,
    ];
    for a in &spec.actors {
        vals.extend([a.spawn.x, a.spawn.y, a.spawn.heading, a.length, a.width, a.elevation]);
        vals.extend(a.behavior.parameters.values());
    }
    vals.extend(spec.constraints.weight_table.values());
    if vals.iter().any(|v| !v.is_finite()) {
        r.push(ViolationCode::NonFinite, "all numeric fields must be finite");
    }
}

fn check_map(r: &mut ValidationReport, spec: &ScenarioSpec) {
    use ViolationCode::*;
    let map = &spec.map;
    let mut ids = BTreeSet::new();
    for lane in &map.lanes {
        if !ids.insert(lane.id.as_str()) {
            r.push(DuplicateLaneId, format!("lane id `{}` repeated", lane.id));
        }
        if lane.centerline.len() < 2 || !(lane.width > 0.0) || !(lane.speed_limit > 0.0) {
            r.push(LaneDegenerate, format!("lane `{}` needs >= 2 points, positive width and speed limit", lane.id));
        }
        if lane.one_way && lane.direction == LaneDirection::Both {
            r.push(OneWayDirection, format!("one-way lane `{}` must permit exactly one direction", lane.id));
        }
        if let Some(p) = lane_off_road_point(map, &lane.centerline) {
            r.push(LaneOffRoad, format!("lane `{}` leaves the drivable area near ({:.2}, {:.2})", lane.id, p.x, p.y));
        }
    }
    for (name, pose) in &map.anchors {
        if name.starts_with(super::spec::TRAFFIC_ANCHOR_PREFIX) && !map.is_drivable(pose.position()) {
            r.push(AnchorOffRoad, format!("anchor `{name}` lies outside the drivable area"));
        }
    }
}

/// Samples the centerline at vertices and segment midpoints.
fn lane_off_road_point(map: &super::spec::RoadMap, line: &[Vec2]) -> Option<Vec2> {
    let mids = line.windows(2).map(|w| (w[0] + w[1]).scale(0.5));
    line.iter()
        .copied()
        .chain(mids)
        .find(|p| !map.is_drivable(*p))
}

fn check_behavior(r: &mut ValidationReport, actor: &str, b: &BehaviorScript) {
    use ViolationCode::*;
    let allowed = b.kind.parameters();
    for (name, required) in allowed {
        if *required && !b.parameters.contains_key(*name) {
            r.push(
                BehaviorParameterMissing,
                format!("actor `{actor}` behavior {:?} requires parameter `{name}`", b.kind),
            );
        }
    }
    for name in b.parameters.keys() {
        if !allowed.iter().any(|(n, _)| n == name) {
            r.push(
                BehaviorParameterUnknown,
                format!("actor `{actor}` behavior {:?} has unknown parameter `{name}`", b.kind),
            );
        }
    }
    match b.kind {
        BehaviorKind::WaypointFollow if b.waypoints.len() < 2 => {
            r.push(WaypointsTooFew, format!("actor `{actor}` waypoint_follow needs >= 2 waypoints"));
        }
        BehaviorKind::Ballistic if b.param_or("release_height", 0.0) < 0.0 => {
            r.push(BehaviorParameterRange, format!("actor `{actor}` release_height must be >= 0"));
        }
        BehaviorKind::Pursuit if b.target.is_none() => {
            r.push(PursuitTarget, format!("actor `{actor}` pursuit needs a target"));
        }
        _ => {}
    }
    if b.waypoints.iter().any(|w| w.speed < 0.0 || !w.speed.is_finite()) {
        r.push(BehaviorParameterRange, format!("actor `{actor}` waypoint speeds must be >= 0"));
    }
}

/// Trigger A enables trigger B when A's action targets an actor that B's
/// conditions watch. Returns the ids along the first cycle found.
pub fn find_trigger_cycle(spec: &ScenarioSpec) -> Option<Vec<String>> {
    let ids: Vec<&str> = spec.triggers.iter().map(|t| t.id.as_str()).collect();
    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for a in &spec.triggers {
        let target = a.action.actor();
        for b in &spec.triggers {
            let watches = b.conditions.iter().any(|c| matches!(c, Condition::ActorWithin { actor, .. } if actor == target));
            if watches {
                edges.entry(a.id.as_str()).or_default().push(b.id.as_str());
            }
        }
    }
    // 0 unvisited, 1 on stack, 2 done
    let mut state: BTreeMap<&str, u8> = ids.iter().map(|i| (*i, 0)).collect();
    let mut stack = Vec::new();
    fn visit<'a>(
        n: &'a str,
        edges: &BTreeMap<&'a str, Vec<&'a str>>,
        state: &mut BTreeMap<&'a str, u8>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        state.insert(n, 1);
        stack.push(n);
        for &m in edges.get(n).map(|v| v.as_slice()).unwrap_or(&[]) {
            match state.get(m).copied().unwrap_or(0) {
                1 => {
                    let start = stack.iter().position(|s| *s == m).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(m.to_string());
                    return Some(cycle);
                }
                0 => {
                    if let Some(c) = visit(m, edges, state, stack) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        state.insert(n, 2);
        None
    }
    for id in &ids {
        if state[id] == 0 {
            if let Some(c) = visit(id, &edges, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

fn check_constraints(r: &mut ValidationReport, spec: &ScenarioSpec) {
    use ViolationCode::*;
    let c = &spec.constraints;
    let missing: Vec<_> = ActorClass::ALL
        .into_iter()
        .filter(|k| !c.weight_table.contains_key(k))
        .map(|k| k.as_str())
        .collect();
    if !missing.is_empty() {
        r.push(WeightMissing, format!("weight_table lacks {}", missing.join(", ")));
    }
    if c.weight_table.values().any(|w| *w < 0.0) {
        r.push(WeightNegative, "severity weights must be >= 0");
    }
    if c.failure_threshold < 0.0 {
        r.push(ThresholdNegative, "failure_threshold must be >= 0");
    }
    if c.mode == EvaluationMode::Weighted && missing.is_empty() {
        let extreme = |g: ClassGroup, pick_min: bool| {
            let ws = ActorClass::ALL
                .into_iter()
                .filter(|k| k.group() == g)
                .map(|k| c.weight_table[&k]);
            if pick_min {
                ws.fold(f64::INFINITY, f64::min)
            } else {
                ws.fold(f64::NEG_INFINITY, f64::max)
            }
        };
        let human_min = extreme(ClassGroup::Human, true);
        let vehicle_max = extreme(ClassGroup::Vehicle, false);
        let vehicle_min = extreme(ClassGroup::Vehicle, true);
        let sign_max = extreme(ClassGroup::Sign, false);
        if !(human_min > vehicle_max && vehicle_min > sign_max) {
            r.push(
                WeightHierarchy,
                "weighted mode requires human weights > vehicle weights > sign weights",
            );
        }
    }
}
