use serde::{Deserialize, Serialize};

use crate::engine::kinematics::{ContinuousControl, KinematicState, GRAVITY, STEER_MAX, THROTTLE_ACCEL, WHEELBASE};
use crate::geometry::{polyline_point_at, Vec2};
use crate::model::RoadMap;
use crate::road::{current_lane, junction_branch, lookahead_point, side_lane, LaneMatch, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteAction {
    Straight,
    TurnLeft,
    TurnRight,
    Stop,
}

impl DiscreteAction {
    pub const ALL: [DiscreteAction; 4] = [
        DiscreteAction::Straight,
        DiscreteAction::TurnLeft,
        DiscreteAction::TurnRight,
        DiscreteAction::Stop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiscreteAction::Straight => "straight",
            DiscreteAction::TurnLeft => "turn_left",
            DiscreteAction::TurnRight => "turn_right",
            DiscreteAction::Stop => "stop",
        }
    }
}

/// A policy decision for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EgoAction {
    Discrete(DiscreteAction),
    Continuous(ContinuousControl),
}

impl EgoAction {
    pub const STOP: EgoAction = EgoAction::Discrete(DiscreteAction::Stop);

    /// Short label used in flat exports.
    pub fn label(&self) -> &'static str {
        match self {
            EgoAction::Discrete(d) => d.as_str(),
            EgoAction::Continuous(_) => "continuous",
        }
    }
}

/// Deceleration the cruise controller assumes a full brake delivers.
pub const ASSUMED_BRAKE_DECEL: f64 = 0.7 * GRAVITY;
/// Speed cap while taking a junction branch.
pub const TURN_SPEED: f64 = 6.0;
const CRUISE_GAIN: f64 = 1.0;
const MIN_LOOKAHEAD: f64 = 5.0;
const LOOKAHEAD_TIME: f64 = 0.8;

fn lookahead_distance(speed: f64) -> f64 {
    MIN_LOOKAHEAD.max(LOOKAHEAD_TIME * speed.abs())
}

/// Proportional speed control toward `target`.
fn cruise(speed: f64, target: f64) -> (f64, f64) {
    let a = CRUISE_GAIN * (target - speed);
    if a >= 0.0 {
        ((a / THROTTLE_ACCEL).min(1.0), 0.0)
    } else {
        (0.0, (-a / ASSUMED_BRAKE_DECEL).min(1.0))
    }
}

/// Pure-pursuit steer command toward a world point.
fn pursue(ego: &KinematicState, target: Vec2) -> f64 {
    let local = target.to_local(ego.pose.position(), ego.pose.heading);
    let ld2 = local.dot(local);
    if ld2 < 1e-9 {
        return 0.0;
    }
    let curvature = 2.0 * local.y / ld2;
    (WHEELBASE * curvature).atan() / STEER_MAX
}

fn control(ego: &KinematicState, target_speed: f64, aim: Vec2) -> ContinuousControl {
    let (throttle, brake) = cruise(ego.speed, target_speed);
    ContinuousControl {
        throttle,
        brake,
        steer: pursue(ego, aim),
    }
    .clamped()
}

fn straight(ego: &KinematicState, map: &RoadMap, lane: Option<&LaneMatch<'_>>) -> ContinuousControl {
    match lane {
        Some(m) => control(ego, m.lane.speed_limit, lookahead_point(map, m, lookahead_distance(ego.speed))),
        None => {
            let ahead = ego.pose.position() + Vec2::from_angle(ego.pose.heading).scale(MIN_LOOKAHEAD);
            control(ego, ego.speed.max(0.0), ahead)
        }
    }
}

fn turn(ego: &KinematicState, map: &RoadMap, cur: &LaneMatch<'_>, side: Side) -> Option<ContinuousControl> {
    let ahead = lookahead_distance(ego.speed);
    if let Some(next) = side_lane(map, &ego.pose, cur, side) {
        return Some(control(ego, next.lane.speed_limit, lookahead_point(map, &next, ahead)));
    }
    let branch = junction_branch(map, &ego.pose, cur, side)?;
    let start = *branch.path.first()?;
    let gap = start.distance(ego.pose.position());
    let speed = branch.lane.speed_limit.min(cur.lane.speed_limit).min(TURN_SPEED);
    let aim = if gap > ahead {
        lookahead_point(map, cur, ahead)
    } else {
        polyline_point_at(&branch.path, ahead - gap).map_or(start, |(p, _)| p)
    };
    Some(control(ego, speed, aim))
}

/// Continuous control realizing a discrete action, plus a warning when a
/// turn had nowhere to go and was degraded to `Straight`.
pub fn map_discrete(action: DiscreteAction, ego: &KinematicState, map: &RoadMap) -> (ContinuousControl, Option<String>) {
    let lane = current_lane(map, &ego.pose);
    match action {
        DiscreteAction::Stop => (ContinuousControl::STOP, None),
        DiscreteAction::Straight => (straight(ego, map, lane.as_ref()), None),
        DiscreteAction::TurnLeft | DiscreteAction::TurnRight => {
            let side = if action == DiscreteAction::TurnLeft { Side::Left } else { Side::Right };
            match lane.as_ref().and_then(|m| turn(ego, map, m, side)) {
                Some(c) => (c, None),
                None => (
                    straight(ego, map, lane.as_ref()),
                    Some(format!("{} has no lane or branch on that side; driving straight", action.as_str())),
                ),
            }
        }
    }
}

/// Resolve any action into the control the engine applies.
pub fn resolve_action(action: &EgoAction, ego: &KinematicState, map: &RoadMap) -> (ContinuousControl, Option<String>) {
    match action {
        EgoAction::Discrete(d) => map_discrete(*d, ego, map),
        EgoAction::Continuous(c) => (c.clamped(), None),
    }
}
