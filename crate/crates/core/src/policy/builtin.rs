use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::action::{DiscreteAction, EgoAction, ASSUMED_BRAKE_DECEL};
use crate::engine::kinematics::{EGO_LENGTH, EGO_WIDTH};
use crate::geometry::{obb_overlap, Obb, Vec2};
use crate::perception::Observation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinPolicy {
    Passive,
    ConstantSpeed,
    EmergencyBrake,
    WaypointFollower,
}

impl BuiltinPolicy {
    pub const ALL: [BuiltinPolicy; 4] = [
        BuiltinPolicy::Passive,
        BuiltinPolicy::ConstantSpeed,
        BuiltinPolicy::EmergencyBrake,
        BuiltinPolicy::WaypointFollower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinPolicy::Passive => "passive",
            BuiltinPolicy::ConstantSpeed => "constant_speed",
            BuiltinPolicy::EmergencyBrake => "emergency_brake",
            BuiltinPolicy::WaypointFollower => "waypoint_follower",
        }
    }
}

impl fmt::Display for BuiltinPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinPolicy::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown builtin policy `{s}`"))
    }
}

/// Extra margin added to the braking distance, metres.
pub const BRAKE_MARGIN: f64 = 2.0;
/// Half width of the corridor the emergency brake watches.
pub const CORRIDOR_HALF_WIDTH: f64 = 1.5;
/// Goal bearing beyond which the waypoint follower turns.
pub const TURN_BEARING: f64 = 0.35;

/// Stopping distance assumed by the emergency brake, without the margin.
pub fn braking_distance(speed: f64) -> f64 {
    speed * speed / (2.0 * ASSUMED_BRAKE_DECEL)
}

/// Ego-frame box from the ego center to `reach` metres past the front
/// bumper.
fn corridor(reach: f64) -> Obb {
    let len = 0.5 * EGO_LENGTH + reach;
    Obb::new(Vec2::new(0.5 * len, 0.0), 0.5 * len, CORRIDOR_HALF_WIDTH.max(0.5 * EGO_WIDTH), 0.0)
}

/// True when something perceived lies inside the stopping corridor.
pub fn obstacle_ahead(obs: &Observation, cap: f64) -> bool {
    let zone = corridor(braking_distance(obs.ego.speed) + BRAKE_MARGIN);
    let seen = obs.detections.iter().any(|d| {
        let b = Obb::new(d.position, 0.5 * d.length, 0.5 * d.width, d.heading);
        obb_overlap(&zone, &b)
    });
    if seen {
        return true;
    }
    let n = obs.lidar.len();
    obs.lidar.iter().enumerate().any(|(i, &r)| {
        if r >= cap {
            return false;
        }
        let theta = std::f64::consts::TAU * i as f64 / n as f64;
        zone.contains(Vec2::from_angle(theta).scale(r))
    })
}

/// Baseline decision for one observation. `cap` is the lidar miss value.
pub fn builtin_act(policy: BuiltinPolicy, obs: &Observation, cap: f64) -> EgoAction {
    let d = match policy {
        BuiltinPolicy::Passive => DiscreteAction::Stop,
        BuiltinPolicy::ConstantSpeed => DiscreteAction::Straight,
        BuiltinPolicy::EmergencyBrake => {
            if obstacle_ahead(obs, cap) {
                DiscreteAction::Stop
            } else {
                DiscreteAction::Straight
            }
        }
        BuiltinPolicy::WaypointFollower => {
            if obs.goal.bearing > TURN_BEARING {
                DiscreteAction::TurnLeft
            } else if obs.goal.bearing < -TURN_BEARING {
                DiscreteAction::TurnRight
            } else {
                DiscreteAction::Straight
            }
        }
    };
    EgoAction::Discrete(d)
}
