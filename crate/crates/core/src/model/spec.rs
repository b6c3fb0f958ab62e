use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::class::{default_weight_table, ActorClass};
use super::weather::WeatherPresetId;
use crate::geometry::{Pose2D, Rect, Vec2};

/// Taxonomy bucket of a corner case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerCaseCategory {
    StateAnomaly,
    BehaviorAnomaly,
    EvidenceBasedAnomaly,
}

impl CornerCaseCategory {
    pub const ALL: [CornerCaseCategory; 3] = [
        CornerCaseCategory::StateAnomaly,
        CornerCaseCategory::BehaviorAnomaly,
        CornerCaseCategory::EvidenceBasedAnomaly,
    ];

    /// Short name used for catalog directories and CLI filters.
    pub fn short_name(self) -> &'static str {
        match self {
            CornerCaseCategory::StateAnomaly => "state",
            CornerCaseCategory::BehaviorAnomaly => "behavior",
            CornerCaseCategory::EvidenceBasedAnomaly => "evidence",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CornerCaseCategory::StateAnomaly => "state_anomaly",
            CornerCaseCategory::BehaviorAnomaly => "behavior_anomaly",
            CornerCaseCategory::EvidenceBasedAnomaly => "evidence_based_anomaly",
        }
    }
}

impl fmt::Display for CornerCaseCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CornerCaseCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CornerCaseCategory::ALL
            .into_iter()
            .find(|c| c.short_name() == s || c.as_str() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficDensity {
    None,
    Low,
    Medium,
    High,
}

impl TrafficDensity {
    pub const ALL: [TrafficDensity; 4] = [
        TrafficDensity::None,
        TrafficDensity::Low,
        TrafficDensity::Medium,
        TrafficDensity::High,
    ];

    /// Number of background vehicles spawned for this level.
    pub fn vehicle_count(self) -> usize {
        match self {
            TrafficDensity::None => 0,
            TrafficDensity::Low => 2,
            TrafficDensity::Medium => 5,
            TrafficDensity::High => 10,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficDensity::None => "none",
            TrafficDensity::Low => "low",
            TrafficDensity::Medium => "medium",
            TrafficDensity::High => "high",
        }
    }
}

impl fmt::Display for TrafficDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrafficDensity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TrafficDensity::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown traffic density `{s}`"))
    }
}

/// Complete declarative description of one corner case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub id: String,
    pub name: String,
    pub category: CornerCaseCategory,
    pub description: String,
    /// Structural variant added to complete the catalog, as opposed to a
    /// scenario named in the taxonomy.
    #[serde(default)]
    pub variant: bool,
    pub map: RoadMap,
    pub ego_spawn: Pose2D,
    /// Initial ego speed, m/s.
    pub ego_speed: f64,
    pub goal_region: Rect,
    #[serde(default)]
    pub actors: Vec<ActorSpec>,
    #[serde(default)]
    pub triggers: Vec<TriggerSpec>,
    pub weather: WeatherPresetId,
    pub traffic_density: TrafficDensity,
    #[serde(default)]
    pub t0: f64,
    pub tn: f64,
    #[serde(default = "default_stationary_timeout")]
    pub stationary_timeout: f64,
    #[serde(default)]
    pub constraints: EvaluationConstraints,
    pub default_seed: u64,
}

pub fn default_stationary_timeout() -> f64 {
    10.0
}

impl ScenarioSpec {
    pub fn actor(&self, id: &str) -> Option<&ActorSpec> {
        self.actors.iter().find(|a| a.id == id)
    }

    pub fn trigger(&self, id: &str) -> Option<&TriggerSpec> {
        self.triggers.iter().find(|t| t.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorSpec {
    pub id: String,
    pub true_class: ActorClass,
    /// What perception reports; `None` means the true class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apparent_class: Option<ActorClass>,
    pub spawn: Pose2D,
    pub length: f64,
    pub width: f64,
    /// Height of the body's base above ground at spawn (e.g. luggage on a roof).
    #[serde(default)]
    pub elevation: f64,
    pub behavior: BehaviorScript,
    #[serde(default = "yes")]
    pub initially_active: bool,
}

fn yes() -> bool {
    true
}

impl ActorSpec {
    pub fn apparent(&self) -> ActorClass {
        self.apparent_class.unwrap_or(self.true_class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorKind {
    Static,
    WaypointFollow,
    Ballistic,
    Rolling,
    ScriptedDoorSwing,
    Pursuit,
}

impl BehaviorKind {
    /// Parameter names accepted by this kind, and whether each is required.
    pub fn parameters(self) -> &'static [(&'static str, bool)] {
        match self {
            BehaviorKind::Static => &[],
            BehaviorKind::WaypointFollow => &[("accel", false), ("despawn_at_end", false)],
            BehaviorKind::Ballistic => &[
                ("vx", true),
                ("vy", true),
                ("vz", true),
                ("release_height", true),
                ("ground_decel", false),
            ],
            BehaviorKind::Rolling => &[("accel", true), ("max_speed", false), ("initial_speed", false)],
            BehaviorKind::ScriptedDoorSwing => &[("swing_rate", true), ("max_angle", true)],
            BehaviorKind::Pursuit => &[("speed", true), ("turn_rate", false)],
        }
    }
}

/// Target point with a speed to hold while approaching it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub speed: f64,
}

impl From<[f64; 3]> for Waypoint {
    fn from([x, y, speed]: [f64; 3]) -> Self {
        Waypoint { x, y, speed }
    }
}

impl From<Waypoint> for [f64; 3] {
    fn from(w: Waypoint) -> Self {
        [w.x, w.y, w.speed]
    }
}

impl Waypoint {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorScript {
    pub kind: BehaviorKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<Waypoint>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    /// Pursuit target: an actor id or `ego`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl BehaviorScript {
    pub fn stationary() -> Self {
        BehaviorScript {
            kind: BehaviorKind::Static,
            waypoints: Vec::new(),
            parameters: BTreeMap::new(),
            target: None,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    pub fn param_or(&self, name: &str, default: f64) -> f64 {
        self.param(name).unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSpec {
    pub id: String,
    /// All must hold (1 to 3 conditions).
    pub conditions: Vec<Condition>,
    pub action: TriggerAction,
    #[serde(default = "yes")]
    pub one_shot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Condition {
    TimeAtLeast { t: f64 },
    EgoWithin { point: Vec2, radius: f64 },
    ActorWithin { actor: String, point: Vec2, radius: f64 },
    EgoSpeedAbove { speed: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TriggerAction {
    ActivateActor { actor: String },
    SetBehavior { actor: String, behavior: BehaviorScript },
    ApplyImpulse {
        actor: String,
        velocity: Vec2,
        #[serde(default)]
        vertical: f64,
    },
    Despawn { actor: String },
}

impl TriggerAction {
    pub fn actor(&self) -> &str {
        match self {
            TriggerAction::ActivateActor { actor }
            | TriggerAction::SetBehavior { actor, .. }
            | TriggerAction::ApplyImpulse { actor, .. }
            | TriggerAction::Despawn { actor } => actor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    Binary,
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConstraints {
    pub mode: EvaluationMode,
    #[serde(default = "default_weight_table")]
    pub weight_table: BTreeMap<ActorClass, f64>,
    #[serde(default = "default_failure_threshold")]
    pub failure_threshold: f64,
    #[serde(default = "yes")]
    pub end_on_collision: bool,
}

fn default_failure_threshold() -> f64 {
    1.0
}

impl Default for EvaluationConstraints {
    fn default() -> Self {
        EvaluationConstraints {
            mode: EvaluationMode::Weighted,
            weight_table: default_weight_table(),
            failure_threshold: default_failure_threshold(),
            end_on_collision: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaneDirection {
    /// Travel along the centerline's vertex order.
    Forward,
    Backward,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lane {
    pub id: String,
    pub centerline: Vec<Vec2>,
    pub width: f64,
    pub speed_limit: f64,
    pub direction: LaneDirection,
    #[serde(default)]
    pub one_way: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadMap {
    /// Union of these simple polygons is the drivable area.
    pub drivable: Vec<Vec<Vec2>>,
    pub lanes: Vec<Lane>,
    /// Named poses. Names starting with `traffic-` seed background vehicles.
    #[serde(default)]
    pub anchors: BTreeMap<String, Pose2D>,
}

pub const TRAFFIC_ANCHOR_PREFIX: &str = "traffic-";

impl RoadMap {
    pub fn is_drivable(&self, p: Vec2) -> bool {
        self.drivable
            .iter()
            .any(|poly| crate::geometry::polygon_contains(poly, p))
    }

    pub fn lane(&self, id: &str) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.id == id)
    }

    pub fn traffic_anchors(&self) -> impl Iterator<Item = (&String, &Pose2D)> {
        self.anchors
            .iter()
            .filter(|(name, _)| name.starts_with(TRAFFIC_ANCHOR_PREFIX))
    }
}
