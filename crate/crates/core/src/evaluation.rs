//! Termination rules and severity-weighted scoring.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{CollisionEvent, EventKind, WorldEvent, WorldState};
use crate::geometry::{obb_distance, project_onto_polyline, Rect, Vec2};
use crate::model::{ActorClass, EvaluationConstraints, EvaluationMode, ScenarioSpec};
use crate::road::current_lane;

/// Ego speeds below this count as standing still, m/s.
pub const STATIONARY_SPEED: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Collision,
    Goal,
    Stalled,
    Timeout,
    PolicyFault,
}

impl TerminalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalReason::Collision => "collision",
            TerminalReason::Goal => "goal",
            TerminalReason::Stalled => "stalled",
            TerminalReason::Timeout => "timeout",
            TerminalReason::PolicyFault => "policy_fault",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    CollisionFailure,
    Stalled,
    Timeout,
    PolicyFault,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::CollisionFailure => "collision_failure",
            Outcome::Stalled => "stalled",
            Outcome::Timeout => "timeout",
            Outcome::PolicyFault => "policy_fault",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Continue,
    Terminal(TerminalReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub route_completion: f64,
    pub min_distance_to_any_actor: Option<f64>,
    pub ticks_elapsed: u64,
    pub min_time_to_collision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub outcome: Outcome,
    pub terminal_reason: TerminalReason,
    pub severity_score: f64,
    pub collisions: Vec<CollisionEvent>,
    pub metrics: RunMetrics,
}

/// Weight of one collided class; callers validate the table beforehand.
pub fn severity(class: ActorClass, table: &BTreeMap<ActorClass, f64>) -> f64 {
    table.get(&class).copied().unwrap_or_else(|| crate::model::default_weight(class))
}

pub fn severity_score(collisions: &[CollisionEvent], table: &BTreeMap<ActorClass, f64>) -> f64 {
    collisions.iter().fold(0.0, |acc, c| acc + severity(c.actor_true_class, table))
}

/// Ticks a run may take: records `0..end_tick` cover `[t0, tn)`.
pub fn end_tick(spec: &ScenarioSpec, dt: f64) -> u64 {
    ((spec.tn - spec.t0) / dt - 1e-9).ceil().max(0.0) as u64
}

/// Arc-length progress along the spawn lane when the goal lies on it,
/// otherwise straight-line progress toward the goal region.
#[derive(Debug, Clone)]
enum Progress {
    Lane { path: Vec<Vec2>, s0: f64, s_goal: f64 },
    Direct { d0: f64 },
}

impl Progress {
    fn new(spec: &ScenarioSpec) -> Progress {
        let goal = spec.goal_region.center();
        if let Some(m) = current_lane(&spec.map, &spec.ego_spawn) {
            if let Some(g) = project_onto_polyline(&m.path, goal) {
                let s0 = m.projection.station;
                if g.offset.abs() <= m.lane.width && g.station > s0 + 1e-6 {
                    return Progress::Lane {
                        path: m.path,
                        s0,
                        s_goal: g.station,
                    };
                }
            }
        }
        Progress::Direct {
            d0: spec.goal_region.distance_to(spec.ego_spawn.position()),
        }
    }

    fn completion(&self, goal: &Rect, p: Vec2) -> f64 {
        let v = match self {
            Progress::Lane { path, s0, s_goal } => {
                project_onto_polyline(path, p).map_or(0.0, |pr| (pr.station - s0) / (s_goal - s0))
            }
            Progress::Direct { d0 } if *d0 > 0.0 => 1.0 - goal.distance_to(p) / d0,
            Progress::Direct { .. } => 1.0,
        };
        v.clamp(0.0, 1.0)
    }
}

/// Per-run evaluation state, updated after every step.
#[derive(Debug, Clone)]
pub struct Evaluator {
    end_tick: u64,
    still_limit: u64,
    still_ticks: u64,
    goal_reached: bool,
    progress: Progress,
    min_distance: Option<f64>,
    min_ttc: Option<f64>,
}

impl Evaluator {
    pub fn new(spec: &ScenarioSpec, world: &WorldState) -> Self {
        let mut ev = Evaluator {
            end_tick: end_tick(spec, world.dt),
            still_limit: (spec.stationary_timeout / world.dt).round().max(1.0) as u64,
            still_ticks: 0,
            goal_reached: false,
            progress: Progress::new(spec),
            min_distance: None,
            min_ttc: None,
        };
        ev.track(world);
        ev
    }

    pub fn still_ticks(&self) -> u64 {
        self.still_ticks
    }

    pub fn still_limit(&self) -> u64 {
        self.still_limit
    }

    fn track(&mut self, world: &WorldState) {
        let ego = world.ego_obb();
        let ego_v = world.ego.velocity();
        for i in world.active_indices() {
            let other = world.actor_obb(i);
            let gap = obb_distance(&ego, &other);
            self.min_distance = Some(self.min_distance.map_or(gap, |m| m.min(gap)));
            let line = other.center - ego.center;
            let n = line.norm();
            if n < 1e-9 || gap <= 0.0 {
                continue;
            }
            let closing = (ego_v - world.actors[i].kin.velocity()).dot(line.scale(1.0 / n));
            if closing > 1e-6 {
                let ttc = gap / closing;
                self.min_ttc = Some(self.min_ttc.map_or(ttc, |m| m.min(ttc)));
            }
        }
    }

    /// Decide whether the run ends after the step that produced `events`.
    pub fn update(&mut self, world: &WorldState, events: &[WorldEvent], spec: &ScenarioSpec) -> Verdict {
        self.track(world);
        let p = world.ego.pose.position();
        let in_goal = spec.goal_region.contains(p);
        if world.ego.speed.abs() < STATIONARY_SPEED && !in_goal {
            self.still_ticks += 1;
        } else {
            self.still_ticks = 0;
        }
        let collided = events.iter().any(|e| matches!(e.event, EventKind::Collision(_)));
        if collided && spec.constraints.end_on_collision {
            return Verdict::Terminal(TerminalReason::Collision);
        }
        if in_goal {
            self.goal_reached = true;
            return Verdict::Terminal(TerminalReason::Goal);
        }
        if self.still_ticks >= self.still_limit {
            return Verdict::Terminal(TerminalReason::Stalled);
        }
        if world.tick >= self.end_tick {
            return Verdict::Terminal(TerminalReason::Timeout);
        }
        Verdict::Continue
    }

    pub fn metrics(&self, world: &WorldState, spec: &ScenarioSpec, ticks: u64) -> RunMetrics {
        let completion = if self.goal_reached {
            1.0
        } else {
            self.progress.completion(&spec.goal_region, world.ego.pose.position())
        };
        RunMetrics {
            route_completion: completion,
            min_distance_to_any_actor: self.min_distance,
            ticks_elapsed: ticks,
            min_time_to_collision: self.min_ttc,
        }
    }
}

/// Outcome for a finished run. Goal arrival is read from `GoalReached`
/// events; severity is reported in both modes.
pub fn score_run(
    events: &[WorldEvent],
    constraints: &EvaluationConstraints,
    terminal: TerminalReason,
    metrics: RunMetrics,
) -> RunResult {
    let collisions: Vec<CollisionEvent> = events
        .iter()
        .filter_map(|e| match &e.event {
            EventKind::Collision(c) => Some(c.clone()),
            _ => None,
        })
        .collect();
    let score = severity_score(&collisions, &constraints.weight_table);
    let goal = events.iter().any(|e| matches!(e.event, EventKind::GoalReached));
    let tolerated = match constraints.mode {
        EvaluationMode::Binary => collisions.is_empty(),
        EvaluationMode::Weighted => score <= constraints.failure_threshold,
    };
    let outcome = match terminal {
        TerminalReason::PolicyFault => Outcome::PolicyFault,
        _ if goal && tolerated => Outcome::Success,
        _ if !collisions.is_empty() && (!tolerated || terminal == TerminalReason::Collision || goal) => {
            Outcome::CollisionFailure
        }
        TerminalReason::Stalled => Outcome::Stalled,
        _ => Outcome::Timeout,
    };
    RunResult {
        outcome,
        terminal_reason: terminal,
        severity_score: score,
        collisions,
        metrics,
    }
}
