use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::behavior::{enter_behavior, integrate_actor};
use super::kinematics::{integrate_bicycle, ContinuousControl, KinematicState, DT, EGO_LENGTH, EGO_ROOF, EGO_WIDTH};
use super::rng::{derive_stream, LIDAR_STREAM, TRAFFIC_STREAM};
use crate::geometry::{obb_overlap, obb_penetration, polyline_point_at, Obb, Pose2D, Vec2};
use crate::model::{ActorClass, BehaviorKind, BehaviorScript, Condition, ScenarioSpec, TriggerAction, WeatherPreset, Waypoint};
use crate::road::current_lane;

/// Static description of one actor in a running world.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorBody {
    pub id: String,
    pub true_class: ActorClass,
    pub apparent_class: ActorClass,
    pub length: f64,
    pub width: f64,
    pub spawn: Pose2D,
    /// Spawned from the traffic density table rather than the scenario.
    pub background: bool,
}

impl ActorBody {
    pub fn obb(&self, kin: &KinematicState) -> Obb {
        Obb::from_pose(&kin.pose, self.length, self.width)
    }

    /// Vertical extent `[base, top)` at the given state.
    pub fn vertical_extent(&self, kin: &KinematicState) -> (f64, f64) {
        (kin.height, kin.height + self.true_class.body_height())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActorState {
    pub kin: KinematicState,
    pub script: BehaviorScript,
    /// Next waypoint for `waypoint_follow`.
    pub waypoint: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub tick: u64,
    pub actor_id: String,
    pub actor_true_class: ActorClass,
    pub relative_speed: f64,
    pub penetration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    TriggerFired { trigger: String },
    Collision(CollisionEvent),
    ActorActivated { actor: String },
    ActorDespawned { actor: String },
    GoalReached,
    /// A discrete action could not be honoured and was degraded.
    PolicyWarning { message: String },
    /// An external agent reply was missing or malformed and Stop was used.
    ProtocolFault { fault: String, fatal: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldEvent {
    pub tick: u64,
    pub event: EventKind,
}

/// Full simulation state at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub tick: u64,
    pub sim_time: f64,
    pub t0: f64,
    pub dt: f64,
    pub ego: KinematicState,
    pub bodies: Vec<ActorBody>,
    /// Parallel to `bodies`.
    pub actors: Vec<ActorState>,
    pub fired_triggers: BTreeSet<String>,
    /// Actor indices currently overlapping the ego.
    pub contacts: BTreeSet<usize>,
    pub lidar_rng: ChaCha8Rng,
    pub event_log: Vec<WorldEvent>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InitError {
    #[error("spawn overlap between `{0}` and `{1}` at t0")]
    SpawnOverlap(String, String),
}

pub const EGO_ID: &str = crate::model::validate::EGO_ID;

impl WorldState {
    pub fn ego_obb(&self) -> Obb {
        Obb::from_pose(&self.ego.pose, EGO_LENGTH, EGO_WIDTH)
    }

    pub fn actor_index(&self, id: &str) -> Option<usize> {
        self.bodies.iter().position(|b| b.id == id)
    }

    pub fn actor_state(&self, id: &str) -> Option<&KinematicState> {
        self.actor_index(id).map(|i| &self.actors[i].kin)
    }

    pub fn actor_obb(&self, i: usize) -> Obb {
        self.bodies[i].obb(&self.actors[i].kin)
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bodies.len()).filter(|&i| self.actors[i].kin.active)
    }

    pub fn log(&mut self, event: EventKind) {
        self.event_log.push(WorldEvent {
            tick: self.tick,
            event,
        });
    }
}

fn vertical_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

const EGO_EXTENT: (f64, f64) = (0.0, EGO_ROOF);

/// Place the ego, scenario actors and background traffic.
pub fn init_world(spec: &ScenarioSpec, seed: u64) -> Result<WorldState, InitError> {
    let ego = KinematicState {
        speed: spec.ego_speed,
        ..KinematicState::at_rest(spec.ego_spawn)
    };
    let mut bodies = Vec::new();
    let mut actors = Vec::new();
    for a in &spec.actors {
        bodies.push(ActorBody {
            id: a.id.clone(),
            true_class: a.true_class,
            apparent_class: a.apparent(),
            length: a.length,
            width: a.width,
            spawn: a.spawn,
            background: false,
        });
        let mut st = ActorState {
            kin: KinematicState {
                height: a.elevation,
                active: a.initially_active,
                ..KinematicState::at_rest(a.spawn)
            },
            script: a.behavior.clone(),
            waypoint: 0,
        };
        if st.kin.active {
            enter_behavior(&mut st);
        }
        actors.push(st);
    }

    let ego_obb = Obb::from_pose(&ego.pose, EGO_LENGTH, EGO_WIDTH);
    for i in 0..bodies.len() {
        if !actors[i].kin.active {
            continue;
        }
        let oi = bodies[i].obb(&actors[i].kin);
        let ei = bodies[i].vertical_extent(&actors[i].kin);
        if obb_overlap(&ego_obb, &oi) && vertical_overlap(EGO_EXTENT, ei) {
            return Err(InitError::SpawnOverlap(EGO_ID.into(), bodies[i].id.clone()));
        }
        for j in i + 1..bodies.len() {
            if !actors[j].kin.active {
                continue;
            }
            let oj = bodies[j].obb(&actors[j].kin);
            if obb_overlap(&oi, &oj) && vertical_overlap(ei, bodies[j].vertical_extent(&actors[j].kin)) {
                return Err(InitError::SpawnOverlap(bodies[i].id.clone(), bodies[j].id.clone()));
            }
        }
    }

    spawn_background(spec, seed, &ego_obb, &mut bodies, &mut actors);

    Ok(WorldState {
        tick: 0,
        sim_time: spec.t0,
        t0: spec.t0,
        dt: DT,
        ego,
        bodies,
        actors,
        fired_triggers: BTreeSet::new(),
        contacts: BTreeSet::new(),
        lidar_rng: derive_stream(seed, LIDAR_STREAM),
        event_log: Vec::new(),
    })
}

pub const BACKGROUND_LENGTH: f64 = 4.5;
pub const BACKGROUND_WIDTH: f64 = 1.8;
/// Background vehicles drive at this fraction of the lane speed limit.
pub const BACKGROUND_SPEED_FACTOR: f64 = 0.8;

/// Background vehicle plan for one traffic anchor: pose plus lane-following
/// waypoints, or `None` when the anchor is not on a lane.
pub fn background_plan(spec: &ScenarioSpec, anchor: &Pose2D) -> Option<(Pose2D, Vec<Waypoint>)> {
    let m = current_lane(&spec.map, anchor)?;
    let speed = m.lane.speed_limit * BACKGROUND_SPEED_FACTOR;
    let t = m.projection.tangent;
    let pose = Pose2D::new(anchor.x, anchor.y, t.y.atan2(t.x));
    let mut wps = vec![Waypoint { x: anchor.x, y: anchor.y, speed }];
    let mut s = 0.0;
    for w in m.path.windows(2) {
        s += w[0].distance(w[1]);
        if s > m.projection.station + 1e-9 {
            wps.push(Waypoint { x: w[1].x, y: w[1].y, speed });
        }
    }
    if wps.len() < 2 {
        let (end, _) = polyline_point_at(&m.path, m.length())?;
        wps.push(Waypoint { x: end.x, y: end.y, speed });
    }
    Some((pose, wps))
}

/// Traffic anchors in the order the seeded stream assigns them.
pub fn shuffled_traffic_anchors(spec: &ScenarioSpec, seed: u64) -> Vec<(String, Pose2D)> {
    let mut anchors: Vec<(String, Pose2D)> = spec
        .map
        .traffic_anchors()
        .map(|(n, p)| (n.clone(), *p))
        .collect();
    let mut rng = derive_stream(seed, TRAFFIC_STREAM);
    anchors.shuffle(&mut rng);
    anchors
}

fn spawn_background(spec: &ScenarioSpec, seed: u64, ego_obb: &Obb, bodies: &mut Vec<ActorBody>, actors: &mut Vec<ActorState>) {
    let wanted = spec.traffic_density.vehicle_count();
    if wanted == 0 {
        return;
    }
    let first_bg = bodies.len();
    for (_, anchor) in shuffled_traffic_anchors(spec, seed) {
        if bodies.len() - first_bg == wanted {
            break;
        }
        let Some((pose, waypoints)) = background_plan(spec, &anchor) else {
            continue;
        };
        let obb = Obb::from_pose(&pose, BACKGROUND_LENGTH, BACKGROUND_WIDTH);
        let blocked = obb_overlap(&obb, ego_obb)
            || bodies
                .iter()
                .zip(actors.iter())
                .any(|(b, s)| s.kin.active && obb_overlap(&obb, &b.obb(&s.kin)));
        if blocked {
            continue;
        }
        let n = bodies.len() - first_bg;
        bodies.push(ActorBody {
            id: format!("bg-{n}"),
            true_class: ActorClass::Car,
            apparent_class: ActorClass::Car,
            length: BACKGROUND_LENGTH,
            width: BACKGROUND_WIDTH,
            spawn: pose,
            background: true,
        });
        let mut parameters = std::collections::BTreeMap::new();
        parameters.insert("despawn_at_end".to_string(), 1.0);
        let mut st = ActorState {
            kin: KinematicState::at_rest(pose),
            script: BehaviorScript {
                kind: BehaviorKind::WaypointFollow,
                waypoints,
                parameters,
                target: None,
            },
            waypoint: 0,
        };
        enter_behavior(&mut st);
        actors.push(st);
    }
}

/// Advance one tick: ego, scripted actors, triggers, ego collisions.
pub fn step(world: &mut WorldState, control: &ContinuousControl, spec: &ScenarioSpec, weather: &WeatherPreset) -> Vec<WorldEvent> {
    let next_tick = world.tick + 1;
    world.ego = integrate_bicycle(&world.ego, control, weather.friction_mu, world.dt);

    let mut events = Vec::new();
    let positions: Vec<Vec2> = world.actors.iter().map(|a| a.kin.pose.position()).collect();
    let ego_pos = world.ego.pose.position();
    for i in 0..world.bodies.len() {
        if !world.actors[i].kin.active {
            continue;
        }
        let despawned = integrate_actor(&mut world.actors[i], &world.bodies[i], world.dt, ego_pos, |id| {
            world_index(&world.bodies, id).map(|j| positions[j])
        });
        if despawned {
            events.push(WorldEvent {
                tick: next_tick,
                event: EventKind::ActorDespawned {
                    actor: world.bodies[i].id.clone(),
                },
            });
        }
    }

    world.tick = next_tick;
    world.sim_time = world.t0 + next_tick as f64 * world.dt;

    for (id, action) in evaluate_triggers(world, spec) {
        events.push(WorldEvent {
            tick: next_tick,
            event: EventKind::TriggerFired { trigger: id },
        });
        if let Some(kind) = apply_action(world, &action) {
            events.push(WorldEvent { tick: next_tick, event: kind });
        }
    }

    detect_collisions(world, &mut events);
    world.event_log.extend(events.iter().cloned());
    events
}

fn world_index(bodies: &[ActorBody], id: &str) -> Option<usize> {
    bodies.iter().position(|b| b.id == id)
}

/// Slack for comparing accumulated sim time against trigger times.
const TIME_EPS: f64 = 1e-9;

fn condition_holds(world: &WorldState, c: &Condition) -> bool {
    match c {
        Condition::TimeAtLeast { t } => world.sim_time + TIME_EPS >= *t,
        Condition::EgoWithin { point, radius } => world.ego.pose.position().distance(*point) <= *radius,
        Condition::ActorWithin { actor, point, radius } => world
            .actor_index(actor)
            .map(|i| &world.actors[i].kin)
            .is_some_and(|k| k.active && k.pose.position().distance(*point) <= *radius),
        Condition::EgoSpeedAbove { speed } => world.ego.speed > *speed,
    }
}

/// Unfired triggers whose conditions all hold now, in id order. Each is
/// marked fired; the caller applies the actions in the returned order.
pub fn evaluate_triggers(world: &mut WorldState, spec: &ScenarioSpec) -> Vec<(String, TriggerAction)> {
    let mut due: Vec<(String, TriggerAction)> = spec
        .triggers
        .iter()
        .filter(|t| !world.fired_triggers.contains(&t.id))
        .filter(|t| t.conditions.iter().all(|c| condition_holds(world, c)))
        .map(|t| (t.id.clone(), t.action.clone()))
        .collect();
    due.sort_by(|a, b| a.0.cmp(&b.0));
    for (id, _) in &due {
        world.fired_triggers.insert(id.clone());
    }
    due
}

/// Apply one trigger action, returning the lifecycle event it causes.
pub fn apply_action(world: &mut WorldState, action: &TriggerAction) -> Option<EventKind> {
    let i = world.actor_index(action.actor())?;
    let id = world.bodies[i].id.clone();
    let st = &mut world.actors[i];
    match action {
        TriggerAction::ActivateActor { .. } => {
            if st.kin.active {
                return None;
            }
            st.kin.active = true;
            enter_behavior(st);
            Some(EventKind::ActorActivated { actor: id })
        }
        TriggerAction::SetBehavior { behavior, .. } => {
            st.script = behavior.clone();
            if st.kin.active {
                enter_behavior(st);
            }
            None
        }
        TriggerAction::ApplyImpulse { velocity, vertical, .. } => {
            let v = st.kin.velocity() + *velocity;
            st.kin.speed = v.norm();
            if st.kin.speed > 1e-12 {
                st.kin.pose.heading = v.y.atan2(v.x);
            }
            st.kin.vertical_speed += vertical;
            None
        }
        TriggerAction::Despawn { .. } => {
            if !st.kin.active {
                return None;
            }
            st.kin.active = false;
            Some(EventKind::ActorDespawned { actor: id })
        }
    }
}

fn detect_collisions(world: &mut WorldState, events: &mut Vec<WorldEvent>) {
    let ego_obb = world.ego_obb();
    let ego_v = world.ego.velocity();
    for i in 0..world.bodies.len() {
        let kin = world.actors[i].kin;
        let touching = kin.active
            && vertical_overlap(EGO_EXTENT, world.bodies[i].vertical_extent(&kin))
            && obb_penetration(&ego_obb, &world.actor_obb(i)).is_some();
        if !touching {
            world.contacts.remove(&i);
            continue;
        }
        if world.contacts.insert(i) {
            let depth = obb_penetration(&ego_obb, &world.actor_obb(i)).unwrap_or(0.0);
            events.push(WorldEvent {
                tick: world.tick,
                event: EventKind::Collision(CollisionEvent {
                    tick: world.tick,
                    actor_id: world.bodies[i].id.clone(),
                    actor_true_class: world.bodies[i].true_class,
                    relative_speed: (ego_v - kin.velocity()).norm(),
                    penetration: depth,
                }),
            });
        }
    }
}
