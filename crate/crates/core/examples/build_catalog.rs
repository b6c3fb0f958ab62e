//! Regenerates the shipped scenario catalog.
//!
//! Usage: `cargo run --example build_catalog -- <catalog-dir>`

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};

use cornersim::dsl::serialize_scenario;
use cornersim::geometry::{Pose2D, Rect, Vec2};
use cornersim::model::{
    validate_scenario, ActorClass, ActorSpec, BehaviorKind, BehaviorScript, Condition, CornerCaseCategory,
    EvaluationConstraints, Lane, LaneDirection, RoadMap, ScenarioSpec, TrafficDensity, TriggerAction, TriggerSpec,
    Waypoint, WeatherPresetId,
};

use ActorClass as C;
use CornerCaseCategory::{BehaviorAnomaly as Behavior, EvidenceBasedAnomaly as Evidence, StateAnomaly as State};
use WeatherPresetId as W;

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![v(x0, y0), v(x1, y0), v(x1, y1), v(x0, y1)]
}

fn lane(id: &str, pts: &[(f64, f64)], speed: f64, direction: LaneDirection, one_way: bool) -> Lane {
    Lane {
        id: id.into(),
        centerline: pts.iter().map(|&(x, y)| v(x, y)).collect(),
        width: 3.5,
        speed_limit: speed,
        direction,
        one_way,
    }
}

fn anchors(pts: impl IntoIterator<Item = (f64, f64, f64)>) -> BTreeMap<String, Pose2D> {
    pts.into_iter()
        .enumerate()
        .map(|(i, (x, y, h))| (format!("traffic-{i:02}"), Pose2D::new(x, y, h)))
        .collect()
}

/// Two eastbound lanes (ego on the right one, y = 0) and one westbound.
fn urban_road() -> RoadMap {
    let fwd = LaneDirection::Forward;
    RoadMap {
        drivable: vec![rect(-31.0, -1.75, 261.0, 8.75)],
        lanes: vec![
            lane("east-1", &[(-30.0, 0.0), (260.0, 0.0)], 12.0, fwd, false),
            lane("east-2", &[(-30.0, 3.5), (260.0, 3.5)], 12.0, fwd, false),
            lane("west-1", &[(-30.0, 7.0), (260.0, 7.0)], 12.0, LaneDirection::Backward, false),
        ],
        anchors: anchors((0..12).map(|i| (25.0 + 18.0 * i as f64, 7.0, PI))),
    }
}

/// Two-lane one-way street, eastbound.
fn one_way_street() -> RoadMap {
    let fwd = LaneDirection::Forward;
    RoadMap {
        drivable: vec![rect(-31.0, -1.75, 261.0, 5.25)],
        lanes: vec![
            lane("east-1", &[(-30.0, 0.0), (260.0, 0.0)], 10.0, fwd, true),
            lane("east-2", &[(-30.0, 3.5), (260.0, 3.5)], 10.0, fwd, true),
        ],
        anchors: anchors((0..10).map(|i| (30.0 + 20.0 * i as f64, 3.5, 0.0))),
    }
}

/// East-west two-lane road crossing a north-south road at x = 80, with
/// turn connectors from the eastbound lane.
fn junction() -> RoadMap {
    let fwd = LaneDirection::Forward;
    RoadMap {
        drivable: vec![rect(-31.0, -1.75, 261.0, 5.25), rect(76.5, -121.0, 83.5, 121.0)],
        lanes: vec![
            lane("east-1", &[(-30.0, 0.0), (260.0, 0.0)], 12.0, fwd, false),
            lane("west-1", &[(-30.0, 3.5), (260.0, 3.5)], 12.0, LaneDirection::Backward, false),
            lane("north-1", &[(81.75, -120.0), (81.75, 120.0)], 10.0, fwd, false),
            lane("south-1", &[(78.25, -120.0), (78.25, 120.0)], 10.0, LaneDirection::Backward, false),
            lane(
                "turn-right",
                &[(72.0, -0.3), (76.5, -1.5), (78.25, -6.0), (78.25, -20.0)],
                6.0,
                fwd,
                false,
            ),
            lane(
                "turn-left",
                &[(72.0, 0.4), (77.0, 2.6), (81.75, 8.0), (81.75, 20.0)],
                6.0,
                fwd,
                false,
            ),
        ],
        anchors: anchors(
            (0..6)
                .map(|i| (30.0 + 30.0 * i as f64, 3.5, PI))
                .chain((0..3).map(|i| (81.75, -100.0 + 25.0 * i as f64, FRAC_PI_2)))
                .chain((0..3).map(|i| (78.25, 100.0 - 25.0 * i as f64, -FRAC_PI_2))),
        ),
    }
}

fn ring_points(cx: f64, cy: f64, r: f64, n: usize) -> Vec<(f64, f64)> {
    (0..=n)
        .map(|i| {
            let a = PI + 2.0 * PI * i as f64 / n as f64;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

/// Approach road from the west into a roundabout centred at (90, 0).
fn roundabout() -> RoadMap {
    let fwd = LaneDirection::Forward;
    let outer: Vec<Vec2> = ring_points(90.0, 0.0, 27.0, 24).into_iter().take(24).map(|(x, y)| v(x, y)).collect();
    let ring = ring_points(90.0, 0.0, 22.0, 24);
    let ring_lane: Vec<(f64, f64)> = ring.iter().rev().copied().collect();
    RoadMap {
        drivable: vec![rect(-31.0, -1.75, 66.0, 5.25), outer],
        lanes: vec![
            lane("approach-east", &[(-30.0, 0.0), (66.0, 0.0)], 10.0, fwd, false),
            lane("approach-west", &[(-30.0, 3.5), (66.0, 3.5)], 10.0, LaneDirection::Backward, false),
            lane("ring", &ring_lane, 8.0, fwd, true),
        ],
        anchors: anchors(
            (0..6)
                .map(|i| (0.0 + 12.0 * i as f64, 3.5, PI))
                .chain((1..6).map(|i| {
                    let a = PI - 2.0 * PI * (i as f64 * 4.0) / 24.0;
                    (90.0 + 22.0 * a.cos(), 22.0 * a.sin(), a - FRAC_PI_2)
                })),
        ),
    }
}

/// Three-lane motorway carriageway, eastbound.
fn highway() -> RoadMap {
    let fwd = LaneDirection::Forward;
    RoadMap {
        drivable: vec![rect(-51.0, -1.75, 701.0, 8.75)],
        lanes: vec![
            lane("east-1", &[(-50.0, 0.0), (700.0, 0.0)], 25.0, fwd, true),
            lane("east-2", &[(-50.0, 3.5), (700.0, 3.5)], 25.0, fwd, true),
            lane("east-3", &[(-50.0, 7.0), (700.0, 7.0)], 25.0, fwd, true),
        ],
        anchors: anchors(
            (0..6)
                .map(|i| (40.0 + 45.0 * i as f64, 3.5, 0.0))
                .chain((0..6).map(|i| (20.0 + 50.0 * i as f64, 7.0, 0.0))),
        ),
    }
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, x)| (k.to_string(), *x)).collect()
}

fn still() -> BehaviorScript {
    BehaviorScript::stationary()
}

fn route(pts: &[(f64, f64, f64)], extra: &[(&str, f64)]) -> BehaviorScript {
    BehaviorScript {
        kind: BehaviorKind::WaypointFollow,
        waypoints: pts.iter().map(|&(x, y, speed)| Waypoint { x, y, speed }).collect(),
        parameters: params(extra),
        target: None,
    }
}

fn ballistic(vx: f64, vy: f64, vz: f64, h: f64) -> BehaviorScript {
    BehaviorScript {
        kind: BehaviorKind::Ballistic,
        waypoints: vec![],
        parameters: params(&[("vx", vx), ("vy", vy), ("vz", vz), ("release_height", h)]),
        target: None,
    }
}

fn rolling(kv: &[(&str, f64)]) -> BehaviorScript {
    BehaviorScript {
        kind: BehaviorKind::Rolling,
        waypoints: vec![],
        parameters: params(kv),
        target: None,
    }
}

fn pursuit(target: &str, speed: f64, turn_rate: f64) -> BehaviorScript {
    BehaviorScript {
        kind: BehaviorKind::Pursuit,
        waypoints: vec![],
        parameters: params(&[("speed", speed), ("turn_rate", turn_rate)]),
        target: Some(target.into()),
    }
}

fn door(rate: f64, max: f64) -> BehaviorScript {
    BehaviorScript {
        kind: BehaviorKind::ScriptedDoorSwing,
        waypoints: vec![],
        parameters: params(&[("swing_rate", rate), ("max_angle", max)]),
        target: None,
    }
}

struct Actor {
    id: &'static str,
    class: ActorClass,
    apparent: Option<ActorClass>,
    at: (f64, f64, f64),
    size: (f64, f64),
    elevation: f64,
    behavior: BehaviorScript,
    active: bool,
}

fn actor(id: &'static str, class: ActorClass, at: (f64, f64, f64), behavior: BehaviorScript) -> Actor {
    let size = match class {
        C::Car => (4.5, 1.8),
        C::EmergencyVehicle => (5.5, 2.2),
        C::Cyclist => (1.8, 0.6),
        C::Pedestrian => (0.5, 0.6),
        C::ChildPedestrian => (0.4, 0.45),
        C::Animal => (1.0, 0.4),
        C::Ball => (0.22, 0.22),
        C::Luggage => (0.7, 0.45),
        C::ShoppingCart => (1.0, 0.6),
        C::Barrel => (0.6, 0.6),
        C::CarDoor => (1.1, 0.1),
        C::Billboard => (0.4, 4.0),
        C::StaticObstacle => (3.0, 0.6),
        _ => (0.3, 0.8),
    };
    Actor {
        id,
        class,
        apparent: None,
        at,
        size,
        elevation: 0.0,
        behavior,
        active: true,
    }
}

impl Actor {
    fn looks_like(mut self, c: ActorClass) -> Self {
        self.apparent = Some(c);
        self
    }
    fn hidden(mut self) -> Self {
        self.active = false;
        self
    }
    fn size(mut self, l: f64, w: f64) -> Self {
        self.size = (l, w);
        self
    }
    fn raised(mut self, h: f64) -> Self {
        self.elevation = h;
        self
    }
    fn build(self) -> ActorSpec {
        ActorSpec {
            id: self.id.into(),
            true_class: self.class,
            apparent_class: self.apparent,
            spawn: Pose2D::new(self.at.0, self.at.1, self.at.2),
            length: self.size.0,
            width: self.size.1,
            elevation: self.elevation,
            behavior: self.behavior,
            initially_active: self.active,
        }
    }
}

fn at_time(id: &str, t: f64, action: TriggerAction) -> TriggerSpec {
    TriggerSpec {
        id: id.into(),
        conditions: vec![Condition::TimeAtLeast { t }],
        action,
        one_shot: true,
    }
}

fn when(id: &str, conditions: Vec<Condition>, action: TriggerAction) -> TriggerSpec {
    TriggerSpec {
        id: id.into(),
        conditions,
        action,
        one_shot: true,
    }
}

fn activate(a: &str) -> TriggerAction {
    TriggerAction::ActivateActor { actor: a.into() }
}

fn set(a: &str, b: BehaviorScript) -> TriggerAction {
    TriggerAction::SetBehavior {
        actor: a.into(),
        behavior: b,
    }
}

fn despawn(a: &str) -> TriggerAction {
    TriggerAction::Despawn { actor: a.into() }
}

struct Base {
    id: &'static str,
    name: &'static str,
    category: CornerCaseCategory,
    description: &'static str,
    map: RoadMap,
    ego: (f64, f64, f64),
    ego_speed: f64,
    goal: (f64, f64, f64, f64),
    weather: WeatherPresetId,
    density: TrafficDensity,
    tn: f64,
}

fn scenario(b: Base, actors: Vec<Actor>, triggers: Vec<TriggerSpec>) -> ScenarioSpec {
    ScenarioSpec {
        id: b.id.into(),
        name: b.name.into(),
        category: b.category,
        description: b.description.into(),
        variant: false,
        map: b.map,
        ego_spawn: Pose2D::new(b.ego.0, b.ego.1, b.ego.2),
        ego_speed: b.ego_speed,
        goal_region: Rect::new(v(b.goal.0, b.goal.1), v(b.goal.2, b.goal.3)),
        actors: actors.into_iter().map(Actor::build).collect(),
        triggers,
        weather: b.weather,
        traffic_density: b.density,
        t0: 0.0,
        tn: b.tn,
        stationary_timeout: 10.0,
        constraints: EvaluationConstraints::default(),
        default_seed: 42,
    }
}

fn urban(id: &'static str, name: &'static str, category: CornerCaseCategory, description: &'static str) -> Base {
    Base {
        id,
        name,
        category,
        description,
        map: urban_road(),
        ego: (0.0, 0.0, 0.0),
        ego_speed: 10.0,
        goal: (150.0, -1.75, 160.0, 1.75),
        weather: W::ClearNoon,
        density: TrafficDensity::Low,
        tn: 30.0,
    }
}

/// A roadside billboard whose artwork perception reads as `looks`.
fn billboard_case(
    id: &'static str,
    name: &'static str,
    description: &'static str,
    looks: ActorClass,
    x: f64,
    at_junction: bool,
) -> ScenarioSpec {
    let mut base = urban(id, name, State, description);
    if at_junction {
        base.map = junction();
    }
    let board = actor("billboard", C::Billboard, (x, -4.5, 0.0), still())
        .looks_like(looks)
        .hidden();
    scenario(base, vec![board], vec![at_time("ad-switches-on", 1.0, activate("billboard"))])
}

fn stop_tshirt_pedestrian(crosswalk: bool) -> ScenarioSpec {
    let (id, name, description) = if crosswalk {
        (
            "stop-tshirt-pedestrian-crosswalk",
            "STOP t-shirt pedestrian on a crosswalk",
            "A pedestrian wearing a shirt printed with a STOP sign crosses at a zebra crossing.\nPerception reports a stop sign that moves across the lane.",
        )
    } else {
        (
            "stop-tshirt-pedestrian",
            "STOP t-shirt pedestrian",
            "A pedestrian wearing a shirt printed with a STOP sign walks along the sidewalk.\nPerception reports a stop sign that moves.",
        )
    };
    let base = urban(id, name, State, description);
    let path = if crosswalk {
        route(&[(70.0, -4.0, 1.4), (70.0, 10.5, 1.4)], &[])
    } else {
        route(&[(60.0, -3.5, 1.4), (140.0, -3.5, 1.4)], &[])
    };
    let ped = actor("walker", C::Pedestrian, (if crosswalk { 70.0 } else { 60.0 }, -4.0, FRAC_PI_2), still())
        .looks_like(C::StopSign);
    scenario(base, vec![ped], vec![at_time("starts-walking", 1.5, set("walker", path))])
}

fn lane_blocking_crash() -> ScenarioSpec {
    let base = urban(
        "lane-blocking-crash",
        "Lane-blocking crash",
        Behavior,
        "Two cars have collided and block the ego lane; a driver climbs out toward the kerb.",
    );
    let actors = vec![
        actor("crashed-a", C::Car, (95.0, 0.2, 0.5), still()),
        actor("crashed-b", C::Car, (99.5, -0.4, -0.3), still()),
        actor("driver", C::Pedestrian, (97.0, 1.6, -FRAC_PI_2), still()).hidden(),
    ];
    let triggers = vec![
        at_time("driver-exits", 2.0, activate("driver")),
        at_time("driver-walks", 2.5, set("driver", route(&[(97.0, 1.6, 1.0), (97.0, -4.0, 1.0)], &[]))),
    ];
    scenario(base, actors, triggers)
}

fn emergency_roundabout_exit() -> ScenarioSpec {
    let mut base = urban(
        "emergency-roundabout-exit",
        "Emergency vehicle cutting a roundabout exit",
        Behavior,
        "An ambulance on call leaves the roundabout through the entry the ego is approaching, cutting across its lane.",
    );
    base.map = roundabout();
    base.ego = (-20.0, 0.0, 0.0);
    base.goal = (56.0, -1.75, 62.0, 1.75);
    base.tn = 25.0;
    let start = (90.0 + 22.0 * (0.5 * PI).cos(), 22.0 * (0.5 * PI).sin());
    let exit = route(
        &[
            (start.0, start.1, 9.0),
            (90.0 + 22.0 * (0.7 * PI).cos(), 22.0 * (0.7 * PI).sin(), 9.0),
            (66.0, 1.0, 9.0),
            (52.0, 1.2, 9.0),
            (35.0, 3.5, 9.0),
            (-30.0, 3.5, 9.0),
        ],
        &[("despawn_at_end", 1.0)],
    );
    let actors = vec![actor("ambulance", C::EmergencyVehicle, (start.0, start.1, PI), still()).hidden()];
    let triggers = vec![
        at_time("siren", 2.0, activate("ambulance")),
        at_time("cuts-exit", 2.05, set("ambulance", exit)),
    ];
    scenario(base, actors, triggers)
}

fn police_car_chase() -> ScenarioSpec {
    let mut base = urban(
        "police-car-chase",
        "Police car chase through a junction",
        Behavior,
        "A fleeing car runs the junction from the south at speed with a police car in pursuit close behind.",
    );
    base.map = junction();
    let actors = vec![
        actor("fugitive", C::Car, (81.75, -90.0, FRAC_PI_2), still()),
        actor("police", C::EmergencyVehicle, (81.75, -102.0, FRAC_PI_2), still()),
    ];
    let triggers = vec![
        at_time("flee", 1.0, set("fugitive", route(&[(81.75, -90.0, 16.0), (81.75, 120.0, 16.0)], &[("despawn_at_end", 1.0)]))),
        at_time("pursue", 1.5, set("police", pursuit("fugitive", 16.0, 1.5))),
    ];
    scenario(base, actors, triggers)
}

fn hesitant_crossing(animal: bool) -> ScenarioSpec {
    let (id, name, description, class) = if animal {
        (
            "hesitant-crosswalk-animal",
            "Hesitant animal at a crossing",
            "A dog steps onto the road, stops in the ego lane, backs off and then darts across.",
            C::Animal,
        )
    } else {
        (
            "hesitant-crosswalk-pedestrian",
            "Hesitant pedestrian at a crosswalk",
            "A pedestrian starts across the zebra crossing, stops in the ego lane, steps back and finally crosses.",
            C::Pedestrian,
        )
    };
    let base = urban(id, name, Behavior, description);
    let x = 75.0;
    let walk = route(
        &[
            (x, -3.5, 1.2),
            (x, -0.6, 1.2),
            (x, -0.5, 0.05),
            (x, -2.5, 1.0),
            (x, -2.6, 0.05),
            (x, 10.0, 1.6),
        ],
        &[],
    );
    let who = actor("crosser", class, (x, -3.5, FRAC_PI_2), still());
    scenario(base, vec![who], vec![at_time("steps-out", 3.0, set("crosser", walk))])
}

fn erratic_biker(wet: bool) -> ScenarioSpec {
    let mut base = if wet {
        urban(
            "erratic-biker-wet",
            "Erratic cyclist on a wet road",
            Behavior,
            "A cyclist ahead weaves across the ego lane on a wet road where braking distances grow.",
        )
    } else {
        urban(
            "erratic-biker",
            "Erratic cyclist",
            Behavior,
            "A cyclist ahead in the ego lane swerves unpredictably from kerb to lane line.",
        )
    };
    if wet {
        base.weather = W::WetNoon;
    }
    let mut pts = vec![(60.0, -1.0, 4.0)];
    for i in 1..12 {
        let y = if i % 2 == 0 { -1.2 } else { 1.2 };
        pts.push((60.0 + 12.0 * i as f64, y, 4.0));
    }
    pts.push((260.0, -1.0, 4.0));
    let bike = actor("cyclist", C::Cyclist, (60.0, -1.0, 0.0), still());
    scenario(base, vec![bike], vec![at_time("starts-weaving", 0.5, set("cyclist", route(&pts, &[])))])
}

fn shopping_cart_downhill() -> ScenarioSpec {
    let base = urban(
        "shopping-cart-downhill",
        "Runaway shopping cart",
        Behavior,
        "An unattended shopping cart starts rolling off the sloped sidewalk into the road.",
    );
    let cart = actor("cart", C::ShoppingCart, (72.0, -4.0, 1.2), still());
    scenario(
        base,
        vec![cart],
        vec![at_time("rolls", 3.0, set("cart", rolling(&[("accel", 0.8), ("max_speed", 2.5)])))],
    )
}

fn wrong_way(night: bool) -> ScenarioSpec {
    let mut base = if night {
        urban(
            "wrong-way-one-way-night",
            "Wrong-way driver at night",
            Behavior,
            "At night a car drives the wrong way down the one-way street in the ego lane.",
        )
    } else {
        urban(
            "wrong-way-one-way",
            "Wrong-way driver on a one-way street",
            Behavior,
            "A car drives the wrong way down the one-way street in the ego lane and swerves late.",
        )
    };
    base.map = one_way_street();
    if night {
        base.weather = W::ClearNight;
    }
    let ghost = actor("ghost-driver", C::Car, (150.0, 0.0, PI), still());
    let path = route(
        &[(150.0, 0.0, 8.0), (70.0, 0.0, 8.0), (55.0, 3.5, 8.0), (-30.0, 3.5, 8.0)],
        &[("despawn_at_end", 1.0)],
    );
    scenario(base, vec![ghost], vec![at_time("enters-street", 1.0, set("ghost-driver", path))])
}

fn ball_over_obstacle_highway() -> ScenarioSpec {
    let mut base = urban(
        "ball-over-obstacle-highway",
        "Ball over a highway barrier",
        Behavior,
        "A ball is thrown over the roadside barrier and bounces across the motorway lanes.",
    );
    base.map = highway();
    base.ego_speed = 22.0;
    base.goal = (420.0, -1.75, 430.0, 1.75);
    let actors = vec![
        actor("barrier", C::StaticObstacle, (200.0, -3.2, 0.0), still()).size(20.0, 0.6),
        actor("ball", C::Ball, (205.0, -4.5, FRAC_PI_2), still()).hidden(),
    ];
    let triggers = vec![
        at_time("thrown", 6.0, activate("ball")),
        at_time("flight", 6.05, set("ball", ballistic(-0.5, 5.0, 3.0, 1.2))),
    ];
    scenario(base, actors, triggers)
}

fn ball_evidence_child(dusk: bool) -> ScenarioSpec {
    let mut base = if dusk {
        urban(
            "ball-evidence-child-dusk",
            "Ball then child at dusk",
            Evidence,
            "At sunset a ball rolls out between parked vans and a child runs after it.",
        )
    } else {
        urban(
            "ball-evidence-child",
            "Ball announcing a child",
            Evidence,
            "A ball rolls into the road from between parked vans; the child chasing it follows moments later.",
        )
    };
    if dusk {
        base.weather = W::ClearSunset;
    }
    let actors = vec![
        actor("van", C::Car, (66.5, -3.1, 0.0), still()).size(5.5, 2.0),
        actor("parked", C::Car, (56.0, -3.0, 0.0), still()),
        actor("ball", C::Ball, (61.2, -4.2, FRAC_PI_2), still()),
        actor("child", C::ChildPedestrian, (63.0, -4.3, FRAC_PI_2), still()).hidden(),
    ];
    let triggers = vec![
        at_time("ball-rolls", 2.6, set("ball", rolling(&[("accel", -0.1), ("initial_speed", 2.5)]))),
        when(
            "child-appears",
            vec![Condition::ActorWithin {
                actor: "ball".into(),
                point: v(61.2, 2.2),
                radius: 0.6,
            }],
            activate("child"),
        ),
        when(
            "child-runs",
            vec![Condition::ActorWithin {
                actor: "ball".into(),
                point: v(61.2, 2.6),
                radius: 0.6,
            }],
            set("child", route(&[(63.0, -4.3, 2.5), (63.0, 11.0, 2.5)], &[])),
        ),
    ];
    scenario(base, actors, triggers)
}

fn luggage_fall(night: bool) -> ScenarioSpec {
    let mut base = if night {
        urban(
            "luggage-fall-night",
            "Luggage falling from a car roof at night",
            Evidence,
            "At night a suitcase strapped loosely to a car roof in the next lane slides off into the ego lane.",
        )
    } else {
        urban(
            "luggage-fall",
            "Luggage falling from a car roof",
            Evidence,
            "Loosely strapped luggage on the roof of a car in the next lane falls off and slides into the ego lane.\nThe owner stops further on and walks back for it.",
        )
    };
    if night {
        base.weather = W::ClearNight;
    }
    let carrier = route(&[(30.0, 3.5, 6.0), (260.0, 3.5, 6.0)], &[("despawn_at_end", 1.0)]);
    let actors = vec![
        actor("carrier", C::Car, (30.0, 3.5, 0.0), carrier.clone()),
        actor("luggage", C::Luggage, (29.0, 3.5, 0.0), route(&[(29.0, 3.5, 6.0), (260.0, 3.5, 6.0)], &[])).raised(1.5),
    ];
    let triggers = vec![
        at_time("strap-snaps", 2.0, set("luggage", ballistic(6.0, -2.5, 0.0, 1.5))),
        at_time("owner-retrieves", 9.0, despawn("luggage")),
    ];
    scenario(base, actors, triggers)
}

fn parked_car_door_open(dense: bool) -> ScenarioSpec {
    let mut base = if dense {
        urban(
            "parked-car-door-open-dense",
            "Parked car door opening in dense traffic",
            Evidence,
            "In heavy traffic the driver of a parked car, visible through the window, swings the door open into the ego lane.",
        )
    } else {
        urban(
            "parked-car-door-open",
            "Parked car door opening",
            Evidence,
            "A driver sits in a car parked at the kerb and swings the door open into the ego lane.",
        )
    };
    if dense {
        base.density = TrafficDensity::High;
    }
    let actors = vec![
        actor("parked-car", C::Car, (80.0, -2.75, 0.0), still()),
        actor("door", C::CarDoor, (80.1, -1.75, PI), still()),
        actor("driver", C::Pedestrian, (80.0, -2.4, FRAC_PI_2), still()).hidden(),
    ];
    let triggers = vec![
        at_time("driver-seated", 0.5, activate("driver")),
        when(
            "door-opens",
            vec![Condition::TimeAtLeast { t: 1.0 }, Condition::EgoWithin {
                point: v(80.0, 0.0),
                radius: 24.0,
            }],
            set("door", door(1.5, 1.1)),
        ),
        when(
            "driver-steps-out",
            vec![Condition::TimeAtLeast { t: 1.0 }, Condition::EgoWithin {
                point: v(80.0, 0.0),
                radius: 16.0,
            }],
            set("driver", route(&[(80.0, -2.4, 1.0), (80.0, -0.2, 1.0), (80.0, -0.1, 0.05)], &[])),
        ),
    ];
    scenario(base, actors, triggers)
}

fn worker_behind_van() -> ScenarioSpec {
    let base = urban(
        "worker-behind-van",
        "Worker stepping out behind a van",
        Evidence,
        "A delivery van stands half in the ego lane with cones behind it; a worker steps out from behind the van.",
    );
    let actors = vec![
        actor("van", C::Car, (90.0, -2.2, 0.0), still()).size(6.0, 2.2),
        actor("cone", C::StaticObstacle, (85.5, -1.6, 0.0), still()).size(0.4, 0.4),
        actor("worker", C::Pedestrian, (93.5, -2.0, FRAC_PI_2), still()).hidden(),
    ];
    let triggers = vec![
        at_time("worker-appears", 1.0, activate("worker")),
        when(
            "worker-steps-out",
            vec![Condition::EgoWithin {
                point: v(93.5, 0.0),
                radius: 30.0,
            }],
            set("worker", route(&[(93.5, -2.0, 1.2), (93.5, 1.5, 1.2), (93.5, 1.6, 0.05)], &[])),
        ),
    ];
    scenario(base, actors, triggers)
}

fn courier_barrel_fall() -> ScenarioSpec {
    let base = urban(
        "courier-barrel-fall",
        "Barrel falling off a courier truck",
        Evidence,
        "A courier truck ahead carries loosely stacked barrels; one falls off the back and rolls in the ego lane.",
    );
    let truck = route(&[(55.0, 0.0, 7.0), (260.0, 0.0, 7.0)], &[("despawn_at_end", 1.0)]);
    let actors = vec![
        actor("truck", C::Car, (55.0, 0.0, 0.0), truck).size(7.0, 2.3),
        actor("barrel", C::Barrel, (50.9, 0.3, 0.0), route(&[(50.9, 0.3, 7.0), (255.9, 0.3, 7.0)], &[])).raised(1.1),
    ];
    let triggers = vec![at_time("falls", 3.0, set("barrel", ballistic(1.5, -0.4, 0.8, 1.1)))];
    scenario(base, actors, triggers)
}

fn ems_hospital_exit() -> ScenarioSpec {
    let mut base = urban(
        "ems-hospital-exit",
        "Ambulance leaving a hospital",
        Evidence,
        "Next to a hospital sign an ambulance pulls out of the side street across the ego lane.",
    );
    base.map = junction();
    let actors = vec![
        actor("hospital-sign", C::ParkingSign, (70.0, -4.0, 0.0), still()),
        actor("ambulance", C::EmergencyVehicle, (81.75, -30.0, FRAC_PI_2), still()),
    ];
    let exit = route(
        &[(81.75, -30.0, 7.0), (81.75, -3.0, 7.0), (84.0, 2.5, 7.0), (95.0, 3.5, 9.0), (260.0, 3.5, 9.0)],
        &[("despawn_at_end", 1.0)],
    );
    scenario(base, actors, vec![at_time("pulls-out", 3.5, set("ambulance", exit))])
}

fn stop_sign_ad(night: bool) -> ScenarioSpec {
    let (id, name, description) = if night {
        (
            "stop-sign-ad-night",
            "STOP advertisement at night",
            "At night an illuminated billboard shows a life-size STOP sign beside the road.",
        )
    } else {
        (
            "stop-sign-ad",
            "STOP sign advertisement",
            "A billboard advertising a road-safety campaign shows an exact STOP sign beside the road.",
        )
    };
    let mut s = billboard_case(id, name, description, C::StopSign, 60.0, false);
    if night {
        s.weather = W::ClearNight;
    }
    s
}

fn catalog() -> Vec<ScenarioSpec> {
    let mut all = vec![
        billboard_case(
            "carla-cola-video-ad",
            "Carla-Cola video advertisement",
            "A video billboard loops a clip showing a traffic light.",
            C::TrafficLight,
            65.0,
            false,
        ),
        billboard_case(
            "party-billboard-traffic-light",
            "Party billboard with a traffic light",
            "A billboard at the junction advertises a party with a large red traffic light.",
            C::TrafficLight,
            70.0,
            true,
        ),
        billboard_case(
            "sneeze-stop-billboard",
            "Sneeze-stop billboard",
            "A cold-medicine billboard shows a STOP sign telling you to stop sneezing.",
            C::StopSign,
            65.0,
            false,
        ),
        billboard_case(
            "bar-members-parking-sign",
            "Bar members parking sign",
            "A bar's tongue-in-cheek parking sign reserves kerbside spaces for members only.",
            C::ParkingSign,
            55.0,
            false,
        ),
        billboard_case(
            "soft-drink-turn-ad",
            "Soft-drink turn advertisement",
            "A soft-drink advertisement at the junction shows a turn arrow sign.",
            C::TurnSign,
            70.0,
            true,
        ),
        billboard_case(
            "yield-to-fun-billboard",
            "Yield-to-fun billboard",
            "A theme-park billboard shows a yield sign reading YIELD TO FUN.",
            C::YieldSign,
            60.0,
            false,
        ),
        billboard_case(
            "go-for-sale-green-light-ad",
            "Go-for-sale green light advertisement",
            "A shop advertisement at the junction shows a green traffic light with GO FOR SALE.",
            C::TrafficLight,
            70.0,
            true,
        ),
        billboard_case(
            "stop-for-dinner-billboard",
            "Stop-for-dinner billboard",
            "A diner billboard shows a STOP sign inviting drivers to stop for dinner.",
            C::StopSign,
            70.0,
            false,
        ),
        stop_sign_ad(false),
        stop_tshirt_pedestrian(false),
        lane_blocking_crash(),
        emergency_roundabout_exit(),
        police_car_chase(),
        hesitant_crossing(false),
        erratic_biker(false),
        shopping_cart_downhill(),
        wrong_way(false),
        ball_over_obstacle_highway(),
        ball_evidence_child(false),
        luggage_fall(false),
        parked_car_door_open(false),
        worker_behind_van(),
        courier_barrel_fall(),
        ems_hospital_exit(),
    ];
    let mut variants = vec![
        stop_sign_ad(true),
        stop_tshirt_pedestrian(true),
        hesitant_crossing(true),
        wrong_way(true),
        erratic_biker(true),
        luggage_fall(true),
        ball_evidence_child(true),
        parked_car_door_open(true),
    ];
    for s in &mut variants {
        s.variant = true;
    }
    all.extend(variants);
    all
}

fn main() {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog"));
    for spec in catalog() {
        let report = validate_scenario(&spec);
        assert!(report.is_valid(), "{}: {report}", spec.id);
        let sub = dir.join(spec.category.short_name());
        fs::create_dir_all(&sub).expect("create catalog dir");
        let text = serialize_scenario(&spec).expect("serialize");
        fs::write(sub.join(format!("{}.3cs", spec.id)), text).expect("write scenario");
    }
}
