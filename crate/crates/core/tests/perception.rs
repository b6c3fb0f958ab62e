use cornersim::dsl::{default_catalog_dir, load_catalog};
use cornersim::engine::{init_world, step, ContinuousControl, WorldState};
use cornersim::geometry::{Obb, Pose2D, Vec2};
use cornersim::model::{ActorClass, ActorSpec, BehaviorScript, ScenarioSpec, TrafficDensity, WeatherPresetId};
use cornersim::perception::{detect_entities, observe, render_occupancy, sense_lidar, CellCode, OccupancyRaster, PerceptionConfig};

fn empty_road(weather: WeatherPresetId) -> ScenarioSpec {
    let cat = load_catalog(&default_catalog_dir(), true).unwrap();
    let mut s = cat.get("stop-sign-ad").unwrap().clone();
    s.actors.clear();
    s.triggers.clear();
    s.traffic_density = TrafficDensity::None;
    s.weather = weather;
    s
}

fn body(id: &str, class: ActorClass, x: f64, y: f64, length: f64, width: f64) -> ActorSpec {
    ActorSpec {
        id: id.into(),
        true_class: class,
        apparent_class: None,
        spawn: Pose2D::new(x, y, 0.0),
        length,
        width,
        elevation: 0.0,
        behavior: BehaviorScript::stationary(),
        initially_active: true,
    }
}

fn exact() -> PerceptionConfig {
    PerceptionConfig {
        lidar_noise: false,
        ..PerceptionConfig::default()
    }
}

fn lidar(s: &ScenarioSpec, cfg: &PerceptionConfig) -> Vec<f64> {
    let mut w = init_world(s, 1).unwrap();
    observe(&mut w, &s.goal_region, &s.weather.preset(), cfg).lidar
}

#[test]
fn wall_ahead_reads_its_distance() {
    let mut s = empty_road(WeatherPresetId::ClearNoon);
    s.actors.push(body("wall", ActorClass::StaticObstacle, 10.2, 0.0, 0.4, 3.0));
    let r = lidar(&s, &exact());
    assert_eq!(r.len(), 72);
    assert!((r[0] - 10.0).abs() < 1e-9, "{}", r[0]);
    // the ray 5 degrees left meets the face at 10 / cos(5 deg)
    assert!((r[1] - 10.0 / 5f64.to_radians().cos()).abs() < 1e-9);
}

#[test]
fn empty_world_reads_the_cap_exactly() {
    let s = empty_road(WeatherPresetId::ClearNoon);
    // noise on: the sentinel still carries no noise
    assert!(lidar(&s, &PerceptionConfig::default()).iter().all(|&r| r == 50.0));
}

#[test]
fn fog_caps_at_visibility() {
    let mut s = empty_road(WeatherPresetId::FogMorning);
    s.actors.push(body("wall", ActorClass::StaticObstacle, 30.2, 0.0, 0.4, 3.0));
    let r = lidar(&s, &PerceptionConfig::default());
    assert_eq!(r[0], 20.0);
}

#[test]
fn noise_is_seeded() {
    let mut s = empty_road(WeatherPresetId::HardRainNoon);
    s.actors.push(body("wall", ActorClass::StaticObstacle, 10.2, 0.0, 0.4, 30.0));
    let cfg = PerceptionConfig::default();
    let a = lidar(&s, &cfg);
    let b = lidar(&s, &cfg);
    assert_eq!(a, b);
    let clean = lidar(&s, &exact());
    assert_ne!(a, clean);
    assert!(a.iter().all(|&r| r > 0.0 && r <= 50.0));
    // another seed draws other noise
    let mut w = init_world(&s, 2).unwrap();
    let other = observe(&mut w, &s.goal_region, &s.weather.preset(), &cfg).lidar;
    assert_ne!(a, other);
    // the noise stream advances per tick
    let mut w = init_world(&s, 1).unwrap();
    let mut rng = w.lidar_rng.clone();
    let first = sense_lidar(&w, &s.weather.preset(), &cfg, &mut rng);
    w.lidar_rng = rng;
    let second = sense_lidar(&w, &s.weather.preset(), &cfg, &mut w.lidar_rng.clone());
    assert_ne!(first, second);
}

/// Segment vs box by clipping the segment against the slab of each axis.
fn segment_blocked(p: Vec2, q: Vec2, o: &Obb) -> bool {
    let [ax, ay] = o.axes();
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (axis, half) in [(ax, o.half_length), (ay, o.half_width)] {
        let s = (p - o.center).dot(axis);
        let d = (q - p).dot(axis);
        if d.abs() < 1e-15 {
            if s.abs() > half {
                return false;
            }
            continue;
        }
        let (mut a, mut b) = ((-half - s) / d, (half - s) / d);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        t0 = t0.max(a);
        t1 = t1.min(b);
        if t0 > t1 {
            return false;
        }
    }
    true
}

fn inside(p: Vec2, o: &Obb) -> bool {
    let [ax, ay] = o.axes();
    let d = p - o.center;
    d.dot(ax).abs() <= o.half_length && d.dot(ay).abs() <= o.half_width
}

fn corners(o: &Obb) -> [Vec2; 4] {
    let [ax, ay] = o.axes();
    let (l, w) = (ax.scale(o.half_length), ay.scale(o.half_width));
    [o.center + l + w, o.center - l + w, o.center - l - w, o.center + l - w]
}

/// Two rectangles meet when an edge of one crosses the other or one holds
/// the other's center.
fn boxes_meet(a: &Obb, b: &Obb) -> bool {
    let edges_cross = |p: &Obb, q: &Obb| {
        let c = corners(p);
        (0..4).any(|k| segment_blocked(c[k], c[(k + 1) % 4], q))
    };
    edges_cross(a, b) || edges_cross(b, a) || inside(a.center, b) || inside(b.center, a)
}

fn visible_by_oracle(w: &WorldState, i: usize) -> bool {
    let from = w.ego.pose.position();
    let target = w.actor_obb(i);
    w.active_indices()
        .filter(|&j| j != i && w.actors[j].kin.height < 1.6)
        .map(|j| w.actor_obb(j))
        .all(|o| boxes_meet(&o, &target) || !segment_blocked(from, target.center, &o))
}

#[test]
fn occluded_child_is_not_detected() {
    let mut s = empty_road(WeatherPresetId::ClearNoon);
    s.actors.push(body("van", ActorClass::Car, 30.0, -3.0, 5.5, 2.0));
    s.actors.push(body("child", ActorClass::ChildPedestrian, 33.0, -3.3, 0.4, 0.45));
    s.actors.push(body("visible", ActorClass::Pedestrian, 20.0, 4.0, 0.5, 0.6));
    let mut w = init_world(&s, 1).unwrap();
    let det = detect_entities(&w, &s.weather.preset());
    let classes: Vec<ActorClass> = det.iter().map(|d| d.apparent_class).collect();
    assert!(!classes.contains(&ActorClass::ChildPedestrian));
    assert!(classes.contains(&ActorClass::Pedestrian) && classes.contains(&ActorClass::Car));
    // nearest first, with opaque ids
    assert!(det.windows(2).all(|p| p[0].position.norm() <= p[1].position.norm()));
    assert!(det.iter().all(|d| d.id.starts_with("obj-")));
    for i in 0..w.actors.len() {
        let seen = det.iter().any(|d| d.id == format!("obj-{i}"));
        assert_eq!(seen, visible_by_oracle(&w, i), "actor {i}");
    }
    step(&mut w, &ContinuousControl::STOP, &s, &s.weather.preset());
}

#[test]
fn cargo_and_its_carrier_are_both_visible() {
    let cat = load_catalog(&default_catalog_dir(), true).unwrap();
    let s = cat.get("luggage-fall").unwrap();
    let w = init_world(s, s.default_seed).unwrap();
    let det = detect_entities(&w, &s.weather.preset());
    let classes: Vec<ActorClass> = det.iter().map(|d| d.apparent_class).collect();
    assert!(classes.contains(&ActorClass::Luggage) && classes.contains(&ActorClass::Car), "{classes:?}");
    for i in 0..w.actors.len() {
        let seen = det.iter().any(|d| d.id == format!("obj-{i}"));
        let in_range = w.actors[i].kin.pose.position().norm() <= s.weather.preset().visibility_range;
        assert_eq!(seen, in_range && w.actors[i].kin.active && visible_by_oracle(&w, i), "actor {i}");
    }
}

#[test]
fn stop_sign_billboard_reports_apparent_class() {
    let mut s = empty_road(WeatherPresetId::ClearNoon);
    let mut board = body("billboard", ActorClass::Billboard, 15.0, -4.5, 0.4, 4.0);
    board.apparent_class = Some(ActorClass::StopSign);
    s.actors.push(board);
    let w = init_world(&s, 1).unwrap();
    let det = detect_entities(&w, &s.weather.preset());
    assert_eq!(det.len(), 1);
    assert_eq!(det[0].apparent_class, ActorClass::StopSign);
}

#[test]
fn beyond_visibility_is_not_detected() {
    let mut s = empty_road(WeatherPresetId::FogMorning);
    s.actors.push(body("far", ActorClass::Barrel, 21.0, -4.0, 0.6, 0.6));
    s.actors.push(body("near", ActorClass::Barrel, 15.0, -4.0, 0.6, 0.6));
    let w = init_world(&s, 1).unwrap();
    let det = detect_entities(&w, &s.weather.preset());
    assert_eq!(det.len(), 1);
    assert!((det[0].position.x - 15.0).abs() < 1e-12);
}

fn raster(s: &ScenarioSpec) -> (WorldState, OccupancyRaster) {
    let w = init_world(s, 1).unwrap();
    let r = render_occupancy(&w, &s.map, &s.weather.preset(), &PerceptionConfig::default());
    (w, r)
}

#[test]
fn empty_road_raster() {
    let s = empty_road(WeatherPresetId::ClearNoon);
    let (_, r) = raster(&s);
    assert_eq!(r.cells.len(), 128 * 128);
    assert_eq!(r.get(64, 64), CellCode::Ego as u8);
    // drivable strip y in [-1.75, 8.75]; the ego faces +x at the origin
    for row in 0..128 {
        for col in 0..128 {
            let c = OccupancyRaster::cell_center(128, 0.5, row, col);
            if (c.x.abs() <= 3.0 && c.y.abs() <= 1.5) || c.x < -30.5 {
                continue;
            }
            let v = r.get(row, col);
            if c.y > -1.5 && c.y < 8.5 {
                assert_eq!(v, CellCode::Road as u8, "({row},{col}) at {c:?}");
            } else if c.y < -2.0 || c.y > 9.0 {
                assert_eq!(v, CellCode::Free as u8, "({row},{col}) at {c:?}");
            }
        }
    }
    assert_eq!(raster(&s).1, r);
}

#[test]
fn fog_blanks_the_far_field() {
    let s = empty_road(WeatherPresetId::FogMorning);
    let (_, r) = raster(&s);
    let mut unknown = 0;
    for row in 0..128 {
        for col in 0..128 {
            let c = OccupancyRaster::cell_center(128, 0.5, row, col);
            if c.norm() > 20.5 {
                assert_eq!(r.get(row, col), CellCode::Unknown as u8);
                unknown += 1;
            } else if c.norm() < 19.5 {
                assert_ne!(r.get(row, col), CellCode::Unknown as u8);
            }
        }
    }
    assert!(unknown > 0);
}

#[test]
fn detections_and_raster_agree() {
    let cat = load_catalog(&default_catalog_dir(), true).unwrap();
    for id in ["worker-behind-van", "parked-car-door-open-dense", "ball-evidence-child", "police-car-chase"] {
        let s = cat.get(id).unwrap();
        let mut w = init_world(s, s.default_seed).unwrap();
        let weather = s.weather.preset();
        let cfg = PerceptionConfig::default();
        for k in 0..120 {
            if k % 10 == 0 {
                let obs = observe(&mut w, &s.goal_region, &weather, &cfg);
                let r = render_occupancy(&w, &s.map, &weather, &cfg);
                for d in &obs.detections {
                    let code = CellCode::for_group(d.apparent_class.group()) as u8;
                    let o = Obb::new(d.position, d.length / 2.0, d.width / 2.0, d.heading);
                    let hit = (0..128 * 128).any(|n| {
                        let (row, col) = (n / 128, n % 128);
                        let c = OccupancyRaster::cell_center(128, 0.5, row, col);
                        r.cells[n] == code && Obb::new(c, 0.25, 0.25, 0.0).center.distance(o.center) < o.bounding_radius() + 0.36
                    });
                    let off_grid = d.position.x.abs() > 31.0 || d.position.y.abs() > 31.0;
                    assert!(hit || off_grid, "{id} tick {k}: {d:?} has no raster footprint");
                }
            }
            step(&mut w, &ContinuousControl::default(), s, &weather);
        }
    }
}
