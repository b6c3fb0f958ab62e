//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use cornersim::batch::{run_batch, MatrixFile};
use cornersim::dataset::{load_run, replay, write_run, RunManifest};
use cornersim::dsl::{default_catalog_dir, load_catalog, Catalog};
use cornersim::engine::{integrate_ballistic, integrate_bicycle, ContinuousControl, KinematicState, DT};
use cornersim::evaluation::{severity, severity_score, Outcome, TerminalReason};
use cornersim::geometry::{obb_distance, obb_penetration, Obb, Pose2D, Vec2};
use cornersim::model::weather::all_presets;
use cornersim::model::{default_weight_table, ActorClass, ClassGroup, Overrides, TrafficDensity};
use cornersim::perception::observe;
use cornersim::policy::{BuiltinPolicy, PolicyBinding, DEFAULT_HANDSHAKE_TIMEOUT};
use cornersim::runner::{run, RunOptions};
use cornersim::{cli, dataset::Channels};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const G: f64 = 9.81;

fn catalog() -> Catalog {
    load_catalog(&default_catalog_dir(), true).expect("shipped catalog loads")
}

fn fixture_agent(mode: &str) -> PolicyBinding {
    PolicyBinding::External {
        command: vec![env!("CARGO_BIN_EXE_cornersim-fixture-agent").to_string(), mode.to_string()],
        handshake_timeout: DEFAULT_HANDSHAKE_TIMEOUT,
        // generous: the suite may share a single core with other test binaries
        tick_timeout: Duration::from_millis(2000),
    }
}

fn builtin(p: BuiltinPolicy) -> PolicyBinding {
    PolicyBinding::Builtin(p)
}

fn seeded(seed: u64) -> Overrides {
    Overrides {
        seed: Some(seed),
        ..Overrides::default()
    }
}

// 1 ---------------------------------------------------------------------

const TAXONOMY_SCENARIOS: [&str; 24] = [
    "carla-cola-video-ad",
    "party-billboard-traffic-light",
    "sneeze-stop-billboard",
    "bar-members-parking-sign",
    "soft-drink-turn-ad",
    "yield-to-fun-billboard",
    "go-for-sale-green-light-ad",
    "stop-for-dinner-billboard",
    "stop-sign-ad",
    "stop-tshirt-pedestrian",
    "lane-blocking-crash",
    "emergency-roundabout-exit",
    "police-car-chase",
    "hesitant-crosswalk-pedestrian",
    "erratic-biker",
    "shopping-cart-downhill",
    "wrong-way-one-way",
    "ball-over-obstacle-highway",
    "ball-evidence-child",
    "luggage-fall",
    "parked-car-door-open",
    "worker-behind-van",
    "courier-barrel-fall",
    "ems-hospital-exit",
];

fn cli_out(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv: Vec<String> = std::iter::once("cornersim").chain(args.iter().copied()).map(String::from).collect();
    let code = cli::main_from(argv, &mut out);
    (code, String::from_utf8(out).expect("utf8 output"))
}

fn catalog_counts() -> Result<String, String> {
    let (code, listing) = cli_out(&["list"]);
    if code != 0 {
        return Err(format!("list exited {code}"));
    }
    let ids: Vec<&str> = listing.lines().filter_map(|l| l.split_whitespace().next()).collect();
    if ids.len() != 32 {
        return Err(format!("list reported {} scenarios", ids.len()));
    }
    let names: BTreeSet<&str> = all_presets().iter().map(|p| p.id.as_str()).collect();
    if names.len() != 9 {
        return Err(format!("{} distinct weather presets", names.len()));
    }
    let (_, weathers) = cli_out(&["weathers"]);
    if weathers.lines().count() != 9 {
        return Err(format!("weathers printed {} lines", weathers.lines().count()));
    }
    let cat = catalog();
    let mut per_cat = BTreeMap::new();
    for s in cat.iter() {
        *per_cat.entry(s.category.short_name()).or_insert(0) += 1;
    }
    if per_cat.len() != 3 || per_cat.values().any(|&n| n == 0) {
        return Err(format!("categories {per_cat:?}"));
    }
    let missing: Vec<_> = TAXONOMY_SCENARIOS.iter().filter(|id| !ids.contains(id)).collect();
    if !missing.is_empty() {
        return Err(format!("missing {missing:?}"));
    }
    Ok(format!("32 scenarios, 9 presets, categories {per_cat:?}, 24/24 named"))
}

// 2 ---------------------------------------------------------------------

const DETERMINISM_SET: [&str; 5] = [
    "luggage-fall",
    "erratic-biker",
    "police-car-chase",
    "parked-car-door-open-dense",
    "ball-evidence-child",
];

fn determinism() -> Result<String, String> {
    let cat = catalog();
    let mut cells = 0;
    for id in DETERMINISM_SET {
        let spec = cat.get(id).ok_or(format!("missing {id}"))?;
        for seed in [1u64, 42, 9001] {
            for p in BuiltinPolicy::ALL {
                let mut ov = seeded(seed);
                ov.traffic_density = Some(TrafficDensity::Medium);
                let a = run(spec, &ov, &RunOptions::default(), &builtin(p)).map_err(|e| e.to_string())?;
                let b = run(spec, &ov, &RunOptions::default(), &builtin(p)).map_err(|e| e.to_string())?;
                if a.trace.hash() != b.trace.hash() {
                    return Err(format!("{id} seed {seed} {p}: hashes differ"));
                }
                cells += 1;
            }
        }
    }
    let matrix = MatrixFile::parse(&format!(
        "scenarios = {:?}\nseeds = [1, 42, 9001]\ndensities = [\"low\", \"medium\"]\npolicy = \"builtin:emergency_brake\"\n",
        DETERMINISM_SET
    ))
    .map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let hashes = |jobs: usize| -> Result<Vec<String>, String> {
        let mut m = matrix.expand(&cat).map_err(|e| e.to_string())?;
        m.output = tmp.path().join(format!("jobs{jobs}"));
        run_batch(&m, &cat, jobs)
            .into_iter()
            .map(|r| r.run.map(|(_, _, _, h)| h))
            .collect()
    };
    let serial = hashes(1)?;
    let parallel = hashes(8)?;
    if serial != parallel {
        return Err("jobs 1 and jobs 8 hashes differ".into());
    }
    Ok(format!("{cells} cells repeated identically; {} batch cells equal at jobs 1 and 8", serial.len()))
}

// 3 ---------------------------------------------------------------------

fn replay_fidelity() -> Result<String, String> {
    let cat = catalog();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    let mut distinct = BTreeSet::new();
    for id in ["luggage-fall", "stop-sign-ad", "erratic-biker"] {
        let spec = cat.get(id).ok_or(format!("missing {id}"))?;
        for mode in ["random", "random-continuous"] {
            let binding = fixture_agent(mode);
            let out = run(spec, &Overrides::default(), &RunOptions::default(), &binding).map_err(|e| e.to_string())?;
            let manifest = RunManifest::new(spec, &binding, &out).map_err(|e| e.to_string())?;
            let dir = tmp.path().join(format!("{id}-{mode}"));
            write_run(&dir, &manifest, &out).map_err(|e| e.to_string())?;
            let (loaded, bytes) = load_run(&dir).map_err(|e| e.to_string())?;
            let report = replay(&loaded, &bytes).map_err(|e| format!("{id}/{mode}: {e}"))?;
            if report.trace_hash != manifest.trace_hash {
                return Err(format!("{id}/{mode}: replay hash differs"));
            }
            if report.result != out.result {
                return Err(format!("{id}/{mode}: replay result differs"));
            }
            distinct.insert(manifest.trace_hash);
            runs += 1;
        }
    }
    Ok(format!("{runs} random-agent runs replayed exactly ({} distinct traces)", distinct.len()))
}

// 4 ---------------------------------------------------------------------

/// Dense point sampling: sample both perimeters (corners included) and a
/// grid of interior points; two convex boxes overlap iff some point of one
/// lies in the other.
fn sampled_overlap(a: &Obb, b: &Obb, step: f64) -> bool {
    let inside = |o: &Obb, p: Vec2| {
        let d = p - o.center;
        let [ax, ay] = o.axes();
        d.dot(ax).abs() <= o.half_length && d.dot(ay).abs() <= o.half_width
    };
    let probe = |src: &Obb, dst: &Obb| {
        let [ax, ay] = src.axes();
        let nl = ((2.0 * src.half_length) / step).ceil() as usize;
        let nw = ((2.0 * src.half_width) / step).ceil() as usize;
        let at = |u: f64, w: f64| src.center + ax.scale(u) + ay.scale(w);
        for i in 0..=nl {
            let u = -src.half_length + 2.0 * src.half_length * i as f64 / nl as f64;
            if inside(dst, at(u, src.half_width)) || inside(dst, at(u, -src.half_width)) {
                return true;
            }
        }
        for j in 0..=nw {
            let w = -src.half_width + 2.0 * src.half_width * j as f64 / nw as f64;
            if inside(dst, at(src.half_length, w)) || inside(dst, at(-src.half_length, w)) {
                return true;
            }
        }
        inside(dst, src.center)
    };
    probe(a, b) || probe(b, a)
}

fn collision_oracle() -> Result<String, String> {
    const EPS: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut agree = 0;
    let mut overlapping = 0;
    let mut near_tangent = 0;
    for n in 0..1500 {
        let rand_box = |r: &mut ChaCha8Rng| {
            Obb::new(
                Vec2::new(r.random_range(-4.0..4.0), r.random_range(-4.0..4.0)),
                r.random_range(0.05..3.0),
                r.random_range(0.05..1.5),
                r.random_range(-3.2..3.2),
            )
        };
        let a = rand_box(&mut rng);
        let b = rand_box(&mut rng);
        let sat = obb_penetration(&a, &b);
        let margin = match sat {
            Some(p) => p,
            None => obb_distance(&a, &b),
        };
        if margin < EPS {
            near_tangent += 1;
            continue;
        }
        let truth = sampled_overlap(&a, &b, 2e-4);
        if truth != sat.is_some() {
            return Err(format!("pair {n}: SAT {:?} vs sampled {truth}; {a:?} {b:?}", sat));
        }
        agree += 1;
        overlapping += truth as usize;
    }
    // touching counts as a collision
    let a = Obb::new(Vec2::new(0.0, 0.0), 1.0, 0.5, 0.0);
    let b = Obb::new(Vec2::new(2.0, 0.0), 1.0, 0.5, 0.0);
    if obb_penetration(&a, &b).is_none() {
        return Err("edge contact not reported".into());
    }
    if agree < 1000 {
        return Err(format!("only {agree} decisive pairs"));
    }
    Ok(format!("{agree} pairs agree ({overlapping} overlapping), {near_tangent} within eps skipped"))
}

// 5 ---------------------------------------------------------------------

const L: f64 = 2.7;
const STEER_MAX: f64 = 0.6;

/// Continuous bicycle model, classic RK4 on (x, y, theta, v) with the
/// longitudinal law written out independently.
fn reference_path(start: KinematicState, controls: &[ContinuousControl], mu: f64, sub: usize) -> Vec<(f64, f64, f64)> {
    let (mut x, mut y, mut th, mut v) = (start.pose.x, start.pose.y, start.pose.heading, start.speed);
    let h = DT / sub as f64;
    let mut out = Vec::new();
    for c in controls {
        let delta = c.steer * STEER_MAX;
        let accel = c.throttle * 3.0f64.min(mu * G) - c.brake * mu * G;
        for _ in 0..sub {
            let f = |_x: f64, _y: f64, th: f64, v: f64| (v * th.cos(), v * th.sin(), v / L * delta.tan(), accel);
            let k1 = f(x, y, th, v);
            let k2 = f(x + 0.5 * h * k1.0, y + 0.5 * h * k1.1, th + 0.5 * h * k1.2, v + 0.5 * h * k1.3);
            let k3 = f(x + 0.5 * h * k2.0, y + 0.5 * h * k2.1, th + 0.5 * h * k2.2, v + 0.5 * h * k2.3);
            let k4 = f(x + h * k3.0, y + h * k3.1, th + h * k3.2, v + h * k3.3);
            x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            th += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
            v += h / 6.0 * (k1.3 + 2.0 * k2.3 + 2.0 * k3.3 + k4.3);
        }
        out.push((x, y, th));
    }
    out
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

fn kinematics() -> Result<String, String> {
    let ticks = (5.0 / DT).round() as usize;
    let mut worst_pos: f64 = 0.0;
    let mut worst_head: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..24 {
        let mu = [1.0, 0.7, 0.5][case % 3];
        let v0 = rng.random_range(2.0..20.0);
        let steer_amp = rng.random_range(0.0..1.0);
        let freq = rng.random_range(0.1..1.0);
        let throttle = rng.random_range(0.0..0.6);
        // speeds stay positive: moderate braking only in the second half
        let brake = rng.random_range(0.0..0.1);
        let controls: Vec<ContinuousControl> = (0..ticks)
            .map(|k| {
                let t = k as f64 * DT;
                ContinuousControl {
                    throttle: if t < 2.5 { throttle } else { 0.0 },
                    brake: if t < 2.5 { 0.0 } else { brake },
                    steer: steer_amp * (freq * t).sin(),
                }
            })
            .collect();
        let start = KinematicState {
            speed: v0,
            ..KinematicState::at_rest(Pose2D::new(rng.random_range(-5.0..5.0), 0.0, rng.random_range(-3.0..3.0)))
        };
        let reference = reference_path(start, &controls, mu, 100);
        let mut s = start;
        for (c, r) in controls.iter().zip(&reference) {
            s = integrate_bicycle(&s, c, mu, DT);
            worst_pos = worst_pos.max(((s.pose.x - r.0).powi(2) + (s.pose.y - r.1).powi(2)).sqrt());
            worst_head = worst_head.max(angle_diff(s.pose.heading, r.2));
        }
    }
    if worst_pos > 1e-2 || worst_head > 1e-3 {
        return Err(format!("max error {worst_pos:.2e} m, {worst_head:.2e} rad"));
    }
    let h = 1.5;
    let mut prop = KinematicState {
        height: h,
        ..KinematicState::at_rest(Pose2D::new(0.0, 0.0, 0.0))
    };
    let mut n = 0;
    while prop.height > 0.0 {
        prop = integrate_ballistic(&prop, DT, 4.0);
        n += 1;
        if n > 1000 {
            return Err("prop never landed".into());
        }
    }
    let closed = (2.0 * h / G).sqrt();
    let landed = n as f64 * DT;
    if (landed - closed).abs() > DT + 1e-12 {
        return Err(format!("landed at {landed:.3} s, closed form {closed:.3} s"));
    }
    Ok(format!(
        "max error {worst_pos:.1e} m / {worst_head:.1e} rad over 24 runs; drop lands tick {n} ({landed:.3} s vs {closed:.3} s)"
    ))
}

// 6 ---------------------------------------------------------------------

fn hierarchy() -> Result<String, String> {
    let table = default_weight_table();
    let (ped, car, sign) = (
        severity(ActorClass::Pedestrian, &table),
        severity(ActorClass::Car, &table),
        severity(ActorClass::StopSign, &table),
    );
    if !(ped > car && car > sign) {
        return Err(format!("pedestrian {ped}, car {car}, stop sign {sign}"));
    }
    // every human outranks every vehicle, every vehicle outranks every sign
    let of = |g: ClassGroup| -> Vec<f64> {
        ActorClass::ALL
            .iter()
            .filter(|c| c.group() == g)
            .map(|&c| severity(c, &table))
            .collect()
    };
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (human, vehicle, signs) = (of(ClassGroup::Human), of(ClassGroup::Vehicle), of(ClassGroup::Sign));
    if !(min(&human) > max(&vehicle) && min(&vehicle) > max(&signs)) {
        return Err("group ordering violated".into());
    }

    let class = proptest::sample::select(ActorClass::ALL.to_vec());
    let hits = proptest::collection::vec(class.clone(), 0..12);
    let mut runner = TestRunner::new(Config {
        cases: 512,
        failure_persistence: None,
        ..Config::default()
    });
    let collide = |classes: &[ActorClass]| -> Vec<cornersim::engine::CollisionEvent> {
        classes
            .iter()
            .enumerate()
            .map(|(i, &c)| cornersim::engine::CollisionEvent {
                tick: i as u64,
                actor_id: format!("a{i}"),
                actor_true_class: c,
                relative_speed: 1.0,
                penetration: 0.01,
            })
            .collect()
    };
    runner
        .run(&(hits.clone(), hits, class), |(a, b, extra)| {
            let sa = severity_score(&collide(&a), &table);
            let sb = severity_score(&collide(&b), &table);
            let joined: Vec<ActorClass> = a.iter().chain(&b).copied().collect();
            let sab = severity_score(&collide(&joined), &table);
            prop_assert!((sab - (sa + sb)).abs() < 1e-9, "additivity");
            let mut more = a.clone();
            more.push(extra);
            prop_assert!(severity_score(&collide(&more), &table) >= sa, "monotonicity");
            let expected: f64 = a.iter().map(|c| table[c]).sum();
            prop_assert!((sa - expected).abs() < 1e-9, "weights");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("pedestrian {ped} > car {car} > stop_sign {sign}; 512 additive/monotone cases"))
}

// 7 ---------------------------------------------------------------------

fn behavioral_contrast() -> Result<String, String> {
    let cat = catalog();
    let opts = RunOptions::default();
    let luggage = cat.get("luggage-fall").ok_or("missing luggage-fall")?;
    let braking = run(luggage, &Overrides::default(), &opts, &builtin(BuiltinPolicy::EmergencyBrake)).map_err(|e| e.to_string())?;
    let cruising = run(luggage, &Overrides::default(), &opts, &builtin(BuiltinPolicy::ConstantSpeed)).map_err(|e| e.to_string())?;
    if braking.result.outcome != Outcome::Success {
        return Err(format!("luggage-fall emergency_brake: {}", braking.result.outcome));
    }
    if cruising.result.outcome != Outcome::CollisionFailure {
        return Err(format!("luggage-fall constant_speed: {}", cruising.result.outcome));
    }
    // Sanity of the closed-form margin the policy relies on: stopping from
    // the initial speed needs v^2 / (2 mu g) + 2 m.
    let v = luggage.ego_speed;
    let need = v * v / (2.0 * 0.7 * G) + 2.0;
    let child = cat.get("ball-evidence-child").ok_or("missing ball-evidence-child")?;
    let out = run(child, &Overrides::default(), &opts, &builtin(BuiltinPolicy::EmergencyBrake)).map_err(|e| e.to_string())?;
    let human_hits = out
        .result
        .collisions
        .iter()
        .filter(|c| c.actor_true_class.group() == ClassGroup::Human)
        .count();
    if human_hits != 0 {
        return Err(format!("ball-evidence-child: {human_hits} human collisions"));
    }
    Ok(format!(
        "luggage-fall success vs collision_failure (stop reach {need:.2} m at {v} m/s); ball-evidence-child 0 human hits"
    ))
}

// 8 ---------------------------------------------------------------------

fn termination() -> Result<String, String> {
    let cat = catalog();
    let spec = cat.get("stop-sign-ad").ok_or("missing stop-sign-ad")?;
    let out = run(spec, &Overrides::default(), &RunOptions::default(), &builtin(BuiltinPolicy::Passive)).map_err(|e| e.to_string())?;
    if out.result.terminal_reason != TerminalReason::Stalled || out.result.outcome != Outcome::Stalled {
        return Err(format!("passive ended {}", out.result.outcome));
    }
    // count the trailing run of still ticks straight from the trace
    let still = out
        .trace
        .records
        .iter()
        .rev()
        .take_while(|r| r.ego.speed.abs() < 0.1)
        .count();
    let expected = (spec.stationary_timeout / DT).round() as usize;
    if still != expected {
        return Err(format!("{still} still ticks, expected {expected}"));
    }

    let mut short = spec.clone();
    short.tn = 6.0;
    let out = run(&short, &Overrides::default(), &RunOptions::default(), &builtin(BuiltinPolicy::ConstantSpeed)).map_err(|e| e.to_string())?;
    let last = out.trace.records.last().ok_or("empty trace")?;
    if out.result.outcome != Outcome::Timeout || (last.sim_time - short.tn).abs() > 1e-9 {
        return Err(format!("{} at sim_time {}", out.result.outcome, last.sim_time));
    }
    if out.trace.records.len() != 120 {
        return Err(format!("{} records for a 6 s window", out.trace.records.len()));
    }
    Ok(format!("stalled after exactly {still} still ticks; timeout at sim_time {}", last.sim_time))
}

// 9 ---------------------------------------------------------------------

fn collect_keys(v: &serde_json::Value, into: &mut BTreeSet<String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                into.insert(k.clone());
                collect_keys(x, into);
            }
        }
        serde_json::Value::Array(xs) => xs.iter().for_each(|x| collect_keys(x, into)),
        _ => {}
    }
}

fn information_barrier() -> Result<String, String> {
    let cat = catalog();
    let spec = cat.get("stop-sign-ad").ok_or("missing stop-sign-ad")?;
    let board = spec.actor("billboard").ok_or("no billboard")?;
    if board.true_class != ActorClass::Billboard || board.apparent() != ActorClass::StopSign {
        return Err("stop-sign-ad no longer disguises a billboard".into());
    }

    // observe the world once the billboard is live and inspect the JSON
    let mut world = cornersim::engine::init_world(spec, spec.default_seed).map_err(|e| e.to_string())?;
    let weather = spec.weather.preset();
    for _ in 0..40 {
        cornersim::engine::step(&mut world, &ContinuousControl::default(), spec, &weather);
    }
    let obs = observe(&mut world, &spec.goal_region, &weather, &Default::default());
    if obs.detections.is_empty() {
        return Err("billboard not detected".into());
    }
    let json = serde_json::to_value(&obs).map_err(|e| e.to_string())?;
    let mut keys = BTreeSet::new();
    collect_keys(&json, &mut keys);
    let leaks: Vec<_> = keys.iter().filter(|k| k.contains("true") || k.as_str() == "class").collect();
    if !leaks.is_empty() {
        return Err(format!("observation keys leak {leaks:?}"));
    }
    let text = json.to_string();
    if text.contains("billboard") {
        return Err("observation names the true class".into());
    }
    let det_keys: BTreeSet<String> = json["detections"][0].as_object().ok_or("detection not an object")?.keys().cloned().collect();
    let allowed: BTreeSet<String> = ["id", "apparent_class", "position", "heading", "length", "width", "relative_speed"]
        .into_iter()
        .map(String::from)
        .collect();
    if det_keys != allowed {
        return Err(format!("detection keys {det_keys:?}"));
    }
    // the recorded trace carries the same observation schema
    let traced = run(spec, &Overrides::default(), &RunOptions { channels: Channels::ALL, ..RunOptions::default() }, &builtin(BuiltinPolicy::Passive))
        .map_err(|e| e.to_string())?;
    for r in &traced.trace.records {
        if serde_json::to_string(&r.observation).map_err(|e| e.to_string())?.contains("billboard") {
            return Err(format!("trace observation at tick {} names the true class", r.tick));
        }
    }

    let out = run(spec, &Overrides::default(), &RunOptions::default(), &fixture_agent("stop-sign")).map_err(|e| e.to_string())?;
    let stopped_at = out.trace.records.iter().find(|r| r.tick > 20 && r.ego.speed.abs() < 0.1);
    let Some(rec) = stopped_at else {
        return Err(format!("agent never stopped ({})", out.result.outcome));
    };
    if rec.ego.pose.x >= board.spawn.x {
        return Err(format!("stopped only at x = {:.1}", rec.ego.pose.x));
    }
    Ok(format!(
        "no true-class keys in observations; agent stopped at x = {:.1} m before the billboard at {:.0} m",
        rec.ego.pose.x, board.spawn.x
    ))
}

// 10 --------------------------------------------------------------------

fn performance() -> Result<String, String> {
    let cat = catalog();
    let mut spec = cat.get("erratic-biker").ok_or("missing erratic-biker")?.clone();
    spec.stationary_timeout = spec.tn;
    let ov = Overrides {
        traffic_density: Some(TrafficDensity::Medium),
        ..Overrides::default()
    };
    let opts = RunOptions {
        channels: Channels::ALL,
        ..RunOptions::default()
    };
    let t = Instant::now();
    let out = run(&spec, &ov, &opts, &builtin(BuiltinPolicy::Passive)).map_err(|e| e.to_string())?;
    let single = t.elapsed();
    if out.trace.records.len() != 600 {
        return Err(format!("{} ticks, expected 600", out.trace.records.len()));
    }
    if single >= Duration::from_secs(1) {
        return Err(format!("600 ticks took {single:?}"));
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let weathers: Vec<&str> = all_presets().iter().map(|p| p.id.as_str()).collect();
    let ids: Vec<&str> = cat.iter().map(|s| s.id.as_str()).collect();
    let matrix = MatrixFile::parse(&format!(
        "scenarios = {ids:?}\nweathers = {weathers:?}\npolicy = \"builtin:emergency_brake\"\noutput = {:?}\n",
        tmp.path().join("smoke").display().to_string()
    ))
    .map_err(|e| e.to_string())?
    .expand(&cat)
    .map_err(|e| e.to_string())?;
    if matrix.cells.len() != 32 * 9 {
        return Err(format!("{} matrix cells", matrix.cells.len()));
    }
    let t = Instant::now();
    let results = run_batch(&matrix, &cat, 8);
    let full = t.elapsed();
    if let Some(bad) = results.iter().find(|r| r.run.is_err()) {
        return Err(format!("{}: {:?}", bad.cell.scenario_id, bad.run));
    }
    if full >= Duration::from_secs(300) {
        return Err(format!("smoke matrix took {full:?}"));
    }
    Ok(format!("600 ticks in {:.0} ms; 288-cell smoke matrix in {:.1} s", single.as_secs_f64() * 1e3, full.as_secs_f64()))
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    assert!(Path::new(&default_catalog_dir()).is_dir(), "catalog directory missing");
    let criteria: [(&str, Criterion); 10] = [
        ("catalog counts", catalog_counts),
        ("determinism", determinism),
        ("replay fidelity", replay_fidelity),
        ("collision oracle equivalence", collision_oracle),
        ("kinematics accuracy", kinematics),
        ("severity hierarchy", hierarchy),
        ("baseline behavioral contrast", behavioral_contrast),
        ("termination rules", termination),
        ("information barrier", information_barrier),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
