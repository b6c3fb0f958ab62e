use cornersim::dsl::{default_catalog_dir, load_catalog, Catalog};
use cornersim::model::weather::all_presets;
use cornersim::model::{
    apply_overrides, validate_scenario, ActorClass, Condition, OverrideError, Overrides, ScenarioSpec, TrafficDensity,
    TriggerAction, ViolationCode, WeatherPresetId,
};
use proptest::prelude::*;

fn catalog() -> Catalog {
    load_catalog(&default_catalog_dir(), true).unwrap()
}

fn luggage() -> ScenarioSpec {
    catalog().get("luggage-fall").unwrap().clone()
}

#[test]
fn shipped_scenarios_validate_clean() {
    for s in catalog().iter() {
        let report = validate_scenario(s);
        assert!(report.is_valid(), "{}: {report}", s.id);
    }
}

#[test]
fn empty_window_is_reported() {
    let mut s = luggage();
    s.tn = s.t0;
    assert!(validate_scenario(&s).contains(ViolationCode::WindowEmpty));
}

#[test]
fn dangling_trigger_reference() {
    let mut s = luggage();
    s.triggers[0].action = TriggerAction::ActivateActor { actor: "ghost".into() };
    assert!(validate_scenario(&s).contains(ViolationCode::DanglingActorRef));
}

#[test]
fn duplicate_actor_ids() {
    let mut s = luggage();
    let copy = s.actors[0].clone();
    s.actors.push(copy);
    assert!(validate_scenario(&s).contains(ViolationCode::DuplicateActorId));
}

#[test]
fn dimensions_must_be_positive() {
    let mut s = luggage();
    s.actors[0].width = 0.0;
    assert!(validate_scenario(&s).contains(ViolationCode::NonPositiveDimensions));
}

#[test]
fn only_lookalike_classes_may_masquerade() {
    let mut s = luggage();
    // carrier is a car: cars cannot pose as something else
    s.actors[0].apparent_class = Some(ActorClass::StopSign);
    assert!(validate_scenario(&s).contains(ViolationCode::ApparentClassNotAllowed));
    for ok in [ActorClass::Billboard, ActorClass::Pedestrian, ActorClass::Luggage, ActorClass::StopSign] {
        assert!(ok.allows_apparent_mismatch(), "{ok:?}");
    }
}

#[test]
fn goal_off_road() {
    let mut s = luggage();
    s.goal_region = cornersim::geometry::Rect::new(
        cornersim::geometry::Vec2::new(150.0, 40.0),
        cornersim::geometry::Vec2::new(160.0, 45.0),
    );
    assert!(validate_scenario(&s).contains(ViolationCode::GoalOffRoad));
}

#[test]
fn self_enabling_trigger_is_a_cycle() {
    let mut s = luggage();
    // a trigger that watches the actor it activates re-enables itself
    s.triggers[0].conditions = vec![Condition::ActorWithin {
        actor: "luggage".into(),
        point: cornersim::geometry::Vec2::new(0.0, 0.0),
        radius: 1.0,
    }];
    s.triggers[0].action = TriggerAction::ActivateActor { actor: "luggage".into() };
    assert!(validate_scenario(&s).contains(ViolationCode::TriggerCycle));
}

#[test]
fn missing_weight_is_a_validation_error() {
    let mut s = luggage();
    s.constraints.weight_table.remove(&ActorClass::Pedestrian);
    assert!(validate_scenario(&s).contains(ViolationCode::WeightMissing));
}

#[test]
fn empty_overrides_are_identity() {
    let s = luggage();
    assert_eq!(apply_overrides(&s, &Overrides::default()).unwrap(), s);
}

#[test]
fn weather_override_swaps_the_preset() {
    let s = luggage();
    let o = Overrides {
        weather: Some(WeatherPresetId::HardRainNoon),
        ..Overrides::default()
    };
    let out = apply_overrides(&s, &o).unwrap();
    assert_eq!(out.weather, WeatherPresetId::HardRainNoon);
    let p = out.weather.preset();
    assert!(p.friction_mu < WeatherPresetId::ClearNoon.preset().friction_mu);
    // nothing else moved
    let mut back = out.clone();
    back.weather = s.weather;
    assert_eq!(back, s);
}

#[test]
fn trigger_shift_adds_to_time_condition() {
    let s = luggage();
    let mut o = Overrides::default();
    o.trigger_shifts.insert("strap-snaps".into(), 2.0);
    let out = apply_overrides(&s, &o).unwrap();
    let before = match s.trigger("strap-snaps").unwrap().conditions[0] {
        Condition::TimeAtLeast { t } => t,
        _ => unreachable!(),
    };
    match out.trigger("strap-snaps").unwrap().conditions[0] {
        Condition::TimeAtLeast { t } => assert_eq!(t, before + 2.0),
        ref c => panic!("unexpected {c:?}"),
    }
}

#[test]
fn unknown_trigger_shift_is_an_error() {
    let mut o = Overrides::default();
    o.trigger_shifts.insert("nope".into(), 1.0);
    assert_eq!(apply_overrides(&luggage(), &o), Err(OverrideError::UnknownTrigger("nope".into())));
}

#[test]
fn override_that_breaks_the_spec_is_rejected() {
    let o = Overrides {
        ego_speed: Some(-3.0),
        ..Overrides::default()
    };
    assert!(matches!(apply_overrides(&luggage(), &o), Err(OverrideError::Invalid(_))));
}

#[test]
fn weather_table_matches_documented_anchors() {
    let fog = WeatherPresetId::FogMorning.preset();
    assert_eq!((fog.friction_mu, fog.visibility_range, fog.lidar_noise_sigma), (0.7, 20.0, 0.10));
    let clear = WeatherPresetId::ClearNoon.preset();
    assert_eq!((clear.friction_mu, clear.visibility_range, clear.lidar_noise_sigma), (0.9, 120.0, 0.02));
    assert_eq!(all_presets().len(), 9);
}

#[test]
fn density_table() {
    let counts: Vec<usize> = [TrafficDensity::None, TrafficDensity::Low, TrafficDensity::Medium, TrafficDensity::High]
        .iter()
        .map(|d| d.vehicle_count())
        .collect();
    assert_eq!(counts, [0, 2, 5, 10]);
}

fn overrides_strategy(spec: ScenarioSpec) -> impl Strategy<Value = Overrides> {
    let triggers: Vec<String> = spec.triggers.iter().map(|t| t.id.clone()).collect();
    let densities = [TrafficDensity::None, TrafficDensity::Low, TrafficDensity::Medium, TrafficDensity::High];
    (
        proptest::option::of(proptest::sample::select(WeatherPresetId::ALL.to_vec())),
        proptest::option::of(proptest::sample::select(densities.to_vec())),
        proptest::option::of(0..=i64::MAX as u64),
        proptest::option::of(0.0..25.0f64),
        proptest::collection::btree_map(proptest::sample::select(triggers), 0.0..5.0f64, 0..2),
    )
        .prop_map(|(weather, traffic_density, seed, ego_speed, trigger_shifts)| Overrides {
            weather,
            traffic_density,
            seed,
            ego_speed,
            trigger_shifts,
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn well_formed_overrides_keep_catalog_specs_valid(
        (spec, o) in proptest::sample::select(catalog().iter().cloned().collect::<Vec<_>>())
            .prop_flat_map(|s| (Just(s.clone()), overrides_strategy(s)))
    ) {
        let before = spec.clone();
        let out = apply_overrides(&spec, &o).expect("well-formed overrides apply");
        prop_assert!(validate_scenario(&out).is_valid());
        prop_assert_eq!(&spec, &before);
        prop_assert_eq!(apply_overrides(&spec, &o).unwrap(), out);
    }
}
