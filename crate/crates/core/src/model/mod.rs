//! Declarative scenario types, validation, and parameter overrides.

pub mod class;
pub mod overrides;
pub mod spec;
pub mod validate;
pub mod weather;

pub use class::{default_weight, default_weight_table, ActorClass, ClassGroup};
pub use overrides::{apply_overrides, OverrideError, Overrides};
pub use spec::{
    ActorSpec, BehaviorKind, BehaviorScript, Condition, CornerCaseCategory, EvaluationConstraints,
    EvaluationMode, Lane, LaneDirection, RoadMap, ScenarioSpec, TrafficDensity, TriggerAction,
    TriggerSpec, Waypoint,
};
pub use validate::{validate_scenario, ValidationReport, Violation, ViolationCode};
pub use weather::{WeatherPreset, WeatherPresetId};
