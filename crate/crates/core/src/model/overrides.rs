use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::spec::{Condition, ScenarioSpec, TrafficDensity};
use super::validate::{validate_scenario, ValidationReport};
use super::weather::WeatherPresetId;

/// Trigger-shift key that applies to every trigger with a time condition.
pub const ALL_TRIGGERS: &str = "*";

/// Parameter changes applied on top of a catalog scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weather: Option<WeatherPresetId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic_density: Option<TrafficDensity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seconds added to each `time_at_least` condition of the named trigger.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub trigger_shifts: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ego_speed: Option<f64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OverrideError {
    #[error("unknown weather preset `{0}`")]
    UnknownWeather(String),
    #[error("unknown trigger `{0}`")]
    UnknownTrigger(String),
    #[error("overrides produce an invalid scenario:\n{0}")]
    Invalid(ValidationReport),
}

/// Parse a weather id, mapping failures onto the override error type.
pub fn parse_weather(s: &str) -> Result<WeatherPresetId, OverrideError> {
    s.parse().map_err(|_| OverrideError::UnknownWeather(s.to_string()))
}

/// Return a copy of `spec` with `overrides` applied. The input is untouched
/// and the result is re-validated.
pub fn apply_overrides(spec: &ScenarioSpec, overrides: &Overrides) -> Result<ScenarioSpec, OverrideError> {
    let mut out = spec.clone();
    if let Some(w) = overrides.weather {
        out.weather = w;
    }
    if let Some(d) = overrides.traffic_density {
        out.traffic_density = d;
    }
    if let Some(seed) = overrides.seed {
        out.default_seed = seed;
    }
    if let Some(v) = overrides.ego_speed {
        out.ego_speed = v;
    }
    for (trigger_id, shift) in &overrides.trigger_shifts {
        if *shift == 0.0 {
            continue;
        }
        if trigger_id == ALL_TRIGGERS {
            for t in &mut out.triggers {
                shift_time_conditions(&mut t.conditions, *shift);
            }
            continue;
        }
        let t = out
            .triggers
            .iter_mut()
            .find(|t| &t.id == trigger_id)
            .ok_or_else(|| OverrideError::UnknownTrigger(trigger_id.clone()))?;
        shift_time_conditions(&mut t.conditions, *shift);
    }
    for trigger_id in overrides.trigger_shifts.keys() {
        if trigger_id != ALL_TRIGGERS && spec.trigger(trigger_id).is_none() {
            return Err(OverrideError::UnknownTrigger(trigger_id.clone()));
        }
    }
    let report = validate_scenario(&out);
    if !report.is_valid() {
        return Err(OverrideError::Invalid(report));
    }
    Ok(out)
}

fn shift_time_conditions(conds: &mut [Condition], shift: f64) {
    for c in conds {
        if let Condition::TimeAtLeast { t } = c {
            *t += shift;
        }
    }
}
