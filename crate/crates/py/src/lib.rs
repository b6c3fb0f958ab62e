//! Python bindings: catalog queries, single runs, replay and validation.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cornersim::dataset::{load_run, replay as replay_run, run_dir, write_run, RunManifest};
use cornersim::dsl::{default_catalog_dir, load_catalog, parse_scenario, Catalog, ParseError};
use cornersim::model::weather::all_presets;
use cornersim::model::{CornerCaseCategory, Overrides, TrafficDensity, WeatherPresetId};
use cornersim::policy::PolicyBinding;
use cornersim::runner::{run as run_scenario, RunOptions};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn catalog(dir: Option<PathBuf>) -> PyResult<Catalog> {
    load_catalog(&dir.unwrap_or_else(default_catalog_dir), true).map_err(value_error)
}

/// Catalog entries as dicts with `id`, `name`, `category` and `variant`.
#[pyfunction]
#[pyo3(signature = (category=None, catalog_dir=None))]
fn list_scenarios(py: Python<'_>, category: Option<&str>, catalog_dir: Option<PathBuf>) -> PyResult<Vec<Py<PyDict>>> {
    let cat = catalog(catalog_dir)?;
    let wanted = category.map(str::parse::<CornerCaseCategory>).transpose().map_err(value_error)?;
    cat.iter()
        .filter(|s| wanted.is_none_or(|c| s.category == c))
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("id", &s.id)?;
            d.set_item("name", &s.name)?;
            d.set_item("category", s.category.short_name())?;
            d.set_item("variant", s.variant)?;
            Ok(d.unbind())
        })
        .collect()
}

/// `(name, friction_mu, visibility_range, lidar_noise_sigma)` per preset.
#[pyfunction]
fn weather_presets() -> Vec<(String, f64, f64, f64)> {
    all_presets()
        .iter()
        .map(|w| (w.id.as_str().to_string(), w.friction_mu, w.visibility_range, w.lidar_noise_sigma))
        .collect()
}

/// Run one scenario to its terminal state and return the result as a dict.
/// With `out`, the run directory is written there as well.
#[pyfunction]
#[pyo3(signature = (scenario, policy="builtin:emergency_brake", seed=None, weather=None, density=None, out=None, catalog_dir=None))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    scenario: &str,
    policy: &str,
    seed: Option<u64>,
    weather: Option<&str>,
    density: Option<&str>,
    out: Option<PathBuf>,
    catalog_dir: Option<PathBuf>,
) -> PyResult<Py<PyDict>> {
    let cat = catalog(catalog_dir)?;
    let spec = cat
        .get(scenario)
        .ok_or_else(|| value_error(format!("unknown scenario `{scenario}`")))?;
    let binding: PolicyBinding = policy.parse().map_err(value_error)?;
    let overrides = Overrides {
        seed,
        weather: weather.map(str::parse::<WeatherPresetId>).transpose().map_err(value_error)?,
        traffic_density: density.map(str::parse::<TrafficDensity>).transpose().map_err(value_error)?,
        ..Overrides::default()
    };
    let output = run_scenario(spec, &overrides, &RunOptions::default(), &binding)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let manifest = RunManifest::new(spec, &binding, &output).map_err(value_error)?;

    let r = &output.result;
    let d = PyDict::new(py);
    d.set_item("scenario_id", &spec.id)?;
    d.set_item("seed", output.seed)?;
    d.set_item("outcome", r.outcome.as_str())?;
    d.set_item("terminal_reason", r.terminal_reason.as_str())?;
    d.set_item("severity_score", r.severity_score)?;
    d.set_item("ticks", r.metrics.ticks_elapsed)?;
    d.set_item("route_completion", r.metrics.route_completion)?;
    d.set_item("trace_hash", &manifest.trace_hash)?;
    let hits: Vec<(u64, String, String)> = r
        .collisions
        .iter()
        .map(|c| (c.tick, c.actor_id.clone(), c.actor_true_class.as_str().to_string()))
        .collect();
    d.set_item("collisions", hits)?;
    if let Some(root) = out {
        let dir = run_dir(&root, &spec.id, output.seed);
        write_run(&dir, &manifest, &output).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        d.set_item("run_dir", dir)?;
    }
    Ok(d.unbind())
}

/// Re-simulate a recorded run; returns `(trace_hash, outcome)` or raises
/// `ValueError` on a version, integrity or fidelity failure.
#[pyfunction]
fn replay(path: PathBuf) -> PyResult<(String, String)> {
    let (manifest, bytes) = load_run(&path).map_err(value_error)?;
    let report = replay_run(&manifest, &bytes).map_err(value_error)?;
    Ok((report.trace_hash, report.result.outcome.as_str().to_string()))
}

/// Problems with a `.3cs` document, one string each; empty when valid.
#[pyfunction]
fn validate(text: &str) -> Vec<String> {
    match parse_scenario(text.as_bytes()) {
        Ok(_) => Vec::new(),
        Err(ParseError::Semantic(report)) => report.violations.iter().map(|v| format!("{}: {}", v.code, v.message)).collect(),
        Err(e) => vec![e.to_string()],
    }
}

#[pymodule]
#[pyo3(name = "cornersim")]
fn cornersim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cornersim::ENGINE_VERSION)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(weather_presets, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
