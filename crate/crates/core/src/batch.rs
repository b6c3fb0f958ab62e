//! Cartesian run matrices executed on a bounded worker pool.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::dataset::export::csv_line;
use crate::dataset::{write_run, Channels, RunManifest};
use crate::dsl::Catalog;
use crate::evaluation::Outcome;
use crate::model::overrides::ALL_TRIGGERS;
use crate::model::{CornerCaseCategory, Overrides, ScenarioSpec, TrafficDensity, WeatherPresetId};
use crate::policy::PolicyBinding;
use crate::runner::{run, RunOptions};

pub const SUMMARY_FILE: &str = "summary.csv";

/// Matrix file contents. Omitted axes use each scenario's own value;
/// axes that are present must be non-empty.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    #[serde(default)]
    pub scenarios: Option<Vec<String>>,
    /// Category name, short (`state`) or long (`state_anomaly`).
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub weathers: Option<Vec<WeatherPresetId>>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub densities: Option<Vec<TrafficDensity>>,
    /// Seconds added to every time-triggered event.
    #[serde(default)]
    pub shifts: Option<Vec<f64>>,
    #[serde(default = "default_policy")]
    pub policy: String,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub record: Option<String>,
}

fn default_policy() -> String {
    "builtin:emergency_brake".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("batch-runs")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix file: {0}")]
    Parse(String),
    #[error("matrix axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("matrix needs `scenarios` or `category`, not both")]
    Selector,
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("{0}")]
    Policy(String),
    #[error("{0}")]
    Record(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchCell {
    pub scenario_id: String,
    pub weather: WeatherPresetId,
    pub density: TrafficDensity,
    pub seed: u64,
    pub shift: f64,
}

impl BatchCell {
    pub fn overrides(&self) -> Overrides {
        let mut trigger_shifts = BTreeMap::new();
        if self.shift != 0.0 {
            trigger_shifts.insert(ALL_TRIGGERS.to_string(), self.shift);
        }
        Overrides {
            weather: Some(self.weather),
            traffic_density: Some(self.density),
            seed: Some(self.seed),
            trigger_shifts,
            ego_speed: None,
        }
    }

    /// `<root>/<id>/<seed>/<weather>_<density>_shift<s>`.
    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(&self.scenario_id)
            .join(self.seed.to_string())
            .join(format!("{}_{}_shift{}", self.weather.as_str(), self.density.as_str(), self.shift))
    }
}

#[derive(Debug, Clone)]
pub struct BatchMatrix {
    pub cells: Vec<BatchCell>,
    pub policy: PolicyBinding,
    pub output: PathBuf,
    pub channels: Channels,
}

fn axis<T: Clone>(name: &'static str, v: &Option<Vec<T>>, fallback: T) -> Result<Vec<T>, MatrixError> {
    match v {
        None => Ok(vec![fallback]),
        Some(xs) if xs.is_empty() => Err(MatrixError::EmptyAxis(name)),
        Some(xs) => Ok(xs.clone()),
    }
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<MatrixFile, MatrixError> {
        toml::from_str(text).map_err(|e| MatrixError::Parse(e.to_string()))
    }

    /// Expand against the catalog: scenario-major, then weather, density,
    /// seed and shift.
    pub fn expand(&self, catalog: &Catalog) -> Result<BatchMatrix, MatrixError> {
        let category = self
            .category
            .as_deref()
            .map(|c| c.parse::<CornerCaseCategory>().map_err(|_| MatrixError::Parse(format!("unknown category `{c}`"))))
            .transpose()?;
        let specs: Vec<&ScenarioSpec> = match (&self.scenarios, category) {
            (Some(_), Some(_)) | (None, None) => return Err(MatrixError::Selector),
            (Some(ids), None) => {
                if ids.is_empty() {
                    return Err(MatrixError::EmptyAxis("scenarios"));
                }
                ids.iter()
                    .map(|id| catalog.get(id).ok_or_else(|| MatrixError::UnknownScenario(id.clone())))
                    .collect::<Result<_, _>>()?
            }
            (None, Some(cat)) => catalog.in_category(cat).collect(),
        };
        let mut cells = Vec::new();
        for spec in specs {
            for weather in axis("weathers", &self.weathers, spec.weather)? {
                for density in axis("densities", &self.densities, spec.traffic_density)? {
                    for seed in axis("seeds", &self.seeds, spec.default_seed)? {
                        for shift in axis("shifts", &self.shifts, 0.0)? {
                            cells.push(BatchCell {
                                scenario_id: spec.id.clone(),
                                weather,
                                density,
                                seed,
                                shift,
                            });
                        }
                    }
                }
            }
        }
        let channels = match &self.record {
            Some(r) => r.parse().map_err(MatrixError::Record)?,
            None => RunOptions::default().channels,
        };
        Ok(BatchMatrix {
            cells,
            policy: self.policy.parse().map_err(MatrixError::Policy)?,
            output: self.output.clone(),
            channels,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: BatchCell,
    /// Outcome, severity, tick count and trace hash; or the error text.
    pub run: Result<(Outcome, f64, u64, String), String>,
}

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "scenario_id",
    "seed",
    "weather",
    "density",
    "shift",
    "outcome",
    "severity_score",
    "ticks",
    "trace_hash",
    "error",
];

fn run_cell(cell: &BatchCell, catalog: &Catalog, m: &BatchMatrix) -> CellResult {
    let go = || -> Result<(Outcome, f64, u64, String), String> {
        let spec = catalog
            .get(&cell.scenario_id)
            .ok_or_else(|| format!("unknown scenario `{}`", cell.scenario_id))?;
        let opts = RunOptions {
            channels: m.channels,
            ..RunOptions::default()
        };
        let out = run(spec, &cell.overrides(), &opts, &m.policy).map_err(|e| e.to_string())?;
        let manifest = RunManifest::new(spec, &m.policy, &out).map_err(|e| e.to_string())?;
        write_run(&cell.dir(&m.output), &manifest, &out).map_err(|e| e.to_string())?;
        Ok((out.result.outcome, out.result.severity_score, out.result.metrics.ticks_elapsed, manifest.trace_hash))
    };
    CellResult {
        cell: cell.clone(),
        run: go(),
    }
}

/// Run every cell with at most `jobs` workers; results come back in cell
/// order regardless of scheduling.
pub fn run_batch(matrix: &BatchMatrix, catalog: &Catalog, jobs: usize) -> Vec<CellResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("worker pool");
    pool.install(|| matrix.cells.par_iter().map(|c| run_cell(c, catalog, matrix)).collect())
}

pub fn summary_csv(results: &[CellResult]) -> String {
    let mut out = csv_line(&SUMMARY_COLUMNS.map(str::to_string));
    for r in results {
        let c = &r.cell;
        let mut row = vec![
            c.scenario_id.clone(),
            c.seed.to_string(),
            c.weather.as_str().to_string(),
            c.density.as_str().to_string(),
            c.shift.to_string(),
        ];
        match &r.run {
            Ok((outcome, severity, ticks, hash)) => row.extend([
                outcome.as_str().to_string(),
                severity.to_string(),
                ticks.to_string(),
                hash.clone(),
                String::new(),
            ]),
            Err(e) => row.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.replace([',', '\n', '"'], " "),
            ]),
        }
        out.push_str(&csv_line(&row));
    }
    out
}

pub fn write_summary(root: &Path, results: &[CellResult]) -> std::io::Result<PathBuf> {
    fs::create_dir_all(root)?;
    let path = root.join(SUMMARY_FILE);
    fs::write(&path, summary_csv(results))?;
    Ok(path)
}
