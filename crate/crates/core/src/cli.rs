//! Command-line front end. `main_from` returns the process exit code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::batch::{run_batch, write_summary, MatrixFile};
use crate::dataset::replay::{check_integrity, check_version};
use crate::dataset::{export, load_run, replay, run_dir, write_run, ExportFormat, ReplayError, RunManifest, Trace};
use crate::dsl::{default_catalog_dir, load_catalog, parse_scenario, query_catalog, serialize_scenario, Catalog, CatalogFilter};
use crate::evaluation::{Outcome, RunResult};
use crate::model::weather::all_presets;
use crate::model::{CornerCaseCategory, Overrides, ScenarioSpec, TrafficDensity, WeatherPresetId};
use crate::policy::PolicyBinding;
use crate::runner::{run, RunError, RunOptions};

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const SCENARIO_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const POLICY_FAULT: i32 = 3;
    pub const INTEGRITY: i32 = 4;
    pub const VERSION: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "cornersim", version, about = "Corner-case driving scenarios: catalog, runs, batches, replay")]
pub struct Cli {
    /// Scenario catalog directory (default: $CORNERSIM_CATALOG or the shipped catalog).
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog scenarios: id, category, name.
    List {
        #[arg(long)]
        category: Option<CornerCaseCategory>,
        /// Only ids starting with this prefix.
        #[arg(long)]
        prefix: Option<String>,
        /// Case-insensitive text search over id, name and description.
        #[arg(long)]
        search: Option<String>,
    },
    /// List the weather presets.
    Weathers,
    /// Check scenario files and report every violation.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the canonical form of a scenario.
    Show { scenario: String },
    /// Run one scenario to its terminal state.
    Run(RunArgs),
    /// Run a matrix of scenario variations.
    Batch {
        matrix: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Re-simulate a recorded run and check it reproduces exactly.
    Replay { manifest: PathBuf },
    /// Convert a recorded trace into another format.
    Export {
        /// `trace.jsonl` or its run directory.
        trace: PathBuf,
        #[arg(long)]
        format: ExportFormat,
        /// Destination directory (default: next to the trace).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Catalog id or path to a `.3cs` file.
    pub scenario: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub weather: Option<WeatherPresetId>,
    #[arg(long)]
    pub density: Option<TrafficDensity>,
    /// Shift trigger timing, `ID=SECONDS` (`*=SECONDS` for all). Repeatable.
    #[arg(long = "shift", value_parser = parse_shift)]
    pub shifts: Vec<(String, f64)>,
    #[arg(long)]
    pub ego_speed: Option<f64>,
    /// `builtin:<name>` or `exec:<command...>`.
    #[arg(long, default_value = "builtin:emergency_brake")]
    pub policy: PolicyBinding,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Comma list of lidar, detections, raster.
    #[arg(long, default_value = "lidar,detections")]
    pub record: crate::dataset::Channels,
    /// Per-tick reply timeout for external agents.
    #[arg(long, default_value_t = 50)]
    pub tick_timeout_ms: u64,
    /// Handshake timeout for external agents.
    #[arg(long, default_value_t = 5.0)]
    pub handshake_timeout_s: f64,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_shift(s: &str) -> Result<(String, f64), String> {
    let (id, secs) = s.split_once('=').ok_or("expected ID=SECONDS")?;
    let secs: f64 = secs.parse().map_err(|e| format!("bad seconds `{secs}`: {e}"))?;
    if !secs.is_finite() {
        return Err("shift must be finite".into());
    }
    Ok((id.to_string(), secs))
}

struct Failure(i32, String);

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(exit::USAGE, msg.to_string())
}

fn catalog_dir(cli: &Cli) -> PathBuf {
    cli.catalog.clone().unwrap_or_else(default_catalog_dir)
}

fn open_catalog(cli: &Cli) -> Result<Catalog, Failure> {
    load_catalog(&catalog_dir(cli), true).map_err(usage)
}

fn resolve_scenario(cli: &Cli, s: &str) -> Result<ScenarioSpec, Failure> {
    let path = Path::new(s);
    if s.ends_with(".3cs") || path.is_file() {
        let bytes = fs::read(path).map_err(|e| usage(format!("{s}: {e}")))?;
        return parse_scenario(&bytes).map_err(|e| usage(format!("{s}: {e}")));
    }
    let catalog = open_catalog(cli)?;
    catalog
        .get(s)
        .cloned()
        .ok_or_else(|| usage(format!("unknown scenario `{s}`")))
}

/// Exit code for a finished run.
pub fn outcome_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Success => exit::SUCCESS,
        Outcome::PolicyFault => exit::POLICY_FAULT,
        _ => exit::SCENARIO_FAILURE,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |x| format!("{x:.3}"))
}

pub fn result_summary(r: &RunResult) -> String {
    format!(
        "outcome {} ({}), severity {}, collisions {}, ticks {}, route_completion {:.3}, min_distance {}, min_ttc {}",
        r.outcome,
        r.terminal_reason.as_str(),
        r.severity_score,
        r.collisions.len(),
        r.metrics.ticks_elapsed,
        r.metrics.route_completion,
        fmt_opt(r.metrics.min_distance_to_any_actor),
        fmt_opt(r.metrics.min_time_to_collision),
    )
}

fn cmd_run(cli: &Cli, a: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = resolve_scenario(cli, &a.scenario)?;
    let overrides = Overrides {
        weather: a.weather,
        traffic_density: a.density,
        seed: a.seed,
        trigger_shifts: a.shifts.iter().cloned().collect::<BTreeMap<_, _>>(),
        ego_speed: a.ego_speed,
    };
    let policy = match &a.policy {
        PolicyBinding::External { command, .. } => PolicyBinding::External {
            command: command.clone(),
            handshake_timeout: Duration::from_secs_f64(a.handshake_timeout_s.max(0.0)),
            tick_timeout: Duration::from_millis(a.tick_timeout_ms),
        },
        b => b.clone(),
    };
    let opts = RunOptions {
        channels: a.record,
        ..RunOptions::default()
    };
    let output = run(&spec, &overrides, &opts, &policy).map_err(|e| match e {
        RunError::Handshake(h) => Failure(exit::POLICY_FAULT, h.to_string()),
        other => usage(other),
    })?;
    let manifest = RunManifest::new(&spec, &policy, &output).map_err(usage)?;
    let dir = run_dir(&a.out, &spec.id, output.seed);
    write_run(&dir, &manifest, &output).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let _ = writeln!(out, "scenario {} seed {} policy {}", spec.id, output.seed, policy);
    let _ = writeln!(out, "{}", result_summary(&output.result));
    let _ = writeln!(out, "trace_hash {}", manifest.trace_hash);
    let _ = writeln!(out, "written {}", dir.display());
    Ok(outcome_code(output.result.outcome))
}

fn cmd_batch(cli: &Cli, matrix: &Path, jobs: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = fs::read_to_string(matrix).map_err(|e| usage(format!("{}: {e}", matrix.display())))?;
    let file = MatrixFile::parse(&text).map_err(usage)?;
    let catalog = open_catalog(cli)?;
    let m = file.expand(&catalog).map_err(usage)?;
    let _ = writeln!(out, "matrix: {} cells, {} jobs", m.cells.len(), jobs.max(1));
    let results = run_batch(&m, &catalog, jobs);
    let mut all_ok = true;
    for r in &results {
        let c = &r.cell;
        let tail = match &r.run {
            Ok((o, sev, ticks, hash)) => format!("{o:<17} severity {sev:<5} ticks {ticks:<4} {}", &hash[..16]),
            Err(e) => {
                all_ok = false;
                format!("error: {e}")
            }
        };
        let _ = writeln!(
            out,
            "{:<36} {:<5} {:<16} {:<6} shift {:<5} {}",
            c.scenario_id,
            c.seed,
            c.weather.as_str(),
            c.density.as_str(),
            c.shift,
            tail
        );
    }
    let path = write_summary(&m.output, &results).map_err(usage)?;
    let _ = writeln!(out, "summary {}", path.display());
    Ok(if all_ok { exit::SUCCESS } else { exit::SCENARIO_FAILURE })
}

fn replay_failure(e: ReplayError) -> Failure {
    let code = match e {
        ReplayError::Version { .. } => exit::VERSION,
        ReplayError::Run(RunError::Handshake(_)) => exit::POLICY_FAULT,
        _ => exit::INTEGRITY,
    };
    Failure(code, e.to_string())
}

fn cmd_replay(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let (manifest, bytes) = load_run(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let report = replay(&manifest, &bytes).map_err(replay_failure)?;
    let _ = writeln!(out, "replay ok {}", report.trace_hash);
    let _ = writeln!(out, "{}", result_summary(&report.result));
    Ok(exit::SUCCESS)
}

fn cmd_export(trace: &Path, format: ExportFormat, dest: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let dir = if trace.is_dir() { trace.to_path_buf() } else { trace.parent().unwrap_or(Path::new(".")).to_path_buf() };
    let (manifest, bytes) = load_run(&dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    check_version(&manifest).map_err(replay_failure)?;
    check_integrity(&manifest, &bytes).map_err(replay_failure)?;
    let text = String::from_utf8(bytes).map_err(|e| Failure(exit::INTEGRITY, e.to_string()))?;
    let t = Trace::from_jsonl(manifest.trace_header.clone(), &text).map_err(|e| Failure(exit::INTEGRITY, e.to_string()))?;
    if format == ExportFormat::RasterPack && !t.header.channels.raster {
        return Err(usage("trace was recorded without the raster channel"));
    }
    let dest = dest.unwrap_or(&dir);
    export(&t, format, dest).map_err(|e| usage(format!("{}: {e}", dest.display())))?;
    let _ = writeln!(out, "exported {} to {}", format.as_str(), dest.display());
    Ok(exit::SUCCESS)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::List { category, prefix, search } => {
            let catalog = open_catalog(cli)?;
            let filter = CatalogFilter {
                category: *category,
                id_prefix: prefix.clone(),
                text: search.clone(),
            };
            for s in query_catalog(&catalog, &filter) {
                let _ = writeln!(out, "{:<36} {:<9} {}", s.id, s.category.short_name(), s.name);
            }
            Ok(exit::SUCCESS)
        }
        Command::Weathers => {
            for w in all_presets() {
                let _ = writeln!(
                    out,
                    "{:<17} mu {:<4} visibility {:<4} lidar_sigma {}",
                    w.id.as_str(),
                    w.friction_mu,
                    w.visibility_range,
                    w.lidar_noise_sigma
                );
            }
            Ok(exit::SUCCESS)
        }
        Command::Validate { files } => {
            let mut bad = false;
            for f in files {
                match fs::read(f).map_err(|e| e.to_string()).and_then(|b| parse_scenario(&b).map_err(|e| e.to_string())) {
                    Ok(s) => {
                        let _ = writeln!(out, "ok {} ({})", f.display(), s.id);
                    }
                    Err(e) => {
                        bad = true;
                        let _ = writeln!(out, "invalid {}\n{e}", f.display());
                    }
                }
            }
            Ok(if bad { exit::USAGE } else { exit::SUCCESS })
        }
        Command::Show { scenario } => {
            let spec = resolve_scenario(cli, scenario)?;
            let _ = write!(out, "{}", serialize_scenario(&spec).map_err(usage)?);
            Ok(exit::SUCCESS)
        }
        Command::Run(a) => cmd_run(cli, a, out),
        Command::Batch { matrix, jobs } => cmd_batch(cli, matrix, *jobs, out),
        Command::Replay { manifest } => cmd_replay(manifest, out),
        Command::Export { trace, format, out: dest } => cmd_export(trace, *format, dest.as_deref(), out),
    }
}

/// Parse `args` (including the program name) and run the command,
/// writing normal output to `out` and diagnostics to stderr.
pub fn main_from<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}
