use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::export::{export, ExportFormat, TRACE_FILE};
use super::trace::TraceHeader;
use crate::dsl::{serialize_scenario, SerializeError};
use crate::evaluation::RunResult;
use crate::model::{Overrides, ScenarioSpec};
use crate::policy::PolicyBinding;
use crate::runner::RunOutput;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

/// Identity card of a run: enough to replay it and to check its trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub scenario_id: String,
    pub seed: u64,
    pub overrides: Overrides,
    pub policy: String,
    pub engine_version: String,
    /// SHA-256 of the canonical trace, lowercase hex.
    pub trace_hash: String,
    pub result: RunResult,
    pub trace_header: TraceHeader,
    /// Canonical `.3cs` text of the scenario before overrides.
    pub scenario_source: String,
    /// Wall-clock seconds since the Unix epoch; not part of the trace hash.
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(source: &ScenarioSpec, binding: &PolicyBinding, out: &RunOutput) -> Result<Self, SerializeError> {
        Ok(RunManifest {
            manifest_version: MANIFEST_VERSION,
            scenario_id: source.id.clone(),
            seed: out.seed,
            overrides: out.trace.header.overrides.clone(),
            policy: binding.descriptor(),
            engine_version: crate::ENGINE_VERSION.to_string(),
            trace_hash: out.trace.hash(),
            result: out.result.clone(),
            trace_header: out.trace.header.clone(),
            scenario_source: serialize_scenario(source)?,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `<root>/<scenario-id>/<seed>`.
pub fn run_dir(root: &Path, scenario_id: &str, seed: u64) -> PathBuf {
    root.join(scenario_id).join(seed.to_string())
}

/// Write the manifest, the full trace, the flat CSV and, when recorded,
/// the raster pack into `dir`.
pub fn write_run(dir: &Path, manifest: &RunManifest, out: &RunOutput) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    export(&out.trace, ExportFormat::FullJsonl, dir)?;
    export(&out.trace, ExportFormat::FlatCsv, dir)?;
    if out.trace.header.channels.raster {
        export(&out.trace, ExportFormat::RasterPack, dir)?;
    }
    fs::write(dir.join(MANIFEST_FILE), manifest.to_json())
}

/// Manifest and raw trace bytes of a run directory (or a manifest path).
pub fn load_run(path: &Path) -> io::Result<(RunManifest, Vec<u8>)> {
    let manifest_path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(&manifest_path)?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let trace = fs::read(dir.join(TRACE_FILE))?;
    Ok((manifest, trace))
}
