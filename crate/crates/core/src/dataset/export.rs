//! File formats written next to a run manifest.

use std::fs;
use std::io;
use std::path::Path;

use super::trace::{Trace, TraceError};
use crate::engine::EventKind;

pub const TRACE_FILE: &str = "trace.jsonl";
pub const CSV_FILE: &str = "trace.csv";
pub const RASTER_FILE: &str = "rasters.bin";
pub const RASTER_INDEX_FILE: &str = "rasters.idx";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    FullJsonl,
    FlatCsv,
    RasterPack,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 3] = [ExportFormat::FullJsonl, ExportFormat::FlatCsv, ExportFormat::RasterPack];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportFormat::FullJsonl => "full-jsonl",
            ExportFormat::FlatCsv => "flat-csv",
            ExportFormat::RasterPack => "raster-pack",
        }
    }
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExportFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown export format `{s}`"))
    }
}

/// Column order of the flat CSV, schema version 1.
pub const CSV_COLUMNS: [&str; 18] = [
    "tick",
    "sim_time",
    "ego_x",
    "ego_y",
    "ego_heading",
    "ego_speed",
    "ego_steer_angle",
    "action",
    "throttle",
    "brake",
    "steer",
    "event_count",
    "collision",
    "trigger_fired",
    "goal_reached",
    "protocol_fault",
    "policy_warning",
    "terminal",
];

/// Write one CSV row; fields never contain separators or quotes.
pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

pub fn flat_csv(trace: &Trace) -> String {
    let mut out = csv_line(&CSV_COLUMNS.map(str::to_string));
    for r in &trace.records {
        let has = |f: fn(&EventKind) -> bool| r.events.iter().any(|e| f(&e.event));
        let row = vec![
            r.tick.to_string(),
            r.sim_time.to_string(),
            r.ego.pose.x.to_string(),
            r.ego.pose.y.to_string(),
            r.ego.pose.heading.to_string(),
            r.ego.speed.to_string(),
            r.ego.steer_angle.to_string(),
            r.action.label().to_string(),
            r.control.throttle.to_string(),
            r.control.brake.to_string(),
            r.control.steer.to_string(),
            r.events.len().to_string(),
            flag(has(|e| matches!(e, EventKind::Collision(_)))),
            flag(has(|e| matches!(e, EventKind::TriggerFired { .. }))),
            flag(has(|e| matches!(e, EventKind::GoalReached))),
            flag(has(|e| matches!(e, EventKind::ProtocolFault { .. }))),
            flag(has(|e| matches!(e, EventKind::PolicyWarning { .. }))),
            r.terminal.map_or(String::new(), |t| t.as_str().to_string()),
        ];
        out.push_str(&csv_line(&row));
    }
    out
}

/// Length-prefixed raster records plus a `tick offset length` index.
pub fn raster_pack(trace: &Trace) -> Result<(Vec<u8>, String), TraceError> {
    let mut bin = Vec::new();
    let mut idx = String::new();
    for r in &trace.records {
        let Some(cells) = r.observation.raster_cells() else {
            continue;
        };
        let cells = cells.map_err(|e| TraceError::Parse {
            line: r.tick as usize + 1,
            message: format!("raster: {e}"),
        })?;
        let offset = bin.len();
        bin.extend_from_slice(&(cells.len() as u32).to_le_bytes());
        bin.extend_from_slice(&cells);
        idx.push_str(&format!("{} {} {}\n", r.tick, offset, cells.len()));
    }
    Ok((bin, idx))
}

/// Parse a raster pack back into `(tick, cells)` pairs, checking the index.
pub fn read_raster_pack(bin: &[u8], idx: &str) -> Result<Vec<(u64, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for (n, line) in idx.lines().enumerate() {
        let parts: Vec<u64> = line
            .split(' ')
            .map(|p| p.parse::<u64>().map_err(|e| format!("index line {}: {e}", n + 1)))
            .collect::<Result<_, _>>()?;
        let [tick, offset, len] = parts[..] else {
            return Err(format!("index line {} needs three fields", n + 1));
        };
        let (offset, len) = (offset as usize, len as usize);
        let head = bin
            .get(offset..offset + 4)
            .ok_or_else(|| format!("record {tick}: offset past end"))?;
        let stored = u32::from_le_bytes(head.try_into().expect("4 bytes")) as usize;
        if stored != len {
            return Err(format!("record {tick}: index length {len} but prefix {stored}"));
        }
        let cells = bin
            .get(offset + 4..offset + 4 + len)
            .ok_or_else(|| format!("record {tick}: truncated"))?;
        out.push((tick, cells.to_vec()));
    }
    Ok(out)
}

pub fn export(trace: &Trace, format: ExportFormat, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    match format {
        ExportFormat::FullJsonl => fs::write(dir.join(TRACE_FILE), trace.jsonl()),
        ExportFormat::FlatCsv => fs::write(dir.join(CSV_FILE), flat_csv(trace)),
        ExportFormat::RasterPack => {
            let (bin, idx) = raster_pack(trace).map_err(io::Error::other)?;
            fs::write(dir.join(RASTER_FILE), bin)?;
            fs::write(dir.join(RASTER_INDEX_FILE), idx)
        }
    }
}
