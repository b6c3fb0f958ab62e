use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{KinematicState, WorldEvent, WorldState};
use crate::evaluation::TerminalReason;
use crate::geometry::Pose2D;
use crate::model::{Overrides, WeatherPresetId};
use crate::perception::{Detection, EgoObservation, GoalObservation, Observation, PerceptionConfig};
use crate::engine::ContinuousControl;
use crate::policy::EgoAction;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// Which optional observation channels a run records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channels {
    pub lidar: bool,
    pub detections: bool,
    pub raster: bool,
}

impl Channels {
    pub const ALL: Channels = Channels {
        lidar: true,
        detections: true,
        raster: true,
    };
    pub const NONE: Channels = Channels {
        lidar: false,
        detections: false,
        raster: false,
    };
}

impl fmt::Display for Channels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.lidar {
            names.push("lidar");
        }
        if self.detections {
            names.push("detections");
        }
        if self.raster {
            names.push("raster");
        }
        if names.is_empty() {
            return f.write_str("none");
        }
        f.write_str(&names.join(","))
    }
}

impl FromStr for Channels {
    type Err = String;

    /// Comma list drawn from `lidar`, `detections`, `raster`; `none` or an
    /// empty string selects nothing.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Channels::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "lidar" => c.lidar = true,
                "detections" => c.detections = true,
                "raster" => c.raster = true,
                "none" => {}
                "all" => c = Channels::ALL,
                other => return Err(format!("unknown channel `{other}` (expected lidar, detections, raster)")),
            }
        }
        Ok(c)
    }
}

/// Run identity preceding the tick records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub scenario_id: String,
    pub seed: u64,
    pub overrides: Overrides,
    pub engine_version: String,
    pub schema_version: u32,
    pub dt: f64,
    pub channels: Channels,
    pub perception: PerceptionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorRecord {
    pub id: String,
    pub pose: Pose2D,
    pub speed: f64,
    pub height: f64,
    pub vertical_speed: f64,
    pub active: bool,
}

/// Recorded observation; optional channels are omitted when not selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationRecord {
    pub ego: EgoObservation,
    pub goal: GoalObservation,
    pub weather: WeatherPresetId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lidar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detections: Option<Vec<Detection>>,
    /// Base64 of the row-major raster cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<String>,
}

impl ObservationRecord {
    pub fn new(obs: &Observation, raster: Option<&[u8]>, channels: &Channels) -> Self {
        use base64::Engine;
        ObservationRecord {
            ego: obs.ego,
            goal: obs.goal,
            weather: obs.weather,
            lidar: channels.lidar.then(|| obs.lidar.clone()),
            detections: channels.detections.then(|| obs.detections.clone()),
            raster: raster.map(|r| base64::engine::general_purpose::STANDARD.encode(r)),
        }
    }

    pub fn raster_cells(&self) -> Option<Result<Vec<u8>, base64::DecodeError>> {
        use base64::Engine;
        self.raster
            .as_ref()
            .map(|r| base64::engine::general_purpose::STANDARD.decode(r))
    }
}

/// One tick: the observation at `tick`, the decision taken on it, and the
/// world state after the resulting step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TickRecord {
    pub tick: u64,
    pub sim_time: f64,
    pub ego: KinematicState,
    pub actors: Vec<ActorRecord>,
    pub observation: ObservationRecord,
    pub action: EgoAction,
    pub control: ContinuousControl,
    pub events: Vec<WorldEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<TerminalReason>,
}

pub fn actor_records(world: &WorldState) -> Vec<ActorRecord> {
    world
        .bodies
        .iter()
        .zip(&world.actors)
        .map(|(b, a)| ActorRecord {
            id: b.id.clone(),
            pose: a.kin.pose,
            speed: a.kin.speed,
            height: a.kin.height,
            vertical_speed: a.kin.vertical_speed,
            active: a.kin.active,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("tick gap: expected record {expected}, got {found}")]
    TickGap { expected: u64, found: u64 },
    #[error("trace already finalized")]
    Finalized,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub records: Vec<TickRecord>,
}

fn canonical<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("trace values serialize")
}

impl Trace {
    pub fn new(header: TraceHeader) -> Self {
        Trace {
            header,
            records: Vec::new(),
        }
    }

    pub fn is_finalized(&self) -> bool {
        self.records.last().is_some_and(|r| r.terminal.is_some())
    }

    /// Append the next record; ticks must be contiguous from 0.
    pub fn record_tick(&mut self, record: TickRecord) -> Result<(), TraceError> {
        if self.is_finalized() {
            return Err(TraceError::Finalized);
        }
        let expected = self.records.len() as u64;
        if record.tick != expected {
            return Err(TraceError::TickGap {
                expected,
                found: record.tick,
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn header_line(&self) -> String {
        canonical(&self.header)
    }

    /// The `trace.jsonl` bytes: one canonical line per record.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&canonical(r));
            out.push('\n');
        }
        out
    }

    pub fn hash(&self) -> String {
        hash_parts(&self.header, self.jsonl().as_bytes())
    }

    pub fn from_jsonl(header: TraceHeader, text: &str) -> Result<Trace, TraceError> {
        let mut trace = Trace::new(header);
        for (i, line) in text.lines().enumerate() {
            let rec: TickRecord = serde_json::from_str(line).map_err(|e| TraceError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            trace.record_tick(rec)?;
        }
        Ok(trace)
    }
}

/// SHA-256 over the canonical header line and the record lines, each
/// newline-terminated, as lowercase hex.
pub fn hash_parts(header: &TraceHeader, jsonl: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(canonical(header).as_bytes());
    h.update(b"\n");
    h.update(jsonl);
    hex::encode(h.finalize())
}
