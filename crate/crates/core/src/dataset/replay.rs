use super::manifest::RunManifest;
use super::trace::{hash_parts, TickRecord, Trace, TraceError, TRACE_SCHEMA_VERSION};
use crate::dsl::{parse_scenario, ParseError};
use crate::engine::EventKind;
use crate::evaluation::RunResult;
use crate::policy::{PolicyFault, PolicyStep, RecordedPolicy};
use crate::runner::{simulate, RunError, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("engine version {found} is incompatible with {expected}")]
    Version { found: String, expected: String },
    #[error("trace hash mismatch: manifest {expected}, trace {found}")]
    Integrity { expected: String, found: String },
    #[error("trace unreadable: {0}")]
    Corrupt(#[from] TraceError),
    #[error("embedded scenario: {0}")]
    Scenario(#[from] ParseError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("replay diverged at tick {tick}")]
    Divergence { tick: u64 },
    #[error("replay reproduced the trace but not the result")]
    ResultMismatch,
}

fn major(v: &str) -> &str {
    v.split('.').next().unwrap_or(v)
}

pub fn check_version(manifest: &RunManifest) -> Result<(), ReplayError> {
    let ours = crate::ENGINE_VERSION;
    let compatible = major(&manifest.engine_version) == major(ours)
        && major(&manifest.trace_header.engine_version) == major(ours)
        && manifest.trace_header.schema_version == TRACE_SCHEMA_VERSION;
    if compatible {
        Ok(())
    } else {
        Err(ReplayError::Version {
            found: manifest.engine_version.clone(),
            expected: ours.to_string(),
        })
    }
}

pub fn check_integrity(manifest: &RunManifest, trace_bytes: &[u8]) -> Result<(), ReplayError> {
    let found = hash_parts(&manifest.trace_header, trace_bytes);
    if found == manifest.trace_hash {
        Ok(())
    } else {
        Err(ReplayError::Integrity {
            expected: manifest.trace_hash.clone(),
            found,
        })
    }
}

/// The policy side of a recorded run: actions as received plus faults.
pub fn recorded_steps(records: &[TickRecord]) -> Vec<PolicyStep> {
    records
        .iter()
        .map(|r| PolicyStep {
            action: r.action,
            fault: r.events.iter().find_map(|e| match &e.event {
                EventKind::ProtocolFault { fault, fatal } if e.tick == r.tick => Some(PolicyFault {
                    fault: fault.clone(),
                    fatal: *fatal,
                }),
                _ => None,
            }),
        })
        .collect()
}

/// First tick at which two traces disagree.
pub fn first_divergence(a: &Trace, b: &Trace) -> Option<u64> {
    let n = a.records.len().min(b.records.len());
    (0..n)
        .find(|&i| a.records[i] != b.records[i])
        .map(|i| i as u64)
        .or_else(|| (a.records.len() != b.records.len()).then_some(n as u64))
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub trace_hash: String,
    pub result: RunResult,
}

/// Re-simulate a recorded run from its manifest, feeding recorded actions.
pub fn replay(manifest: &RunManifest, trace_bytes: &[u8]) -> Result<ReplayReport, ReplayError> {
    check_version(manifest)?;
    check_integrity(manifest, trace_bytes)?;
    let text = std::str::from_utf8(trace_bytes).map_err(|e| TraceError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    let recorded = Trace::from_jsonl(manifest.trace_header.clone(), text)?;
    let spec = parse_scenario(manifest.scenario_source.as_bytes())?;
    let opts = RunOptions {
        channels: manifest.trace_header.channels,
        perception: manifest.trace_header.perception,
    };
    let mut policy = RecordedPolicy::new(recorded_steps(&recorded.records));
    let out = simulate(&spec, &manifest.overrides, &opts, &mut policy)?;
    if let Some(tick) = first_divergence(&recorded, &out.trace) {
        return Err(ReplayError::Divergence { tick });
    }
    let trace_hash = out.trace.hash();
    if trace_hash != manifest.trace_hash {
        return Err(ReplayError::Divergence {
            tick: out.trace.records.len() as u64,
        });
    }
    if out.result != manifest.result {
        return Err(ReplayError::ResultMismatch);
    }
    Ok(ReplayReport {
        trace_hash,
        result: out.result,
    })
}
