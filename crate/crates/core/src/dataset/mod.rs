//! Traces, exports, manifests and replay.

pub mod export;
pub mod manifest;
pub mod replay;
pub mod trace;

pub use export::{export, flat_csv, raster_pack, read_raster_pack, ExportFormat, CSV_COLUMNS};
pub use manifest::{load_run, run_dir, write_run, RunManifest, MANIFEST_FILE};
pub use replay::{replay, ReplayError, ReplayReport};
pub use trace::{Channels, TickRecord, Trace, TraceError, TraceHeader};
