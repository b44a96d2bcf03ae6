//! Snapshot persistence, configuration files and report emission.

pub mod config;
pub mod report;
pub mod snapshot;

pub use config::ConfigFile;
pub use report::{emit_sweep, sha256_hex, sorted_json, ReportBundle};
pub use snapshot::{load_series, load_snapshot, save_snapshot};
