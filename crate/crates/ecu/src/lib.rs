//! File formats, the live session service and batch tools built on
//! `ecu-core`.
//!
//! The core crate holds every computation; this crate adds what needs an
//! operating system: versioned JSON documents, CSV transcripts, the
//! event-sourced session store, the HTTP API and the command-line entry
//! points.

pub mod content;
pub mod dataset;
pub mod model_file;
pub mod parallel;
pub mod plot;
pub mod render;
pub mod service;
pub mod session;
pub mod simulate;
pub mod store;
pub mod transcript;

/// Milliseconds since the Unix epoch.
pub fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
