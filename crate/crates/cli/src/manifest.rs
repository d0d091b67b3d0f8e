use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::Serialize;

/// Provenance attached to every report. Only the timestamp and wall-time
/// fields vary between runs with the same version, arguments and seeds.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seeds: Vec<u64>,
    pub calibration_digest: String,
    pub started: DateTime<Utc>,
    pub finished: Option<DateTime<Utc>>,
    pub task_wall_ms: Vec<(String, f64)>,
}

impl RunManifest {
    pub fn new(subcommand: &str, calibration_digest: String) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            seeds: Vec::new(),
            calibration_digest,
            started: Utc::now(),
            finished: None,
            task_wall_ms: Vec::new(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    /// Runs `f` and records its wall time under `name`.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.task_wall_ms.push((name.to_string(), start.elapsed().as_secs_f64() * 1e3));
        out
    }

    pub fn finish(&mut self) {
        self.finished = Some(Utc::now());
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub manifest: RunManifest,
    pub passed: bool,
    pub body: T,
}
