//! Betti reports cached as one JSON file per `(n, w)`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Tag of the boundary convention; a different face rule must change it so
/// stale caches are ignored.
pub const CONVENTION: &str = "riffle-f2-v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiReport {
    pub n: usize,
    pub w: usize,
    pub betti: Vec<usize>,
    pub cells: Vec<usize>,
    pub euler: i64,
    pub top_dimension: usize,
    pub convention: String,
    pub elapsed_ms: u128,
    #[serde(default)]
    pub cached: bool,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Opens (creating if needed) a cache directory; `None` if it is not writable.
    pub fn open(dir: &Path) -> Option<Self> {
        fs::create_dir_all(dir).ok()?;
        let probe = dir.join(".conftc-write-probe");
        fs::write(&probe, b"").ok()?;
        let _ = fs::remove_file(probe);
        Some(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, n: usize, w: usize) -> PathBuf {
        self.dir.join(format!("betti-n{n}-w{w}-{CONVENTION}.json"))
    }

    pub fn load(&self, n: usize, w: usize) -> Option<BettiReport> {
        let text = fs::read_to_string(self.path(n, w)).ok()?;
        let report: BettiReport = serde_json::from_str(&text).ok()?;
        (report.n == n && report.w == w && report.convention == CONVENTION).then_some(report)
    }

    pub fn store(&self, report: &BettiReport) -> std::io::Result<()> {
        let stored = BettiReport {
            cached: false,
            ..report.clone()
        };
        let text = serde_json::to_string_pretty(&stored).expect("report serializes");
        let path = self.path(report.n, report.w);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)
    }
}
