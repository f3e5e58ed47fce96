//! Append-only results cache: one JSON record per line.
//!
//! Each record stores the [`RankReport`] of a single fixed-precision run,
//! keyed by datum, branch points and precision. The first record for a key
//! wins; later duplicates are ignored on load, so rereading never changes a
//! stored value. Corrupt lines are skipped with a warning.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::GaussianError;
use crate::gaussian::{compute_level, stable_rank_with, LevelResult, PrecisionPolicy, RankReport};
use crate::monodromy::MonodromyDatum;

/// Environment variable naming the default cache file.
pub const CACHE_ENV: &str = "GAUSSMAP_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub m: u32,
    pub a: Vec<u32>,
    pub branch_points: Vec<String>,
    pub precision: usize,
}

impl CacheKey {
    pub fn new(d: &MonodromyDatum, t: &[Rational], precision: usize) -> Self {
        CacheKey {
            m: d.m(),
            a: d.residues().to_vec(),
            branch_points: t.iter().map(|x| x.to_string()).collect(),
            precision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: RankReport,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug)]
pub struct ResultsCache {
    path: PathBuf,
    entries: Mutex<HashMap<CacheKey, RankReport>>,
    skipped: usize,
}

impl ResultsCache {
    /// Loads `path`, creating nothing until the first append.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        let mut skipped = 0;
        match File::open(&path) {
            Ok(f) => {
                for (lineno, line) in BufReader::new(f).lines().enumerate() {
                    let line = match line {
                        Ok(l) => l,
                        Err(e) => {
                            log::warn!(
                                "{}:{}: unreadable line skipped: {e}",
                                path.display(),
                                lineno + 1
                            );
                            skipped += 1;
                            continue;
                        }
                    };
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<CacheEntry>(&line) {
                        Ok(entry) => {
                            entries.entry(entry.key).or_insert(entry.value);
                        }
                        Err(e) => {
                            log::warn!(
                                "{}:{}: corrupt cache record skipped: {e}",
                                path.display(),
                                lineno + 1
                            );
                            skipped += 1;
                        }
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(ResultsCache {
            path,
            entries: Mutex::new(entries),
            skipped,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Number of corrupt lines skipped while loading.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &CacheKey) -> Option<RankReport> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    /// Appends a record unless the key is already present. Writes go through
    /// an exclusive file lock so concurrent processes do not interleave.
    pub fn insert(&self, key: CacheKey, value: RankReport) -> io::Result<()> {
        let mut entries = self.entries.lock().expect("cache lock");
        if entries.contains_key(&key) {
            return Ok(());
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let entry = CacheEntry {
            key: key.clone(),
            value: value.clone(),
            timestamp,
        };
        let mut line = serde_json::to_string(&entry).map_err(io::Error::other)?;
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        f.lock()?;
        let res = f.write_all(line.as_bytes()).and_then(|_| f.flush());
        f.unlock()?;
        res?;
        entries.insert(key, value);
        Ok(())
    }
}

fn level_from_report(r: &RankReport) -> LevelResult {
    LevelResult {
        precision: r.precision_used,
        mult_rank: r.mult_rank,
        i2_dim: r.i2_dim,
        mu2_rank: r.mu2_rank_lower_bound,
    }
}

/// Computes (or fetches) the fixed-precision report for one level.
pub fn cached_level(
    cache: Option<&ResultsCache>,
    d: &MonodromyDatum,
    t: &[Rational],
    precision: usize,
) -> Result<RankReport, GaussianError> {
    let key = CacheKey::new(d, t, precision);
    if let Some(hit) = cache.and_then(|c| c.get(&key)) {
        return Ok(hit);
    }
    let report = stable_rank_with(d, t, PrecisionPolicy::Fixed(precision), |p| {
        compute_level(d, t, p)
    })?;
    if let Some(c) = cache {
        if let Err(e) = c.insert(key, report.clone()) {
            log::warn!("could not append to cache {}: {e}", c.path().display());
        }
    }
    Ok(report)
}

/// [`crate::gaussian::stable_rank`] consulting and updating the cache at
/// every precision level. A fixed-precision cache hit is returned verbatim.
pub fn stable_rank_cached(
    cache: Option<&ResultsCache>,
    d: &MonodromyDatum,
    t: &[Rational],
    policy: PrecisionPolicy,
) -> Result<RankReport, GaussianError> {
    match policy {
        PrecisionPolicy::Fixed(p) => cached_level(cache, d, t, p),
        PrecisionPolicy::Escalate { .. } => stable_rank_with(d, t, policy, |p| {
            cached_level(cache, d, t, p).map(|r| level_from_report(&r))
        }),
    }
}
