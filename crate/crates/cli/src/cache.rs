//! On-disk result cache keyed by the config hash.
//!
//! Entries are the emitted CSV text, so a hit replays the earlier output
//! byte for byte. Writes go to a temporary file in the cache directory that
//! is then renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, MODEL_TAG};
use crate::error::{CliError, Result};
use crate::sweep::{run_sweep_with, PhysicsEvaluator, PointEvaluator};
use crate::table::{parse_csv, to_csv_string, Table};

pub const CACHE_ENV: &str = "NEQCP_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.csv"))
    }

    /// The cached CSV for `hash`, if present and current. Unreadable,
    /// corrupt or stale entries are skipped with a warning.
    pub fn lookup(&self, hash: &str) -> Option<(String, Table)> {
        let path = self.entry_path(hash);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
                return None;
            }
        };
        let table = match parse_csv(&text) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
                return None;
            }
        };
        let tool = format!("neqcp {}", env!("CARGO_PKG_VERSION"));
        if table.meta("config_hash") != Some(hash)
            || table.meta("tool") != Some(&tool)
            || table.meta("model") != Some(MODEL_TAG)
        {
            log::warn!("ignoring stale cache entry {}", path.display());
            return None;
        }
        Some((text, table))
    }

    pub fn store(&self, hash: &str, text: &str) -> Result<()> {
        let path = self.entry_path(hash);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        tmp.write_all(text.as_bytes()).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
        Ok(())
    }
}

/// Result of a sweep that may have come from the cache.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub csv: String,
    pub table: Table,
    pub from_cache: bool,
}

pub fn sweep_cached_with(
    config: &RunConfig,
    evaluator: &dyn PointEvaluator,
    jobs: usize,
    cache: Option<&Cache>,
) -> Result<SweepOutput> {
    config.validate()?;
    let hash = config.hash()?;
    if let Some((csv, table)) = cache.and_then(|c| c.lookup(&hash)) {
        log::info!("cache hit {hash}");
        return Ok(SweepOutput { csv, table, from_cache: true });
    }
    let table = run_sweep_with(config, evaluator, jobs)?;
    let csv = to_csv_string(&table)?;
    if let Some(c) = cache {
        c.store(&hash, &csv)?;
    }
    Ok(SweepOutput { csv, table, from_cache: false })
}

pub fn sweep_cached(config: &RunConfig, jobs: usize, cache: Option<&Cache>) -> Result<SweepOutput> {
    config.validate()?;
    sweep_cached_with(config, &PhysicsEvaluator::new(config)?, jobs, cache)
}
