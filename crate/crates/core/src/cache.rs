//! On-disk cache of invariant tables.
//!
//! A cache file is `{"schema_version": 1, "payload": <table json>, "digest": <hex sha256>}`
//! where the digest covers the compact JSON encoding of the payload. A file
//! whose digest does not match, whose schema is unknown, or whose last column
//! disagrees with a fresh Vandermonde solve is rejected and the table is
//! recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coeffs::LevelTable;
use crate::error::{Error, Result};
use crate::format::TableJson;
use crate::invariants::{invariants_recursive, invariants_vandermonde, InvariantTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema_version: u32,
    pub payload: TableJson,
    pub digest: String,
}

impl CacheFile {
    pub fn new(table: &InvariantTable) -> Result<Self> {
        let payload = TableJson::from(table);
        let digest = payload_digest(&payload)?;
        Ok(CacheFile { schema_version: SCHEMA_VERSION, payload, digest })
    }

    /// Checks schema and digest, then decodes the table.
    pub fn table(&self) -> Result<InvariantTable> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Inconsistent(format!(
                "cache schema {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let actual = payload_digest(&self.payload)?;
        if actual != self.digest {
            return Err(Error::Inconsistent(format!(
                "cache digest mismatch: stored {}, computed {actual}",
                self.digest
            )));
        }
        self.payload.to_table()
    }
}

pub fn payload_digest(payload: &TableJson) -> Result<String> {
    let bytes = serde_json::to_vec(payload)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn table_digest(table: &InvariantTable) -> Result<String> {
    payload_digest(&TableJson::from(table))
}

/// Recomputes column `kmax` by the Vandermonde route and compares.
pub fn revalidate(table: &InvariantTable) -> Result<()> {
    let k = table.kmax();
    let mut source = LevelTable::new(k);
    let fresh = invariants_vandermonde(k, |n| source.coeff(n, k))?;
    if fresh.as_slice() != table.column(k) {
        return Err(Error::Inconsistent(format!("cached column k={k} fails revalidation")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// Where a table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Cached,
    /// Computed now; `rejected` is true when a cache file existed but failed checks.
    Computed {
        rejected: bool,
    },
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kmax: u64) -> PathBuf {
        self.dir.join(format!("invariants-k{kmax}.json"))
    }

    pub fn save(&self, table: &InvariantTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(table.kmax());
        let file = CacheFile::new(table)?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(&file)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads and fully validates; `Ok(None)` when no file exists.
    pub fn load(&self, kmax: u64) -> Result<Option<InvariantTable>> {
        let path = self.path_for(kmax);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let file: CacheFile = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Inconsistent(format!("unreadable cache {}: {e}", path.display())))?;
        let table = file.table()?;
        if table.kmax() != kmax {
            return Err(Error::Inconsistent(format!("cache file holds kmax {}", table.kmax())));
        }
        revalidate(&table)?;
        Ok(Some(table))
    }

    /// Cached table if valid, otherwise recompute (recursive route) and store.
    pub fn get_or_compute(&self, kmax: u64) -> Result<(InvariantTable, Provenance)> {
        let rejected = match self.load(kmax) {
            Ok(Some(t)) => return Ok((t, Provenance::Cached)),
            Ok(None) => false,
            Err(Error::Inconsistent(_)) | Err(Error::Parse(_)) => true,
            Err(e) => return Err(e),
        };
        let table = invariants_recursive(kmax)?;
        self.save(&table)?;
        Ok((table, Provenance::Computed { rejected }))
    }

    /// Removes every cache file in the directory; returns how many.
    pub fn clear(&self) -> Result<usize> {
        let mut removed = 0;
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        for entry in entries {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            if name.starts_with("invariants-k") && name.ends_with(".json") {
                fs::remove_file(&path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}
