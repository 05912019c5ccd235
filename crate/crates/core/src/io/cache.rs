//! Content-addressed on-disk store of finished results.
//!
//! Each entry is a JSON file named by the SHA-256 of its key and holding the
//! full key next to the value, so a digest collision reads as a miss.
//! Entries are written to a temporary file and renamed into place; several
//! processes may share one directory, and deleting it at any time is safe.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::warn;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::params::PhysicalParams;
use crate::pipeline::{scintillation_index, RunOptions, ScintResult};
use crate::ScintError;
use crate::CODE_VERSION;

/// Everything a cached value depends on. Floats are stored by bit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub module: String,
    pub params: [u64; 7],
    pub rel_tol: u64,
    pub mc_samples: u64,
    pub seed: u64,
    pub code_version: String,
}

impl CacheKey {
    pub fn new(module: &str, p: &PhysicalParams, opts: &RunOptions) -> Self {
        Self {
            module: module.to_string(),
            params: [p.cn2, p.l0, p.outer_scale, p.q0, p.z, p.r0, p.lambda_c].map(f64::to_bits),
            rel_tol: opts.rel_tol.to_bits(),
            mc_samples: opts.mc_samples,
            seed: opts.seed,
            code_version: CODE_VERSION.to_string(),
        }
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("key serializes");
        hex::encode(Sha256::digest(canonical))
    }
}

#[derive(Serialize, Deserialize)]
struct Record<T> {
    key: CacheKey,
    value: T,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// Stored value, or `None` on a miss. Unreadable entries are reported
    /// and treated as misses.
    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn!("cache entry {} unreadable: {e}", path.display());
                return None;
            }
        };
        match serde_json::from_slice::<Record<T>>(&bytes) {
            Ok(rec) if rec.key == *key => Some(rec.value),
            Ok(_) => None,
            Err(e) => {
                warn!("cache entry {} is corrupt ({e}); recomputing", path.display());
                None
            }
        }
    }

    pub fn put<T: Serialize>(&self, key: &CacheKey, value: &T) -> io::Result<()> {
        let rec = Record {
            key: key.clone(),
            value,
        };
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, &rec)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Look `key` up, computing and storing the value on a miss. The flag is
/// `true` for a hit. Failed computations are not stored; a failed store
/// only logs a warning.
pub fn cache_get_or_compute<T, E, F>(cache: Option<&Cache>, key: &CacheKey, compute: F) -> Result<(T, bool), E>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> Result<T, E>,
{
    let Some(cache) = cache else {
        return compute().map(|v| (v, false));
    };
    if let Some(v) = cache.get(key) {
        return Ok((v, true));
    }
    let v = compute()?;
    if let Err(e) = cache.put(key, &v) {
        warn!("cannot write cache entry in {}: {e}", cache.dir.display());
    }
    Ok((v, false))
}

/// [`scintillation_index`] through the cache. A hit reports zero
/// evaluations.
pub fn cached_scintillation_index(
    cache: Option<&Cache>,
    p: &PhysicalParams,
    opts: &RunOptions,
) -> Result<ScintResult, ScintError> {
    let key = CacheKey::new("scintillation_index", p, opts);
    let (mut r, hit) = cache_get_or_compute(cache, &key, || scintillation_index(p, opts))?;
    if hit {
        r.evaluations = 0;
    }
    Ok(r)
}
