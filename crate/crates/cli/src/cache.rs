//! Content-addressed on-disk store for DT kernels.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use irrmot_core::genfun::{dt_kernels_uncached, install_kernels, GenFunParams, Kernels};
use irrmot_core::series::{GradedSeries, SeriesJson};
use irrmot_core::Error;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "IRRMOT_CACHE_DIR";
const DEFAULT_DIR: &str = ".irrmot-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The stored entry was unreadable and has been replaced.
    Recomputed,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    params: GenFunParams,
    h_univ: SeriesJson,
    h_sch: SeriesJson,
}

pub struct KernelCache {
    dir: PathBuf,
}

impl KernelCache {
    /// Directory from the flag, else the environment, else the default.
    pub fn new(flag: Option<PathBuf>) -> Self {
        let dir = flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_DIR));
        KernelCache { dir }
    }

    pub fn key(p: &GenFunParams) -> String {
        let text = format!("irrmot-kernels/{}/{}", env!("CARGO_PKG_VERSION"), serde_json::to_string(p).expect("params serialize"));
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, p: &GenFunParams) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(p)))
    }

    fn read(&self, path: &Path, p: &GenFunParams) -> Result<Kernels, String> {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let e: Entry = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        if &e.params != p || e.version != env!("CARGO_PKG_VERSION") {
            return Err("entry does not match its key".into());
        }
        let h_univ = GradedSeries::from_json(&e.h_univ).map_err(|e| e.to_string())?;
        let h_sch = GradedSeries::from_json(&e.h_sch).map_err(|e| e.to_string())?;
        Ok(Kernels { h_univ, h_sch })
    }

    fn write(&self, path: &Path, p: &GenFunParams, k: &Kernels) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let e = Entry { version: env!("CARGO_PKG_VERSION").into(), params: p.clone(), h_univ: k.h_univ.to_json(), h_sch: k.h_sch.to_json() };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&e).expect("entry serializes"))?;
        fs::rename(&tmp, path)
    }

    /// Loads or computes the kernels and seeds the in-process memo with them.
    pub fn load(&self, p: &GenFunParams) -> Result<(Arc<Kernels>, CacheStatus), Error> {
        let path = self.path(p);
        let mut status = CacheStatus::Miss;
        if path.exists() {
            match self.read(&path, p) {
                Ok(k) => {
                    eprintln!("cache hit {}", path.display());
                    return Ok((install_kernels(p, k), CacheStatus::Hit));
                }
                Err(e) => {
                    eprintln!("warning: corrupt cache entry {} ({e}); recomputing", path.display());
                    status = CacheStatus::Recomputed;
                }
            }
        } else {
            eprintln!("cache miss {}", path.display());
        }
        let k = dt_kernels_uncached(p)?;
        if let Err(e) = self.write(&path, p, &k) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
        Ok((install_kernels(p, k), status))
    }
}
