//! On-disk cache of bound families for `certify`.

use std::path::{Path, PathBuf};

use ncdegree::bounds::BoundResult;
use ncdegree::spec::{parse_bound_cache, BoundCache, ObservableSpec, SCHEMA_VERSION};
use ncdegree::Direction;
use serde::Serialize;

use crate::args::OptimizerArgs;
use crate::manifest::sha256_hex;
use crate::CliError;

pub const CACHE_ENV: &str = "NCDEGREE_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("ncdegree-cache"))
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    schema_version: u32,
    observable: &'a ObservableSpec,
    direction: Direction,
    overrides: &'a OptimizerArgs,
}

/// Hash of everything that determines the bound family except `r`.
pub fn cache_key(observable: &ObservableSpec, direction: Direction, overrides: &OptimizerArgs) -> String {
    let material = KeyMaterial {
        schema_version: SCHEMA_VERSION,
        observable,
        direction,
        overrides,
    };
    sha256_hex(&serde_json::to_vec(&material).expect("serializable key"))
}

pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// Cached results, or an empty list when the file is absent or unusable.
pub fn load(path: &Path, key: &str) -> Vec<BoundResult> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Vec::new();
    };
    match parse_bound_cache(&text) {
        Ok(cache) if cache.key == key => cache.results,
        Ok(_) => Vec::new(),
        Err(e) => {
            eprintln!("ignoring unreadable cache {}: {e}", path.display());
            Vec::new()
        }
    }
}

/// Writes through a temporary file and a rename so readers never see a
/// partial cache.
pub fn store(path: &Path, cache: &BoundCache) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let text = serde_json::to_string_pretty(cache).expect("serializable cache");
    std::fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
