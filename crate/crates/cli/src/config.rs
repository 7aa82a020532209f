use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Marks a manifest so it can be passed back as `--config`.
pub const MANIFEST_VERSION: u32 = 1;

/// A configuration with the seed recorded in a manifest, if any.
pub struct Loaded<T> {
    pub config: T,
    pub manifest_seed: Option<u64>,
}

/// Reads `path` and overlays its keys onto `base`. A manifest file is
/// accepted in place of a config: its `config` and `master_seed` are used.
/// Unknown keys and type errors are reported with their field path.
pub fn load<T>(path: Option<&Path>, base: T) -> CliResult<Loaded<T>>
where
    T: Serialize + DeserializeOwned,
{
    let Some(path) = path else {
        return Ok(Loaded {
            config: base,
            manifest_seed: None,
        });
    };
    let (overlay, manifest_seed) = read(path)?;
    let mut merged = serde_json::to_value(&base).map_err(|e| CliError::config(e.to_string()))?;
    merge(&mut merged, overlay);
    Ok(Loaded {
        config: decode(path, merged)?,
        manifest_seed,
    })
}

/// Like [`load`] but the file replaces the defaults entirely.
pub fn load_whole<T: DeserializeOwned>(path: &Path) -> CliResult<Loaded<T>> {
    let (value, manifest_seed) = read(path)?;
    Ok(Loaded {
        config: decode(path, value)?,
        manifest_seed,
    })
}

fn read(path: &Path) -> CliResult<(Value, Option<u64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if value.get("manifest_version").is_none() {
        return Ok((value, None));
    }
    let seed = value.get("master_seed").and_then(Value::as_u64);
    let config = value
        .get_mut("config")
        .map(Value::take)
        .ok_or_else(|| CliError::config(format!("{}: manifest has no config", path.display())))?;
    Ok((config, seed))
}

fn decode<T: DeserializeOwned>(path: &Path, value: Value) -> CliResult<T> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| CliError::config(format!("{}: {}: {}", path.display(), e.path(), e.inner())))
}

/// Recursive object merge; non-object values in `overlay` replace `base`.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
