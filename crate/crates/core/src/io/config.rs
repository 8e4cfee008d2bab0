use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};

fn config_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

/// Reads a JSON document; a missing or unparsable file is a config error.
pub fn load_json(path: impl AsRef<Path>) -> Result<Value> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(path.display().to_string(), format!("cannot read config: {e}")))?;
    serde_json::from_str(&text).map_err(|e| config_err(path.display().to_string(), e.to_string()))
}

/// Splits `a.b.c=value`. The value is parsed as JSON when possible and
/// taken as a bare string otherwise.
pub fn parse_override(text: &str) -> Result<(String, Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| config_err(text, "override must look like key.path=value"))?;
    if key.is_empty() {
        return Err(config_err(text, "empty override key"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Replaces existing keys addressed by dotted paths. Array elements are
/// addressed by index. Unknown keys are rejected rather than created.
pub fn apply_overrides(doc: &mut Value, overrides: &[(String, Value)]) -> Result<()> {
    for (key, value) in overrides {
        let mut node = &mut *doc;
        for part in key.split('.') {
            node = match node {
                Value::Object(map) => map.get_mut(part),
                Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
                _ => None,
            }
            .ok_or_else(|| config_err(key.clone(), "override targets a key that does not exist"))?;
        }
        *node = value.clone();
    }
    Ok(())
}

/// Deserialises with the JSON path of the first offending key in the error.
pub fn from_value<T: DeserializeOwned>(doc: Value) -> Result<T> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        config_err(if path.is_empty() { ".".into() } else { path }, e.into_inner().to_string())
    })
}

/// `load_json` + overrides + typed parse.
pub fn read_config<T: DeserializeOwned>(path: impl AsRef<Path>, overrides: &[(String, Value)]) -> Result<(T, Value)> {
    let mut doc = load_json(path)?;
    apply_overrides(&mut doc, overrides)?;
    Ok((from_value(doc.clone())?, doc))
}
