//! Configs and runners behind the CLI subcommands.
//!
//! Every config is a JSON object with a `kind` field. Dispatch on `kind` is
//! done by hand so deserialisation errors keep their JSON path.

mod field;
mod geom;
mod link;
mod readout;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use field::{run_field, FieldConfig};
pub use geom::{run_geom, CoilEntry, CoilSpec, GeomConfig};
pub use link::{run_link, LinkConfig};
pub use readout::{run_readout, ReadoutConfig};

use crate::error::{Error, Result};
use crate::io::{from_value, RunOutput};
use crate::scenarios::{run_scenario, ScenarioConfig};

/// Any runnable configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Geom(GeomConfig),
    Field(FieldConfig),
    Link(LinkConfig),
    Readout(ReadoutConfig),
    Scenario(ScenarioConfig),
}

pub const KINDS: [&str; 7] = ["geom", "field", "link", "readout", "confinement", "charging", "pit"];

/// Reads the `kind` tag of a config document.
pub fn config_kind(doc: &Value) -> Result<&str> {
    let kind = doc
        .get("kind")
        .ok_or_else(|| Error::Config {
            path: "kind".into(),
            reason: format!("missing; expected one of {}", KINDS.join(", ")),
        })?
        .as_str()
        .ok_or_else(|| Error::Config {
            path: "kind".into(),
            reason: "must be a string".into(),
        })?;
    if KINDS.contains(&kind) {
        Ok(kind)
    } else {
        Err(Error::Config {
            path: "kind".into(),
            reason: format!("unknown kind `{kind}`; expected one of {}", KINDS.join(", ")),
        })
    }
}

/// Strips `kind` and parses the body into `T`.
pub(crate) fn parse_tagged<T: serde::de::DeserializeOwned>(mut doc: Value) -> Result<T> {
    if let Value::Object(map) = &mut doc {
        map.remove("kind");
    }
    from_value(doc)
}

/// Serialises `value` with a leading `kind` field.
pub fn tagged_json<T: Serialize>(kind: &str, value: &T) -> Result<Value> {
    let mut map = serde_json::Map::new();
    map.insert("kind".into(), Value::String(kind.into()));
    if let Value::Object(body) = serde_json::to_value(value)? {
        map.extend(body);
    }
    Ok(Value::Object(map))
}

impl RunConfig {
    /// Parses and validates. Validation failures are reported as config
    /// errors so callers can tell them from runtime failures.
    pub fn from_json(doc: Value) -> Result<Self> {
        let cfg = match config_kind(&doc)? {
            "geom" => RunConfig::Geom(parse_tagged(doc)?),
            "field" => RunConfig::Field(parse_tagged(doc)?),
            "link" => RunConfig::Link(parse_tagged(doc)?),
            "readout" => RunConfig::Readout(parse_tagged(doc)?),
            _ => RunConfig::Scenario(ScenarioConfig::from_json(doc)?),
        };
        cfg.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::Config {
                path: name.into(),
                reason,
            },
            Error::Config { .. } => e,
            other => Error::Config {
                path: ".".into(),
                reason: other.to_string(),
            },
        })?;
        Ok(cfg)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunConfig::Geom(_) => "geom",
            RunConfig::Field(_) => "field",
            RunConfig::Link(_) => "link",
            RunConfig::Readout(_) => "readout",
            RunConfig::Scenario(s) => s.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::Geom(c) => c.validate(),
            RunConfig::Field(c) => c.validate(),
            RunConfig::Link(c) => c.validate(),
            RunConfig::Readout(c) => c.validate(),
            RunConfig::Scenario(c) => c.validate(),
        }
    }

    /// Runs the config. `echo` is stored in the report verbatim.
    pub fn run(&self, echo: Value, seed: Option<u64>) -> Result<RunOutput> {
        match self {
            RunConfig::Geom(c) => run_geom(c, echo),
            RunConfig::Field(c) => run_field(c, echo),
            RunConfig::Link(c) => run_link(c, echo),
            RunConfig::Readout(c) => run_readout(c, echo, seed),
            RunConfig::Scenario(c) => run_scenario(c, echo, seed),
        }
    }
}

/// Output names become file names, so keep them plain.
pub(crate) fn check_name(field: &'static str, name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(Error::param(field, format!("`{name}` must be 1-64 characters of [A-Za-z0-9_-]")))
    }
}

/// Log-spaced sweep bounds shared by the link config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    pub f_lo: f64,
    pub f_hi: f64,
    pub points: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn kind_is_required_and_checked() {
        assert!(matches!(config_kind(&json!({})), Err(Error::Config { .. })));
        assert!(matches!(config_kind(&json!({"kind": 3})), Err(Error::Config { .. })));
        assert!(config_kind(&json!({"kind": "warp"})).is_err());
        assert_eq!(config_kind(&json!({"kind": "link"})).unwrap(), "link");
    }

    #[test]
    fn tagged_round_trip() {
        let sweep = FrequencySweep {
            f_lo: 1.0,
            f_hi: 2.0,
            points: 3,
        };
        let doc = tagged_json("sweep", &sweep).unwrap();
        assert_eq!(doc["kind"], json!("sweep"));
        assert_eq!(parse_tagged::<FrequencySweep>(doc).unwrap(), sweep);
    }

    #[test]
    fn names_must_be_file_safe() {
        assert!(check_name("name", "tx_1").is_ok());
        assert!(check_name("name", "../x").is_err());
        assert!(check_name("name", "").is_err());
    }

    #[test]
    fn scenario_errors_keep_their_path() {
        let mut doc: Value = serde_json::from_str(crate::scenarios::builtin_text("pit").unwrap()).unwrap();
        doc["tags"][1]["placement"]["axial"] = json!("high");
        match RunConfig::from_json(doc).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "tags[1].placement.axial"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_failures_are_config_errors() {
        let mut doc: Value = serde_json::from_str(crate::scenarios::builtin_text("charging").unwrap()).unwrap();
        doc["exposure_h_limit"] = json!(-1.0);
        assert!(matches!(
            RunConfig::from_json(doc).unwrap_err(),
            Error::Config { ref path, .. } if path == "exposure_h_limit"
        ));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut doc: Value = serde_json::from_str(crate::scenarios::builtin_text("confinement").unwrap()).unwrap();
        doc["threshold_dbb"] = json!(3.0);
        assert!(matches!(RunConfig::from_json(doc).unwrap_err(), Error::Config { .. }));
    }
}
