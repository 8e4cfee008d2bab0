//! End-to-end experiments: field confinement, wearable charging and
//! passive telemetry readout.
//!
//! Default configurations live in `scenarios/*.json` at the workspace root
//! and are compiled in, so the library and the CLI agree on them.

mod charging;
mod confinement;
mod pit;

use serde::{Deserialize, Serialize};

pub use charging::{run_charging, ChargingConfig, LinkOverride};
pub use confinement::{run_confinement, ConfinementConfig, FarFieldSpec, Normalisation};
pub use pit::{run_pit, MonteCarloSpec, PitConfig, TagGeometry};
pub(crate) use pit::reading_ok;

use crate::error::{Error, Result};
use crate::geometry::{resample_path, BodyModel, WirePath};
use crate::io::RunOutput;

/// Where a coil's footprint centre sits on the body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    /// Radians from the body frame's first axis.
    pub azimuth: f64,
    /// Height along the body axis, metres.
    pub axial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Confinement(ConfinementConfig),
    Charging(ChargingConfig),
    Pit(PitConfig),
}

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::Confinement(_) => "confinement",
            ScenarioConfig::Charging(_) => "charging",
            ScenarioConfig::Pit(_) => "pit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScenarioConfig::Confinement(c) => c.validate(),
            ScenarioConfig::Charging(c) => c.validate(),
            ScenarioConfig::Pit(c) => c.validate(),
        }
    }

    /// Built-in default configuration by scenario name.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = builtin_text(name)
            .ok_or_else(|| Error::param("scenario", format!("unknown scenario `{name}`")))?;
        Self::from_json(serde_json::from_str(text)?)
    }

    /// Parses a document tagged with `kind`, keeping JSON paths in errors.
    pub fn from_json(doc: serde_json::Value) -> Result<Self> {
        use crate::commands::parse_tagged;
        match doc.get("kind").and_then(|k| k.as_str()) {
            Some("confinement") => Ok(ScenarioConfig::Confinement(parse_tagged(doc)?)),
            Some("charging") => Ok(ScenarioConfig::Charging(parse_tagged(doc)?)),
            Some("pit") => Ok(ScenarioConfig::Pit(parse_tagged(doc)?)),
            _ => Err(Error::Config {
                path: "kind".into(),
                reason: format!("expected one of {}", BUILTIN_SCENARIOS.join(", ")),
            }),
        }
    }
}

pub const BUILTIN_SCENARIOS: [&str; 3] = ["confinement", "charging", "pit"];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    match name {
        "confinement" => Some(include_str!("../../../../scenarios/confinement.json")),
        "charging" => Some(include_str!("../../../../scenarios/charging.json")),
        "pit" => Some(include_str!("../../../../scenarios/pit.json")),
        _ => None,
    }
}

/// Runs a scenario. `config_echo` is the effective JSON written back into
/// the report; `seed` overrides the configured seed where one is used.
pub fn run_scenario(config: &ScenarioConfig, config_echo: serde_json::Value, seed: Option<u64>) -> Result<RunOutput> {
    config.validate()?;
    match config {
        ScenarioConfig::Confinement(c) => run_confinement(c, config_echo),
        ScenarioConfig::Charging(c) => run_charging(c, config_echo),
        ScenarioConfig::Pit(c) => run_pit(c, config_echo, seed),
    }
}

/// Resamples a flat coil and wraps it so its footprint centre lands on
/// `placement`.
pub fn wrap_centred(
    body: &BodyModel,
    flat: &WirePath,
    footprint: (f64, f64),
    standoff: f64,
    placement: Placement,
    max_segment: f64,
) -> Result<WirePath> {
    let fine = resample_path(flat, max_segment)?;
    body.wrap(
        &fine,
        (0.5 * footprint.0, 0.5 * footprint.1),
        standoff,
        placement.azimuth,
        placement.axial,
    )
}

pub fn default_max_segment() -> f64 {
    crate::geometry::DEFAULT_MAX_SEGMENT
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        for name in BUILTIN_SCENARIOS {
            let cfg = ScenarioConfig::builtin(name).unwrap();
            assert_eq!(cfg.name(), name);
            cfg.validate().unwrap();
        }
        assert!(ScenarioConfig::builtin("nope").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-2.5)).collect();
        assert!((log_log_slope(&x, &y) + 2.5).abs() < 1e-12);
    }
}
