use serde::{Deserialize, Serialize};

use super::CoilEntry;
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{BodyModel, Region};
use crate::io::{field_csv, Artifact, Report, RunOutput};
use crate::magnetics::{field_map, field_reduction_stats};
use crate::scenarios::default_max_segment;

fn one() -> f64 {
    1.0
}

fn threshold() -> f64 {
    10.0
}

/// Field map of one placed coil over the body grid, optionally compared
/// per ampere against a reference coil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default)]
    pub body: BodyModel,
    pub coil: CoilEntry,
    #[serde(default = "one")]
    pub current: f64,
    #[serde(default)]
    pub reference: Option<CoilEntry>,
    #[serde(default = "threshold")]
    pub threshold_db: f64,
    #[serde(default = "default_max_segment")]
    pub max_segment: f64,
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        ensure_positive("current", self.current)?;
        ensure_positive("max_segment", self.max_segment)?;
        if !self.threshold_db.is_finite() {
            return Err(Error::param("threshold_db", "must be finite"));
        }
        for c in std::iter::once(&self.coil).chain(&self.reference) {
            c.validate()?;
            if c.placement.is_none() {
                return Err(Error::param("placement", format!("coil `{}` needs a placement on the body", c.name)));
            }
        }
        if let Some(r) = &self.reference {
            if r.name == self.coil.name {
                return Err(Error::param("reference", "needs a name distinct from the coil"));
            }
        }
        Ok(())
    }
}

pub fn run_field(cfg: &FieldConfig, config_echo: serde_json::Value) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = cfg.body.grid()?;
    let coil = cfg.coil.build(&cfg.body, cfg.max_segment)?;
    let map = field_map(&coil, cfg.current, &grid)?;

    let mut report = Report::new("field", config_echo, None);
    let m = &mut report.metrics;
    for region in Region::ALL {
        let name = region.as_str();
        m.insert(format!("points_{name}"), grid.count(region) as f64);
        if let Some(h) = map.peak_h(&[region]) {
            m.insert(format!("peak_h_{name}_a_per_m"), h);
        }
    }
    m.insert(
        "masked_points".into(),
        map.masked.iter().filter(|&&x| x).count() as f64,
    );

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv(format!("field_{}.csv", cfg.coil.name), &field_csv(&map))?);

    if let Some(refc) = &cfg.reference {
        let path = refc.build(&cfg.body, cfg.max_segment)?;
        let ref_map = field_map(&path, cfg.current, &grid)?;
        let stats = field_reduction_stats(&map, &ref_map, cfg.threshold_db)?;
        let m = &mut out.report.metrics;
        for region in Region::ALL {
            if let Some(s) = stats.region(region) {
                let name = region.as_str();
                m.insert(format!("frac_ge_threshold_{name}"), s.frac_ge_threshold);
                m.insert(format!("median_reduction_db_{name}"), s.median_reduction_db);
            }
        }
        out.add(Artifact::csv(format!("field_{}.csv", refc.name), &field_csv(&ref_map))?);
        out.add(Artifact::json("reduction_stats.json", &stats)?);
    }
    Ok(out)
}
