use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::check_name;
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{
    build_helical_path, build_loop_path, build_meander_path, resample_path, BodyModel, HelicalSpec, LoopSpec,
    MeanderSpec, WirePath, DEFAULT_STANDOFF,
};
use crate::io::{path_csv, Artifact, Report, RunOutput};
use crate::magnetics::{ac_resistance, mutual_inductance, self_inductance};
use crate::scenarios::{default_max_segment, wrap_centred, Placement};

/// Any coil builder, written as `{"meander": {...}}` and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoilSpec {
    Meander(MeanderSpec),
    Helical(HelicalSpec),
    Loop(LoopSpec),
}

impl CoilSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoilSpec::Meander(s) => s.validate(),
            CoilSpec::Helical(s) => s.validate(),
            CoilSpec::Loop(s) => s.validate(),
        }
    }

    pub fn flat_path(&self) -> Result<WirePath> {
        match self {
            CoilSpec::Meander(s) => build_meander_path(s),
            CoilSpec::Helical(s) => build_helical_path(s),
            CoilSpec::Loop(s) => build_loop_path(s),
        }
    }

    pub fn footprint_area(&self) -> f64 {
        match self {
            CoilSpec::Meander(s) => s.footprint_area(),
            CoilSpec::Helical(s) => s.footprint_area(),
            CoilSpec::Loop(s) => s.footprint_area(),
        }
    }
}

fn loop_gap() -> f64 {
    DEFAULT_STANDOFF
}

/// A named coil, optionally placed on the body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilEntry {
    pub name: String,
    pub coil: CoilSpec,
    /// Flat coils are wrapped around the body; loops sit tangent to it.
    /// Without a placement the coil stays flat in the xy-plane.
    #[serde(default)]
    pub placement: Option<Placement>,
    /// Radial clearance of a placed loop above the body surface.
    #[serde(default = "loop_gap")]
    pub gap: f64,
}

impl CoilEntry {
    pub fn validate(&self) -> Result<()> {
        check_name("name", &self.name)?;
        self.coil.validate()?;
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::param("gap", "must be non-negative"));
        }
        Ok(())
    }

    /// Builds, resamples to `max_segment` and places the coil.
    pub fn build(&self, body: &BodyModel, max_segment: f64) -> Result<WirePath> {
        let flat = self.coil.flat_path()?;
        let Some(p) = self.placement else {
            return resample_path(&flat, max_segment);
        };
        match &self.coil {
            CoilSpec::Meander(s) => wrap_centred(
                body,
                &flat,
                (s.footprint_width, s.footprint_height),
                s.standoff,
                p,
                max_segment,
            ),
            CoilSpec::Helical(s) => wrap_centred(
                body,
                &flat,
                (s.footprint_width, s.footprint_height),
                s.standoff,
                p,
                max_segment,
            ),
            CoilSpec::Loop(_) => {
                let fine = resample_path(&flat, max_segment)?;
                body.place_tangent(&fine, body.radius + self.gap, p.azimuth, p.axial)
            }
        }
    }
}

fn frequency() -> f64 {
    6.78e6
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeomConfig {
    #[serde(default)]
    pub body: BodyModel,
    pub coils: Vec<CoilEntry>,
    /// Frequency for AC resistance and Q.
    #[serde(default = "frequency")]
    pub frequency: f64,
    /// Extract self and pairwise mutual inductance.
    #[serde(default = "yes")]
    pub inductance: bool,
    #[serde(default = "default_max_segment")]
    pub max_segment: f64,
}

impl GeomConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        ensure_positive("frequency", self.frequency)?;
        ensure_positive("max_segment", self.max_segment)?;
        if self.coils.is_empty() {
            return Err(Error::param("coils", "need at least one coil"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.coils {
            c.validate()?;
            if !seen.insert(c.name.as_str()) {
                return Err(Error::param("coils", format!("duplicate coil name `{}`", c.name)));
            }
        }
        Ok(())
    }
}

/// Builds every coil, exports its path and reports length, net area,
/// resistance and, when asked, inductances.
pub fn run_geom(cfg: &GeomConfig, config_echo: serde_json::Value) -> Result<RunOutput> {
    cfg.validate()?;
    let paths = cfg
        .coils
        .iter()
        .map(|c| c.build(&cfg.body, cfg.max_segment))
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new("geom", config_echo, None);
    let m = &mut report.metrics;
    let mut self_l = Vec::with_capacity(paths.len());
    for (c, p) in cfg.coils.iter().zip(&paths) {
        let n = &c.name;
        let r = ac_resistance(p, cfg.frequency)?;
        m.insert(format!("{n}_length_m"), p.length());
        m.insert(format!("{n}_segments"), p.segment_count() as f64);
        m.insert(format!("{n}_net_area_m2"), p.vector_area().norm());
        m.insert(format!("{n}_footprint_area_m2"), c.coil.footprint_area());
        m.insert(format!("{n}_resistance_ohm"), r);
        if cfg.inductance {
            let l = self_inductance(p)?.value;
            m.insert(format!("{n}_inductance_h"), l);
            m.insert(format!("{n}_q"), 2.0 * std::f64::consts::PI * cfg.frequency * l / r);
            self_l.push(l);
        }
    }
    if cfg.inductance {
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                let mutual = mutual_inductance(&paths[i], &paths[j])?.value;
                let (a, b) = (&cfg.coils[i].name, &cfg.coils[j].name);
                m.insert(format!("mutual_{a}_{b}_h"), mutual);
                m.insert(format!("k_{a}_{b}"), mutual.abs() / (self_l[i] * self_l[j]).sqrt());
            }
        }
    }

    let mut out = RunOutput::new(report);
    for (c, p) in cfg.coils.iter().zip(&paths) {
        out.add(Artifact::csv(format!("path_{}.csv", c.name), &path_csv(p))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConductorMaterial, LoopShape};

    fn square(name: &str, side: f64, placement: Option<Placement>) -> CoilEntry {
        CoilEntry {
            name: name.into(),
            coil: CoilSpec::Loop(LoopSpec {
                shape: LoopShape::Square { side_length: side },
                turns: 1,
                turn_spacing: 0.0,
                material: ConductorMaterial::copper(2.5e-4),
            }),
            placement,
            gap: 0.005,
        }
    }

    #[test]
    fn flat_square_metrics() {
        let cfg = GeomConfig {
            body: BodyModel::default(),
            coils: vec![square("sq", 0.04, None)],
            frequency: 1e6,
            inductance: true,
            max_segment: 2e-3,
        };
        let out = run_geom(&cfg, serde_json::Value::Null).unwrap();
        let r = &out.report;
        assert!((r.metric("sq_length_m").unwrap() - 0.16).abs() < 1e-12);
        assert!((r.metric("sq_net_area_m2").unwrap() - 16e-4).abs() < 1e-12);
        assert_eq!(r.artifacts, vec!["path_sq.csv"]);
        // one header line plus a line per vertex
        let lines = out.artifacts[0].bytes.iter().filter(|&&b| b == b'\n').count();
        assert_eq!(lines, 1 + r.metric("sq_segments").unwrap() as usize);
    }

    #[test]
    fn placed_loop_sits_on_the_body() {
        let body = BodyModel::default();
        let entry = square("sq", 0.04, Some(Placement { azimuth: 0.5, axial: 0.3 }));
        let p = entry.build(&body, 2e-3).unwrap();
        for v in p.vertices() {
            let r = body.radial_distance(*v);
            assert!(r >= body.radius + entry.gap - 1e-12);
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let cfg = GeomConfig {
            body: BodyModel::default(),
            coils: vec![square("a", 0.04, None), square("a", 0.03, None)],
            frequency: 1e6,
            inductance: false,
            max_segment: 2e-3,
        };
        assert!(cfg.validate().is_err());
    }
}
