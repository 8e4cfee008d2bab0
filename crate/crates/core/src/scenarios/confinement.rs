use serde::{Deserialize, Serialize};

use super::{default_max_segment, log_log_slope, wrap_centred, Placement};
use crate::circuit::log_spaced;
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{build_helical_path, build_meander_path, BodyModel, HelicalSpec, MeanderSpec, Region, WirePath};
use crate::io::{far_field_csv, field_csv, path_csv, Artifact, Report, RunOutput};
use crate::magnetics::{ac_resistance, biot_savart_at, field_map, field_reduction_stats, FieldMap};
use crate::vec3::point_segment_distance;
use crate::Vec3;

/// How the two coils' drive currents are chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalisation {
    #[default]
    EqualCurrent,
    /// Same ohmic loss: currents scaled by √(R_meander/R_helical).
    EqualPower,
}

/// On-axis sample range for the far-field decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarFieldSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for FarFieldSpec {
    fn default() -> Self {
        Self {
            r_min: 2.0,
            r_max: 20.0,
            points: 10,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn threshold() -> f64 {
    10.0
}

fn frequency() -> f64 {
    6.78e6
}

fn near_distance() -> f64 {
    0.01
}

fn top_fraction() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfinementConfig {
    #[serde(default)]
    pub calibrated_from_paper: bool,
    #[serde(default)]
    pub body: BodyModel,
    pub meander: MeanderSpec,
    pub helical: HelicalSpec,
    pub placement: Placement,
    #[serde(default = "one")]
    pub drive_current: f64,
    #[serde(default)]
    pub normalisation: Normalisation,
    /// Used for AC resistance under equal-power normalisation.
    #[serde(default = "frequency")]
    pub frequency: f64,
    #[serde(default = "threshold")]
    pub threshold_db: f64,
    #[serde(default = "default_max_segment")]
    pub max_segment: f64,
    #[serde(default)]
    pub far_field: FarFieldSpec,
    /// Shell points closer than this to the conductor count as near.
    #[serde(default = "near_distance")]
    pub near_distance: f64,
    /// Share of shell points, by descending |B|, checked for nearness.
    #[serde(default = "top_fraction")]
    pub top_fraction: f64,
}

impl ConfinementConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.meander.validate()?;
        self.helical.validate()?;
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        if !same(self.meander.footprint_width, self.helical.footprint_width)
            || !same(self.meander.footprint_height, self.helical.footprint_height)
        {
            return Err(Error::param("helical", "footprint must match the meander footprint"));
        }
        ensure_positive("drive_current", self.drive_current)?;
        ensure_positive("frequency", self.frequency)?;
        ensure_positive("max_segment", self.max_segment)?;
        ensure_positive("near_distance", self.near_distance)?;
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::param("top_fraction", "must lie in (0, 1]"));
        }
        log_spaced(self.far_field.r_min, self.far_field.r_max, self.far_field.points)?;
        Ok(())
    }
}

/// Share of the strongest shell points that lie within `near` of the coil.
fn shell_confinement(map: &FieldMap, coil: &WirePath, near: f64, top_fraction: f64) -> f64 {
    let mut shell: Vec<(f64, Vec3)> = map
        .grid
        .points()
        .iter()
        .zip(map.grid.regions())
        .zip(map.b.iter().zip(&map.masked))
        .filter(|((_, r), (_, m))| **r == Region::Shell && !**m)
        .map(|((p, _), (b, _))| (b.norm(), *p))
        .collect();
    if shell.is_empty() {
        return f64::NAN;
    }
    shell.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.x.total_cmp(&b.1.x)));
    let take = ((shell.len() as f64 * top_fraction).ceil() as usize).clamp(1, shell.len());
    let segs = coil.segment_list();
    let near_count = shell[..take]
        .iter()
        .filter(|(_, p)| segs.iter().any(|&(a, b)| point_segment_distance(*p, a, b) <= near))
        .count();
    near_count as f64 / take as f64
}

/// |B| per ampere along the coil normal through the footprint centre.
fn on_axis(flat: &WirePath, centre: Vec3, distances: &[f64]) -> Result<Vec<f64>> {
    distances
        .iter()
        .map(|&r| Ok(biot_savart_at(flat, 1.0, centre + Vec3::new(0.0, 0.0, r))?.norm()))
        .collect()
}

pub fn run_confinement(cfg: &ConfinementConfig, config_echo: serde_json::Value) -> Result<RunOutput> {
    cfg.validate()?;
    let footprint = (cfg.meander.footprint_width, cfg.meander.footprint_height);
    let flat_m = build_meander_path(&cfg.meander)?;
    let flat_h = build_helical_path(&cfg.helical)?;
    let wrap = |flat: &WirePath, standoff: f64| {
        wrap_centred(&cfg.body, flat, footprint, standoff, cfg.placement, cfg.max_segment)
    };
    let coil_m = wrap(&flat_m, cfg.meander.standoff)?;
    let coil_h = wrap(&flat_h, cfg.helical.standoff)?;

    let r_m = ac_resistance(&coil_m, cfg.frequency)?;
    let r_h = ac_resistance(&coil_h, cfg.frequency)?;
    let i_m = cfg.drive_current;
    let i_h = match cfg.normalisation {
        Normalisation::EqualCurrent => i_m,
        Normalisation::EqualPower => i_m * (r_m / r_h).sqrt(),
    };

    let grid = cfg.body.grid()?;
    let map_m = field_map(&coil_m, i_m, &grid)?;
    let map_h = field_map(&coil_h, i_h, &grid)?;
    let stats = field_reduction_stats(&map_m, &map_h, cfg.threshold_db)?;

    let ff = &cfg.far_field;
    let distances = log_spaced(ff.r_min, ff.r_max, ff.points)?;
    let centre = Vec3::new(0.5 * footprint.0, 0.5 * footprint.1, 0.0);
    let far_m = on_axis(&flat_m, centre, &distances)?;
    let far_h = on_axis(&flat_h, centre, &distances)?;
    let decay_m = -log_log_slope(&distances, &far_m);
    let decay_h = -log_log_slope(&distances, &far_h);

    let mut report = Report::new("confinement", config_echo, None);
    let m = &mut report.metrics;
    for region in Region::ALL {
        if let Some(s) = stats.region(region) {
            let name = region.as_str();
            m.insert(format!("frac_ge_10db_{name}"), s.frac_ge_threshold);
            m.insert(format!("median_reduction_db_{name}"), s.median_reduction_db);
            m.insert(format!("points_{name}"), s.points as f64);
        }
    }
    m.insert(
        "shell_confinement_frac".into(),
        shell_confinement(&map_m, &coil_m, cfg.near_distance, cfg.top_fraction),
    );
    m.insert(
        "shell_confinement_frac_helical".into(),
        shell_confinement(&map_h, &coil_h, cfg.near_distance, cfg.top_fraction),
    );
    m.insert("decay_exponent_meander".into(), decay_m);
    m.insert("decay_exponent_helical".into(), decay_h);
    m.insert("decay_exponent_excess".into(), decay_m - decay_h);
    m.insert("current_meander_a".into(), i_m);
    m.insert("current_helical_a".into(), i_h);
    m.insert("resistance_meander_ohm".into(), r_m);
    m.insert("resistance_helical_ohm".into(), r_h);

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv("path_meander.csv", &path_csv(&coil_m))?);
    out.add(Artifact::csv("path_helical.csv", &path_csv(&coil_h))?);
    out.add(Artifact::csv("field_meander.csv", &field_csv(&map_m))?);
    out.add(Artifact::csv("field_helical.csv", &field_csv(&map_h))?);
    out.add(Artifact::csv(
        "far_field.csv",
        &far_field_csv(&distances, &far_m, &far_h, ["b_meander_t_per_a", "b_helical_t_per_a"]),
    )?);
    out.add(Artifact::json("confinement_stats.json", &stats)?);
    Ok(out)
}
