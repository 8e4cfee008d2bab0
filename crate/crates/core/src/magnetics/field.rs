use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{par_map, segment_field, FIELD_FLOOR};
use crate::error::{Error, Result};
use crate::geometry::{EvalGrid, Region, WirePath};
use crate::{Vec3, MU0};

/// Flux density sampled on an [`EvalGrid`].
///
/// Points that fall inside the conductor are masked and carry a zero vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub grid: EvalGrid,
    pub b: Vec<Vec3>,
    pub masked: Vec<bool>,
    pub source_current: f64,
}

impl FieldMap {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.b.iter().map(|v| v.norm()).collect()
    }

    /// Same map at a different drive current.
    pub fn scaled(&self, factor: f64) -> FieldMap {
        FieldMap {
            grid: self.grid.clone(),
            b: self.b.iter().map(|&v| v * factor).collect(),
            masked: self.masked.clone(),
            source_current: self.source_current * factor,
        }
    }

    /// Peak `|H| = |B|/μ0` over unmasked points in the given regions.
    pub fn peak_h(&self, regions: &[Region]) -> Option<f64> {
        self.grid
            .regions()
            .iter()
            .zip(&self.b)
            .zip(&self.masked)
            .filter(|((r, _), &m)| !m && regions.contains(r))
            .map(|((_, b), _)| b.norm() / MU0)
            .fold(None, |acc: Option<f64>, h| Some(acc.map_or(h, |a| a.max(h))))
    }
}

/// Evaluates the field of `path` at every grid point.
///
/// Summation over segments is sequential per point, so results do not
/// depend on thread count.
pub fn field_map(path: &WirePath, current: f64, grid: &EvalGrid) -> Result<FieldMap> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let segments = path.segment_list();
    let radius = path.wire_radius();
    let scale = MU0 * current / (4.0 * std::f64::consts::PI);
    let values = par_map(grid.points(), |&p| {
        let mut acc = Vec3::ZERO;
        for &(a, b) in &segments {
            let (f, dist) = segment_field(a, b, p);
            if dist < radius {
                return (Vec3::ZERO, true);
            }
            acc += f;
        }
        (acc * scale, false)
    });
    let (b, masked) = values.into_iter().unzip();
    Ok(FieldMap {
        grid: grid.clone(),
        b,
        masked,
        source_current: current,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub points: usize,
    pub frac_ge_threshold: f64,
    pub median_reduction_db: f64,
}

/// Per-region summary of how much weaker a test field is than a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfinementStats {
    pub threshold_db: f64,
    pub regions: BTreeMap<String, RegionStats>,
}

impl ConfinementStats {
    pub fn region(&self, region: Region) -> Option<&RegionStats> {
        self.regions.get(region.as_str())
    }
}

/// Per-point reduction `20·log10(|B_ref| / |B_test|)` after normalising both
/// maps to unit drive current. `None` marks excluded points: masked in
/// either map, or both magnitudes below [`FIELD_FLOOR`].
pub fn reduction_db(test: &FieldMap, reference: &FieldMap) -> Result<Vec<Option<f64>>> {
    if test.grid != reference.grid {
        return Err(Error::GridMismatch);
    }
    let nt = if test.source_current != 0.0 { test.source_current.abs() } else { 1.0 };
    let nr = if reference.source_current != 0.0 { reference.source_current.abs() } else { 1.0 };
    Ok(test
        .b
        .iter()
        .zip(&reference.b)
        .zip(test.masked.iter().zip(&reference.masked))
        .map(|((bt, br), (&mt, &mr))| {
            if mt || mr {
                return None;
            }
            let t = bt.norm() / nt;
            let r = br.norm() / nr;
            if t < FIELD_FLOOR && r < FIELD_FLOOR {
                return None;
            }
            Some(20.0 * (r.max(FIELD_FLOOR) / t.max(FIELD_FLOOR)).log10())
        })
        .collect())
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn field_reduction_stats(
    test: &FieldMap,
    reference: &FieldMap,
    threshold_db: f64,
) -> Result<ConfinementStats> {
    let reductions = reduction_db(test, reference)?;
    let mut per_region: BTreeMap<Region, Vec<f64>> = BTreeMap::new();
    for (red, region) in reductions.iter().zip(test.grid.regions()) {
        if let Some(db) = red {
            per_region.entry(*region).or_default().push(*db);
        }
    }
    let regions = per_region
        .into_iter()
        .map(|(region, mut values)| {
            // tolerance keeps exact-threshold scalings on the passing side
            let hits = values.iter().filter(|&&db| db >= threshold_db - 1e-9).count();
            let stats = RegionStats {
                points: values.len(),
                frac_ge_threshold: hits as f64 / values.len() as f64,
                median_reduction_db: median(&mut values),
            };
            (region.as_str().to_string(), stats)
        })
        .collect();
    Ok(ConfinementStats {
        threshold_db,
        regions,
    })
}
