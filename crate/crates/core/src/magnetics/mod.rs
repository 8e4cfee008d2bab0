//! Quasi-static magnetics: fields, inductance and conductor loss.

mod biot_savart;
mod field;
mod inductance;
mod resistance;

pub use biot_savart::{biot_savart_at, segment_field};
pub use field::{field_map, field_reduction_stats, ConfinementStats, FieldMap, RegionStats};
pub use inductance::{
    min_separation, mutual_inductance, partial_self_inductance, self_inductance, InductanceResult,
};
pub use resistance::{ac_resistance, coupling_coefficient, dc_resistance, quality_factor, skin_depth};

/// Magnitudes below this (T) are treated as zero in dB statistics.
pub const FIELD_FLOOR: f64 = 1e-18;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
