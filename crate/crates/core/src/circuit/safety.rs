use serde::{Deserialize, Serialize};

use super::{solve_two_port, LinkModel};
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::Region;
use crate::magnetics::FieldMap;

/// Input power used to reference the field level.
const REFERENCE_POWER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureLimit {
    /// `None` when the body sees no field at all.
    pub max_power: Option<f64>,
    /// Peak |H| in interior and shell per ampere of transmitter current.
    pub peak_h_per_amp: f64,
    /// RMS peak |H| at 1 W input.
    pub peak_h_at_reference: f64,
}

impl ExposureLimit {
    pub fn is_unconstrained(&self) -> bool {
        self.max_power.is_none()
    }
}

/// Largest input power that keeps RMS |H| inside the body below `h_limit`.
///
/// Field maps are phasor amplitudes, so the RMS field at current `I` is
/// `|I|/√2` times the per-ampere peak.
pub fn max_safe_power(
    field_per_amp: &FieldMap,
    h_limit: f64,
    link: &LinkModel,
    frequency: f64,
) -> Result<ExposureLimit> {
    ensure_positive("h_limit", h_limit)?;
    ensure_positive("source_current", field_per_amp.source_current.abs())?;
    let peak = field_per_amp
        .peak_h(&[Region::Interior, Region::Shell])
        .ok_or(Error::EmptyBodyRegion)?
        / field_per_amp.source_current.abs();
    let solution = solve_two_port(link, frequency)?;
    if !(solution.input_power > 0.0) {
        return Err(Error::DegenerateLink);
    }
    let i1 = solution.coil_currents[0].norm() * (REFERENCE_POWER / solution.input_power).sqrt();
    let h_ref = peak * i1 / std::f64::consts::SQRT_2;
    let max_power = (h_ref > 0.0).then(|| REFERENCE_POWER * (h_limit / h_ref).powi(2));
    Ok(ExposureLimit {
        max_power,
        peak_h_per_amp: peak,
        peak_h_at_reference: h_ref,
    })
}
