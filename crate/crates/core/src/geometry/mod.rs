//! Conductor paths, coil builders and the cylindrical body model.

mod body;
mod coils;
mod material;
mod path;

pub use body::{BodyModel, EvalGrid, Region};
pub use coils::{
    build_helical_path, build_loop_path, build_meander_path, HelicalSpec, LoopShape, LoopSpec,
    MeanderSpec,
};
pub use material::ConductorMaterial;
pub use path::{resample_path, WirePath};

use crate::error::{ensure_positive, Error, Result};

/// Default quadrature discretisation of conductor paths (m).
pub const DEFAULT_MAX_SEGMENT: f64 = 2.0e-3;

/// Centre-to-centre spacing of nested turns inside a meander lobe (m).
pub const NESTED_TURN_SPACING: f64 = 2.0e-3;

/// Default distance between the coil plane and the body surface (m).
pub const DEFAULT_STANDOFF: f64 = 5.0e-3;

/// Ratio of a device footprint to the coil footprint it sits on.
pub fn coverage_fraction(device_footprint_area: f64, coil_footprint_area: f64) -> Result<f64> {
    ensure_positive("device_footprint_area", device_footprint_area)?;
    ensure_positive("coil_footprint_area", coil_footprint_area)?;
    if device_footprint_area > coil_footprint_area {
        return Err(Error::param(
            "device_footprint_area",
            format!("{device_footprint_area} m² exceeds coil footprint {coil_footprint_area} m²"),
        ));
    }
    Ok(device_footprint_area / coil_footprint_area)
}
