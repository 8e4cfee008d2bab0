use std::f64::consts::PI;

use crate::error::{ensure_positive, Result};

/// `f = 1 / (2π√(LC))`.
pub fn resonant_frequency(inductance: f64, capacitance: f64) -> Result<f64> {
    ensure_positive("inductance", inductance)?;
    ensure_positive("capacitance", capacitance)?;
    Ok(1.0 / (2.0 * PI * (inductance * capacitance).sqrt()))
}

/// Series capacitance that tunes `inductance` to `frequency`.
pub fn tuning_capacitance(inductance: f64, frequency: f64) -> Result<f64> {
    ensure_positive("inductance", inductance)?;
    ensure_positive("frequency", frequency)?;
    let w = 2.0 * PI * frequency;
    Ok(1.0 / (w * w * inductance))
}
