use serde::{Deserialize, Serialize};

use super::reader::{bridge_response, single_response, ReaderConfig};
use super::tags::{tag_resonance, SensorTag};
use crate::error::{ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRequirement {
    /// `None` when the tag cannot be seen at any power.
    pub power: Option<f64>,
    /// Worst-case peak SNR at the configured drive power.
    pub reference_snr_db: f64,
}

impl PowerRequirement {
    pub fn is_reachable(&self) -> bool {
        self.power.is_some()
    }
}

/// Values at which the worst-case SNR is sought.
const VALUE_SAMPLES: usize = 11;

/// Peak amplitude SNR (linear) of `tag` at `value` for the configured drive.
///
/// Both modes count the change the tag makes in the detected magnitude. In
/// the bridge that is |ΔV| itself; a single reader sees only the projection
/// of ΔV onto its own large tap voltage.
fn peak_snr(config: &ReaderConfig, tag: &SensorTag, mutual: f64, value: f64) -> Result<f64> {
    let mut tag = tag.clone();
    tag.coupling_to_reader = mutual / (tag.inductance * config.coil.inductance).sqrt();
    let f = tag_resonance(&tag, value)?;
    let drive = config.drive_amplitude();
    let sigma = config.noise_sigma();
    let tags = std::slice::from_ref(&tag);
    Ok(match config.bridge() {
        Some(b) => {
            let with = bridge_response(&b, tags, &[value], f, drive)?.norm();
            let without = bridge_response(&b, &[], &[], f, drive)?.norm();
            (with - without).abs() / sigma
        }
        None => {
            let rt = config.coil.termination;
            let tap = |z: num_complex::Complex64| (drive * z / (z + rt)).norm();
            let z0 = single_response(&config.coil, &[], &[], f)?;
            let z = single_response(&config.coil, tags, &[value], f)?;
            (tap(z) - tap(z0)).abs() / sigma
        }
    })
}

/// Smallest drive power giving `required_snr_db` peak SNR for every value of
/// the tag. SNR is an amplitude ratio, so it scales as √power.
pub fn min_output_power(
    config: &ReaderConfig,
    tag: &SensorTag,
    mutual: f64,
    required_snr_db: f64,
) -> Result<PowerRequirement> {
    config.validate()?;
    tag.validate()?;
    ensure_positive("noise_floor_density", config.noise_floor_density)?;
    let mut worst = f64::INFINITY;
    for i in 0..VALUE_SAMPLES {
        let v = i as f64 / (VALUE_SAMPLES - 1) as f64;
        worst = worst.min(peak_snr(config, tag, mutual, v)?);
    }
    let reference_snr_db = 20.0 * worst.log10();
    let required = 10f64.powf(required_snr_db / 20.0);
    let power = (worst > 0.0).then(|| config.drive_power * (required / worst).powi(2));
    Ok(PowerRequirement {
        power,
        reference_snr_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ResonantPort;
    use crate::telemetry::{DetectorSettings, ReaderMode, SweepRange, TagKind};

    fn config(mode: ReaderMode) -> ReaderConfig {
        ReaderConfig {
            coil: ResonantPort {
                inductance: 2e-6,
                capacitance: 1e-6,
                resistance: 3.0,
                termination: 50.0,
            },
            mode,
            drive_power: 1e-3,
            noise_floor_density: 1e-9,
            rbw_hz: 1e3,
            sweep: SweepRange {
                f_lo: 8e6,
                f_hi: 30e6,
                points: 1001,
            },
            detection: DetectorSettings::default(),
        }
    }

    fn tag() -> SensorTag {
        SensorTag::centred("p", TagKind::Pressure, 20e6, 1e-6, 40.0, 0.0).unwrap()
    }

    #[test]
    fn halving_snr_quarters_power() {
        let c = config(ReaderMode::Bridge { imbalance: 0.0 });
        let a = min_output_power(&c, &tag(), 30e-9, 20.0).unwrap().power.unwrap();
        let b = min_output_power(&c, &tag(), 30e-9, 20.0 - 20.0 * 2f64.log10()).unwrap().power.unwrap();
        assert!((a / b - 4.0).abs() < 1e-9);
    }

    #[test]
    fn independent_of_reference_power() {
        let mut c = config(ReaderMode::Bridge { imbalance: 0.0 });
        let a = min_output_power(&c, &tag(), 30e-9, 20.0).unwrap().power.unwrap();
        c.drive_power = 0.2;
        let b = min_output_power(&c, &tag(), 30e-9, 20.0).unwrap().power.unwrap();
        assert!((a / b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bridge_beats_single_reader() {
        let b = min_output_power(&config(ReaderMode::Bridge { imbalance: 0.0 }), &tag(), 30e-9, 20.0).unwrap();
        let s = min_output_power(&config(ReaderMode::Single), &tag(), 30e-9, 20.0).unwrap();
        assert!(b.power.unwrap() < s.power.unwrap());
    }

    #[test]
    fn zero_coupling_is_unreachable() {
        let c = config(ReaderMode::Bridge { imbalance: 0.0 });
        let r = min_output_power(&c, &tag(), 0.0, 20.0).unwrap();
        assert!(!r.is_reachable());
    }

    #[test]
    fn needs_a_noise_floor() {
        let mut c = config(ReaderMode::Single);
        c.noise_floor_density = 0.0;
        assert!(min_output_power(&c, &tag(), 30e-9, 20.0).is_err());
    }
}
