use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::detect::DetectorSettings;
use super::tags::{reflected_impedance, SensorTag};
use crate::circuit::{log_spaced, ResonantPort};
use crate::error::{ensure_positive, Error, Result};
use crate::magnetics::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub f_lo: f64,
    pub f_hi: f64,
    pub points: usize,
}

impl SweepRange {
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        log_spaced(self.f_lo, self.f_hi, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ReaderMode {
    /// One coil; the response is its estimated input impedance.
    Single,
    /// Two coils as mutual references; the response is their tap difference.
    Bridge { imbalance: f64 },
}

fn default_rbw() -> f64 {
    1e3
}

/// Reader front end. Each coil sits in a divider with its `termination`
/// and is tapped across the coil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReaderConfig {
    pub coil: ResonantPort,
    pub mode: ReaderMode,
    /// Power available into the divider resistor; sets `V = √(2·P·R_term)`.
    pub drive_power: f64,
    /// Detector noise, V/√Hz per quadrature.
    pub noise_floor_density: f64,
    #[serde(default = "default_rbw")]
    pub rbw_hz: f64,
    pub sweep: SweepRange,
    pub detection: DetectorSettings,
}

impl ReaderConfig {
    pub fn validate(&self) -> Result<()> {
        self.coil.validate()?;
        ensure_positive("coil.termination", self.coil.termination)?;
        ensure_positive("drive_power", self.drive_power)?;
        ensure_positive("rbw_hz", self.rbw_hz)?;
        if !(self.noise_floor_density >= 0.0 && self.noise_floor_density.is_finite()) {
            return Err(Error::param("noise_floor_density", "must be non-negative"));
        }
        if let ReaderMode::Bridge { imbalance } = self.mode {
            if !(imbalance >= 0.0 && imbalance.is_finite()) {
                return Err(Error::param("imbalance", "must be non-negative"));
            }
        }
        self.sweep.frequencies()?;
        self.detection.validate()
    }

    pub fn drive_amplitude(&self) -> f64 {
        (2.0 * self.drive_power * self.coil.termination).sqrt()
    }

    /// Noise standard deviation per quadrature.
    pub fn noise_sigma(&self) -> f64 {
        self.noise_floor_density * self.rbw_hz.sqrt()
    }

    pub fn bridge(&self) -> Option<TwinBridge> {
        match self.mode {
            ReaderMode::Bridge { imbalance } => Some(TwinBridge {
                coil_a: self.coil,
                coil_b: self.coil,
                imbalance,
            }),
            ReaderMode::Single => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinBridge {
    pub coil_a: ResonantPort,
    pub coil_b: ResonantPort,
    /// Relative impedance mismatch applied to branch b.
    pub imbalance: f64,
}

fn coil_impedance(port: &ResonantPort, frequency: f64) -> Complex64 {
    port.impedance(frequency) - port.termination
}

fn tap(drive: f64, z: Complex64, termination: f64) -> Complex64 {
    drive * z / (z + termination)
}

fn total_reflection(reader_l: f64, tags: &[SensorTag], values: &[f64], f: f64) -> Result<Complex64> {
    if tags.len() != values.len() {
        return Err(Error::param("values", "must align with tags"));
    }
    tags.iter().zip(values).try_fold(Complex64::new(0.0, 0.0), |acc, (t, &v)| {
        Ok(acc + reflected_impedance(t, v, f, t.mutual_to(reader_l))?)
    })
}

/// Differential tap voltage; tags couple to branch a only.
pub fn bridge_response(
    bridge: &TwinBridge,
    tags: &[SensorTag],
    values: &[f64],
    frequency: f64,
    drive: f64,
) -> Result<Complex64> {
    ensure_positive("frequency", frequency)?;
    let refl = total_reflection(bridge.coil_a.inductance, tags, values, frequency)?;
    let za = coil_impedance(&bridge.coil_a, frequency) + refl;
    let zb = coil_impedance(&bridge.coil_b, frequency) * (1.0 + bridge.imbalance);
    Ok(tap(drive, za, bridge.coil_a.termination) - tap(drive, zb, bridge.coil_b.termination))
}

/// Input impedance of a single reader coil with tag reflections.
pub fn single_response(
    coil: &ResonantPort,
    tags: &[SensorTag],
    values: &[f64],
    frequency: f64,
) -> Result<Complex64> {
    ensure_positive("frequency", frequency)?;
    Ok(coil_impedance(coil, frequency) + total_reflection(coil.inductance, tags, values, frequency)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    /// Estimated input impedance, ohms.
    Impedance,
    /// Bridge difference voltage, volts.
    DifferentialVoltage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: ResponseKind,
    pub frequencies: Vec<f64>,
    pub response: Vec<Complex64>,
    pub noise_seed: u64,
}

/// Complex Gaussian sample for sweep index `index`; each index owns a
/// stream, so results do not depend on evaluation order.
fn noise_at(seed: u64, index: usize, sigma: f64) -> Complex64 {
    if sigma == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    Complex64::new(re, im) * sigma
}

/// Swept response with detector noise added at the tap voltage.
///
/// In single mode the noisy tap voltage is inverted back through the
/// divider, so the response is the impedance the reader would estimate.
pub fn sweep(config: &ReaderConfig, tags: &[SensorTag], values: &[f64], seed: u64) -> Result<SweepResult> {
    config.validate()?;
    let freqs = config.sweep.frequencies()?;
    let drive = config.drive_amplitude();
    let sigma = config.noise_sigma();
    let rt = config.coil.termination;
    let indices: Vec<usize> = (0..freqs.len()).collect();
    let response = par_map(&indices, |&i| -> Result<Complex64> {
        let f = freqs[i];
        let n = noise_at(seed, i, sigma);
        match config.bridge() {
            Some(b) => Ok(bridge_response(&b, tags, values, f, drive)? + n),
            None => {
                let z = single_response(&config.coil, tags, values, f)?;
                let v = tap(drive, z, rt) + n;
                Ok(rt * v / (drive - v))
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        kind: if config.bridge().is_some() {
            ResponseKind::DifferentialVoltage
        } else {
            ResponseKind::Impedance
        },
        frequencies: freqs,
        response,
        noise_seed: seed,
    })
}
