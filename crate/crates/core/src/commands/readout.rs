use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{sweep_csv, Artifact, CsvTable, Report, RunOutput};
use crate::scenarios::reading_ok;
use crate::telemetry::{decode, detect_peaks, min_output_power, sweep, tag_resonance, ReaderConfig, TagRegistry};

fn snr() -> f64 {
    20.0
}

fn tolerance() -> f64 {
    0.02
}

/// Reader sweep over tags described by their circuit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    pub reader: ReaderConfig,
    pub tags: TagRegistry,
    /// Value of each tag during the sweep.
    pub values: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "snr")]
    pub required_snr_db: f64,
    /// Pressure readings within this of the truth count as decoded.
    #[serde(default = "tolerance")]
    pub pressure_tolerance: f64,
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<()> {
        self.reader.validate()?;
        if self.values.len() != self.tags.tags().len() {
            return Err(Error::param("values", "need one value per tag"));
        }
        if self.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param("values", "must lie in [0, 1]"));
        }
        if !self.required_snr_db.is_finite() {
            return Err(Error::param("required_snr_db", "must be finite"));
        }
        Ok(())
    }
}

pub fn run_readout(cfg: &ReadoutConfig, config_echo: serde_json::Value, seed: Option<u64>) -> Result<RunOutput> {
    cfg.validate()?;
    let seed = seed.unwrap_or(cfg.seed);
    let tags = cfg.tags.tags();
    let result = sweep(&cfg.reader, tags, &cfg.values, seed)?;
    let detections = detect_peaks(&result, &cfg.reader.detection);
    let outcome = decode(&detections, &cfg.tags)?;

    let sw = cfg.reader.sweep;
    let bin = (sw.f_hi / sw.f_lo).ln() / (sw.points - 1) as f64;
    let mut successes = 0usize;
    let mut peak_error_bins: f64 = 0.0;
    for (t, v) in tags.iter().zip(&cfg.values) {
        successes += reading_ok(t, *v, &outcome, cfg.pressure_tolerance) as usize;
        let err = match outcome.reading(&t.id) {
            Some(r) => (r.peak_hz / tag_resonance(t, *v)?).ln().abs() / bin,
            None => f64::INFINITY,
        };
        peak_error_bins = peak_error_bins.max(err);
    }

    let mut power = CsvTable::new(vec!["tag_index", "k", "min_power_w", "reference_snr_db"]);
    let mut worst: f64 = 0.0;
    let sensing = cfg.reader.noise_floor_density > 0.0;
    if sensing {
        for (i, t) in tags.iter().enumerate() {
            let req = min_output_power(&cfg.reader, t, t.mutual_to(cfg.reader.coil.inductance), cfg.required_snr_db)?;
            let p = req.power.unwrap_or(f64::INFINITY);
            worst = worst.max(p);
            power.push_numbers(&[i as f64, t.coupling_to_reader, p, req.reference_snr_db]);
        }
    }

    let mut report = Report::new("readout", config_echo, Some(seed));
    let m = &mut report.metrics;
    m.insert("detections".into(), detections.len() as f64);
    m.insert("decoded".into(), outcome.readings.len() as f64);
    m.insert("decode_success_rate".into(), successes as f64 / tags.len().max(1) as f64);
    m.insert("peak_error_bins_max".into(), peak_error_bins);
    if sensing {
        m.insert("min_power_uW".into(), worst * 1e6);
    }

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv("sweep.csv", &sweep_csv(&result))?);
    out.add(Artifact::json("detections.json", &outcome)?);
    if sensing {
        out.add(Artifact::csv("min_power.csv", &power)?);
    }
    Ok(out)
}
