use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{default_max_segment, wrap_centred, Placement};
use crate::circuit::ResonantPort;
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{build_loop_path, build_meander_path, resample_path, BodyModel, LoopSpec, MeanderSpec};
use crate::io::{path_csv, sweep_csv, Artifact, CsvTable, Report, RunOutput};
use crate::magnetics::{ac_resistance, mutual_inductance, self_inductance};
use crate::telemetry::{
    decode, detect_peaks, min_output_power, sweep, tag_resonance, DecodeOutcome, DetectorSettings, ReaderConfig,
    ReaderMode, SensorTag, SweepRange, TagKind, TagRegistry,
};

/// A sensor coil and where it sits over the reader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagGeometry {
    pub id: String,
    pub kind: TagKind,
    pub centre_hz: f64,
    pub coil: LoopSpec,
    pub placement: Placement,
    /// Radial clearance between the reader plane and the tag.
    pub gap: f64,
    /// Series loss of the tuning capacitor and contacts, ohms.
    #[serde(default)]
    pub capacitor_esr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub trials: usize,
    /// Worst-case peak SNR of the pressure tag.
    pub snr_db: f64,
}

fn termination() -> f64 {
    50.0
}

fn tolerance() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PitConfig {
    #[serde(default)]
    pub calibrated_from_paper: bool,
    #[serde(default)]
    pub body: BodyModel,
    pub reader: MeanderSpec,
    pub reader_placement: Placement,
    pub reader_capacitance: f64,
    #[serde(default = "termination")]
    pub reader_termination: f64,
    #[serde(default)]
    pub imbalance: f64,
    /// Drive used for the noiseless reference sweep.
    pub drive_power: f64,
    pub noise_floor_density: f64,
    pub rbw_hz: f64,
    pub sweep: SweepRange,
    #[serde(default)]
    pub detection: DetectorSettings,
    pub tags: Vec<TagGeometry>,
    /// Value of each tag in the noiseless run.
    pub values: Vec<f64>,
    pub required_snr_db: f64,
    pub monte_carlo: MonteCarloSpec,
    /// NFC activation power range `[min, max]`, watts.
    pub nfc_activation_power: [f64; 2],
    /// Pressure readings within this of the truth count as decoded.
    #[serde(default = "tolerance")]
    pub pressure_tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_segment")]
    pub max_segment: f64,
}

impl PitConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.reader.validate()?;
        ensure_positive("reader_capacitance", self.reader_capacitance)?;
        ensure_positive("reader_termination", self.reader_termination)?;
        ensure_positive("drive_power", self.drive_power)?;
        ensure_positive("noise_floor_density", self.noise_floor_density)?;
        ensure_positive("rbw_hz", self.rbw_hz)?;
        ensure_positive("max_segment", self.max_segment)?;
        self.sweep.frequencies()?;
        self.detection.validate()?;
        if self.tags.is_empty() {
            return Err(Error::param("tags", "need at least one tag"));
        }
        if self.values.len() != self.tags.len() {
            return Err(Error::param("values", "need one value per tag"));
        }
        if self.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param("values", "must lie in [0, 1]"));
        }
        for t in &self.tags {
            t.coil.validate()?;
            ensure_positive("centre_hz", t.centre_hz)?;
            if !(t.gap >= 0.0 && t.capacitor_esr >= 0.0) {
                return Err(Error::param("tags", format!("tag `{}` has a negative gap or ESR", t.id)));
            }
        }
        if !(self.imbalance >= 0.0) {
            return Err(Error::param("imbalance", "must be non-negative"));
        }
        let [lo, hi] = self.nfc_activation_power;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::param("nfc_activation_power", "need 0 < min ≤ max"));
        }
        if self.monte_carlo.trials == 0 {
            return Err(Error::param("monte_carlo.trials", "must be at least 1"));
        }
        Ok(())
    }

    fn reader_config(&self, coil: ResonantPort, drive_power: f64, noise: f64) -> ReaderConfig {
        ReaderConfig {
            coil,
            mode: ReaderMode::Bridge {
                imbalance: self.imbalance,
            },
            drive_power,
            noise_floor_density: noise,
            rbw_hz: self.rbw_hz,
            sweep: self.sweep,
            detection: self.detection,
        }
    }
}

/// Whether a decoded reading matches the truth for its kind.
pub(crate) fn reading_ok(tag: &SensorTag, truth: f64, outcome: &DecodeOutcome, tolerance: f64) -> bool {
    let Some(r) = outcome.reading(&tag.id) else { return false };
    match tag.kind {
        TagKind::Identifier => true,
        TagKind::Pressure => (r.value - truth).abs() <= tolerance,
        kind => r.value == kind.quantise(truth),
    }
}

pub fn run_pit(cfg: &PitConfig, config_echo: serde_json::Value, seed: Option<u64>) -> Result<RunOutput> {
    cfg.validate()?;
    let seed = seed.unwrap_or(cfg.seed);
    let f_mid = (cfg.sweep.f_lo * cfg.sweep.f_hi).sqrt();

    let footprint = (cfg.reader.footprint_width, cfg.reader.footprint_height);
    let reader = wrap_centred(
        &cfg.body,
        &build_meander_path(&cfg.reader)?,
        footprint,
        cfg.reader.standoff,
        cfg.reader_placement,
        cfg.max_segment,
    )?;
    let l_reader = self_inductance(&reader)?.value;
    let coil = ResonantPort {
        inductance: l_reader,
        capacitance: cfg.reader_capacitance,
        resistance: ac_resistance(&reader, f_mid)?,
        termination: cfg.reader_termination,
    };

    let mut tags = Vec::with_capacity(cfg.tags.len());
    let mut mutuals = Vec::with_capacity(cfg.tags.len());
    for g in &cfg.tags {
        let flat = resample_path(&build_loop_path(&g.coil)?, cfg.max_segment)?;
        let radial = cfg.body.radius + cfg.reader.standoff + g.gap;
        let placed = cfg.body.place_tangent(&flat, radial, g.placement.azimuth, g.placement.axial)?;
        let l_tag = self_inductance(&flat)?.value;
        let esr = ac_resistance(&flat, g.centre_hz)? + g.capacitor_esr;
        let q = 2.0 * PI * g.centre_hz * l_tag / esr;
        let mutual = mutual_inductance(&reader, &placed)?.value.abs();
        let k = mutual / (l_tag * l_reader).sqrt();
        tags.push(SensorTag::centred(g.id.clone(), g.kind, g.centre_hz, l_tag, q, k)?);
        mutuals.push(mutual);
    }
    let registry = TagRegistry::new(tags)?;
    let tags = registry.tags();

    // noiseless reference run
    let clean_cfg = cfg.reader_config(coil, cfg.drive_power, 0.0);
    let clean = sweep(&clean_cfg, tags, &cfg.values, seed)?;
    let detections = detect_peaks(&clean, &cfg.detection);
    let outcome = decode(&detections, &registry)?;
    let successes = tags
        .iter()
        .zip(&cfg.values)
        .filter(|(t, v)| reading_ok(t, **v, &outcome, cfg.pressure_tolerance))
        .count();
    let bin = (cfg.sweep.f_hi / cfg.sweep.f_lo).ln() / (cfg.sweep.points - 1) as f64;
    let mut peak_error_bins: f64 = 0.0;
    for (t, v) in tags.iter().zip(&cfg.values) {
        let err = match outcome.reading(&t.id) {
            Some(r) => (r.peak_hz / tag_resonance(t, *v)?).ln().abs() / bin,
            None => f64::INFINITY,
        };
        peak_error_bins = peak_error_bins.max(err);
    }

    // sensitivity
    let noisy_cfg = cfg.reader_config(coil, cfg.drive_power, cfg.noise_floor_density);
    let mut power_table = CsvTable::new(vec!["tag_index", "mutual_h", "k", "min_power_w", "reference_snr_db"]);
    let mut min_power: f64 = 0.0;
    for (i, (t, m)) in tags.iter().zip(&mutuals).enumerate() {
        let req = min_output_power(&noisy_cfg, t, *m, cfg.required_snr_db)?;
        let p = req.power.unwrap_or(f64::INFINITY);
        min_power = min_power.max(p);
        power_table.push_numbers(&[i as f64, *m, t.coupling_to_reader, p, req.reference_snr_db]);
    }

    // Monte-Carlo at the configured worst-case pressure SNR
    let mc = cfg.monte_carlo;
    let pressure = tags.iter().position(|t| t.kind == TagKind::Pressure);
    let mut mc_table = CsvTable::new(vec!["trial", "true_value", "decoded_value", "error", "all_decoded"]);
    let (mut sq, mut ok_trials) = (0.0, 0usize);
    if let Some(pi) = pressure {
        let drive = min_output_power(&noisy_cfg, &tags[pi], mutuals[pi], mc.snr_db)?
            .power
            .ok_or_else(|| Error::param("tags", "pressure tag is not coupled to the reader"))?;
        let mc_cfg = cfg.reader_config(coil, drive, cfg.noise_floor_density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..mc.trials {
            let mut values = cfg.values.clone();
            values[pi] = rng.random::<f64>();
            let noise_seed = seed.wrapping_add(1 + trial as u64);
            let res = sweep(&mc_cfg, tags, &values, noise_seed)?;
            let out = decode(&detect_peaks(&res, &cfg.detection), &registry)?;
            let decoded = out.reading(&tags[pi].id).map(|r| r.value);
            let err = decoded.map_or(1.0, |d| d - values[pi]);
            sq += err * err;
            let all = tags
                .iter()
                .zip(&values)
                .all(|(t, v)| t.kind == TagKind::Pressure || reading_ok(t, *v, &out, cfg.pressure_tolerance))
                && decoded.is_some();
            ok_trials += all as usize;
            mc_table.push_numbers(&[
                trial as f64,
                values[pi],
                decoded.unwrap_or(f64::NAN),
                err,
                all as u8 as f64,
            ]);
        }
    }

    let mut report = Report::new("pit", config_echo, Some(seed));
    let m = &mut report.metrics;
    m.insert("decode_success_rate".into(), successes as f64 / tags.len() as f64);
    m.insert("peak_error_bins_max".into(), peak_error_bins);
    m.insert("detections".into(), detections.len() as f64);
    m.insert("min_power_uW".into(), min_power * 1e6);
    m.insert("nfc_power_ratio".into(), cfg.nfc_activation_power[0] / min_power);
    m.insert("inductance_reader_h".into(), l_reader);
    m.insert("resistance_reader_ohm".into(), coil.resistance);
    if pressure.is_some() {
        m.insert("value_rmse".into(), (sq / mc.trials as f64).sqrt());
        m.insert("mc_decode_success_rate".into(), ok_trials as f64 / mc.trials as f64);
        m.insert("mc_trials".into(), mc.trials as f64);
    }

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv("path_reader.csv", &path_csv(&reader))?);
    out.add(Artifact::json("tags.json", &registry)?);
    out.add(Artifact::csv("sweep_noiseless.csv", &sweep_csv(&clean))?);
    out.add(Artifact::json("readings.json", &outcome.readings)?);
    out.add(Artifact::json("detections.json", &outcome)?);
    out.add(Artifact::csv("min_power.csv", &power_table)?);
    if pressure.is_some() {
        out.add(Artifact::csv("monte_carlo.csv", &mc_table)?);
    }
    Ok(out)
}
