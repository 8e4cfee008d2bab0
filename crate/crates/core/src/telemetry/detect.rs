use serde::{Deserialize, Serialize};

use super::reader::{ResponseKind, SweepResult};
use super::tags::{TagKind, TagRegistry};
use crate::error::{Error, Result};

fn default_prominence() -> f64 {
    6.0
}

fn default_window() -> f64 {
    0.1
}

fn default_separation() -> f64 {
    0.02
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSettings {
    /// Minimum peak height over the local baseline.
    #[serde(default = "default_prominence")]
    pub prominence_db: f64,
    /// Half-width of the median baseline window, in natural-log frequency.
    #[serde(default = "default_window")]
    pub baseline_window: f64,
    /// A peak must be the largest sample within this log-frequency radius.
    #[serde(default = "default_separation")]
    pub min_separation: f64,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            prominence_db: default_prominence(),
            baseline_window: default_window(),
            min_separation: default_separation(),
        }
    }
}

impl DetectorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.prominence_db >= 0.0 && self.prominence_db.is_finite()) {
            return Err(Error::param("prominence_db", "must be non-negative"));
        }
        if !(self.baseline_window > 0.0 && self.baseline_window.is_finite()) {
            return Err(Error::param("baseline_window", "must be positive"));
        }
        if !(self.min_separation >= 0.0 && self.min_separation.is_finite()) {
            return Err(Error::param("min_separation", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub peak_frequency: f64,
    pub prominence_db: f64,
    pub matched_tag: Option<String>,
    pub decoded_value: Option<f64>,
}

/// Quantity whose peaks mark tag resonances.
fn detection_signal(result: &SweepResult) -> Vec<f64> {
    result
        .response
        .iter()
        .map(|z| match result.kind {
            ResponseKind::DifferentialVoltage => z.norm(),
            ResponseKind::Impedance => z.re,
        })
        .map(|s| s.max(f64::MIN_POSITIVE))
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Peaks standing `prominence_db` over the median of their neighbourhood,
/// refined by a parabola through the log-magnitude of three samples.
pub fn detect_peaks(result: &SweepResult, settings: &DetectorSettings) -> Vec<Detection> {
    let s = detection_signal(result);
    let n = s.len();
    if n < 3 || result.frequencies.len() != n {
        return Vec::new();
    }
    let f = &result.frequencies;
    let step = (f[n - 1] / f[0]).ln().abs() / (n - 1) as f64;
    let bins = |width: f64| if step > 0.0 { (width / step).ceil() as usize } else { 1 };
    let (window, separation) = (bins(settings.baseline_window).max(1), bins(settings.min_separation));
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if !(s[i] > s[i - 1] && s[i] >= s[i + 1]) {
            continue;
        }
        let lo = i.saturating_sub(separation);
        let hi = (i + separation).min(n - 1);
        // first of equal maxima wins
        if s[lo..i].iter().any(|&x| x >= s[i]) || s[i + 1..=hi].iter().any(|&x| x > s[i]) {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(n - 1);
        let baseline = median(s[lo..=hi].to_vec());
        let prominence_db = 20.0 * (s[i] / baseline).log10();
        if !(prominence_db >= settings.prominence_db) {
            continue;
        }
        let (yl, yc, yr) = (s[i - 1].ln(), s[i].ln(), s[i + 1].ln());
        let curv = yl - 2.0 * yc + yr;
        let delta = if curv < 0.0 {
            (0.5 * (yl - yr) / curv).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let neighbour = if delta >= 0.0 { f[i + 1] } else { f[i - 1] };
        let peak_frequency = (f[i].ln() + delta.abs() * (neighbour.ln() - f[i].ln())).exp();
        out.push(Detection {
            peak_frequency,
            prominence_db,
            matched_tag: None,
            decoded_value: None,
        });
    }
    out
}

/// Decoded value of one tag: the JSON record written per reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub tag_id: String,
    pub kind: TagKind,
    pub value: f64,
    pub peak_hz: f64,
    pub prominence_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub readings: Vec<Reading>,
    /// Detections matched to a tag, with their decoded values.
    pub matched: Vec<Detection>,
    /// Detections outside every band.
    pub unassigned: Vec<Detection>,
}

impl DecodeOutcome {
    pub fn reading(&self, tag_id: &str) -> Option<&Reading> {
        self.readings.iter().find(|r| r.tag_id == tag_id)
    }
}

/// Assigns each detection to the band containing it and inverts the
/// resonance law. Only the most prominent detection per band is decoded.
pub fn decode(detections: &[Detection], registry: &TagRegistry) -> Result<DecodeOutcome> {
    let mut best: Vec<Option<&Detection>> = vec![None; registry.tags().len()];
    let mut unassigned = Vec::new();
    for d in detections {
        match registry.tags().iter().position(|t| t.contains(d.peak_frequency)) {
            Some(k) => {
                if best[k].is_none_or(|b| d.prominence_db > b.prominence_db) {
                    best[k] = Some(d);
                }
            }
            None => unassigned.push(d.clone()),
        }
    }
    let mut readings = Vec::new();
    let mut matched = Vec::new();
    for (tag, det) in registry.tags().iter().zip(best) {
        let Some(det) = det else { continue };
        let value = tag.value_at(det.peak_frequency)?;
        readings.push(Reading {
            tag_id: tag.id.clone(),
            kind: tag.kind,
            value,
            peak_hz: det.peak_frequency,
            prominence_db: det.prominence_db,
        });
        matched.push(Detection {
            matched_tag: Some(tag.id.clone()),
            decoded_value: Some(value),
            ..det.clone()
        });
    }
    Ok(DecodeOutcome {
        readings,
        matched,
        unassigned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ResonantPort;
    use crate::telemetry::{sweep, tag_resonance, ReaderConfig, ReaderMode, SensorTag, SweepRange};
    use num_complex::Complex64;

    fn config(points: usize) -> ReaderConfig {
        ReaderConfig {
            coil: ResonantPort {
                inductance: 2e-6,
                capacitance: 1e-6,
                resistance: 3.0,
                termination: 50.0,
            },
            mode: ReaderMode::Bridge { imbalance: 0.0 },
            drive_power: 1e-4,
            noise_floor_density: 0.0,
            rbw_hz: 1e3,
            sweep: SweepRange {
                f_lo: 8e6,
                f_hi: 30e6,
                points,
            },
            detection: DetectorSettings::default(),
        }
    }

    fn registry() -> TagRegistry {
        TagRegistry::four_kinds(1e-6, 100.0, 0.02).unwrap()
    }

    fn bin(c: &ReaderConfig) -> f64 {
        (c.sweep.f_hi / c.sweep.f_lo).ln() / (c.sweep.points - 1) as f64
    }

    #[test]
    fn flat_response_has_no_peaks() {
        let r = SweepResult {
            kind: ResponseKind::DifferentialVoltage,
            frequencies: (1..=100).map(|i| i as f64 * 1e5).collect(),
            response: vec![Complex64::new(1.0, 0.0); 100],
            noise_seed: 0,
        };
        assert!(detect_peaks(&r, &DetectorSettings::default()).is_empty());
        let short = SweepResult {
            frequencies: vec![1.0, 2.0],
            response: vec![Complex64::new(1.0, 0.0); 2],
            ..r
        };
        assert!(detect_peaks(&short, &DetectorSettings::default()).is_empty());
    }

    #[test]
    fn single_tag_within_one_bin() {
        let c = config(1001);
        let t = SensorTag::centred("p", TagKind::Pressure, 20e6, 1e-6, 40.0, 0.02).unwrap();
        let r = sweep(&c, std::slice::from_ref(&t), &[0.35], 0).unwrap();
        let d = detect_peaks(&r, &c.detection);
        assert_eq!(d.len(), 1);
        let f0 = tag_resonance(&t, 0.35).unwrap();
        assert!((d[0].peak_frequency / f0).ln().abs() <= bin(&c));
    }

    #[test]
    fn parabola_refines_exact_gaussian() {
        // log-magnitude of a Gaussian in index space is exactly quadratic
        let n = 41;
        let centre = 20.3;
        let freqs: Vec<f64> = (0..n).map(|i| 1e6 * 1.01f64.powi(i)).collect();
        let response = (0..n)
            .map(|i| Complex64::new((-((i as f64 - centre) / 3.0).powi(2)).exp() + 1e-6, 0.0))
            .collect();
        let r = SweepResult {
            kind: ResponseKind::DifferentialVoltage,
            frequencies: freqs,
            response,
            noise_seed: 0,
        };
        let d = detect_peaks(&r, &DetectorSettings::default());
        assert_eq!(d.len(), 1);
        let expected = 1e6 * 1.01f64.powf(centre);
        assert!((d[0].peak_frequency / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn four_kinds_four_detections() {
        let c = config(2001);
        let reg = registry();
        let values = [0.0, 1.0, 3.0 / 7.0, 0.62];
        let r = sweep(&c, reg.tags(), &values, 0).unwrap();
        let d = detect_peaks(&r, &c.detection);
        assert_eq!(d.len(), 4);
        let out = decode(&d, &reg).unwrap();
        assert!(out.unassigned.is_empty());
        for (t, v) in reg.tags().iter().zip(values) {
            let reading = out.reading(&t.id).unwrap();
            let f0 = tag_resonance(t, v).unwrap();
            assert!((reading.peak_hz / f0).ln().abs() <= bin(&c));
            match t.kind {
                TagKind::Pressure => assert!((reading.value - v).abs() < 0.01),
                TagKind::Identifier => assert_eq!(reading.value, 0.0),
                _ => assert_eq!(reading.value, v),
            }
        }
    }

    #[test]
    fn pressure_round_trip_eleven_values() {
        let c = config(1001);
        let t = SensorTag::centred("p", TagKind::Pressure, 25e6, 1e-6, 40.0, 0.02).unwrap();
        let reg = TagRegistry::new(vec![t.clone()]).unwrap();
        // value change equivalent to one sweep bin at the band centre
        let step = 2.0 * bin(&c) / ((1.08f64 / 0.92).powi(2) - 1.0);
        for i in 0..=10 {
            let v = i as f64 / 10.0;
            let r = sweep(&c, std::slice::from_ref(&t), &[v], 0).unwrap();
            let out = decode(&detect_peaks(&r, &c.detection), &reg).unwrap();
            let got = out.reading("p").unwrap().value;
            assert!((got - v).abs() <= step, "v={v} got={got} step={step}");
        }
    }

    #[test]
    fn between_bands_is_unassigned() {
        let reg = registry();
        let d = Detection {
            peak_frequency: 12.5e6,
            prominence_db: 20.0,
            matched_tag: None,
            decoded_value: None,
        };
        let out = decode(&[d], &reg).unwrap();
        assert!(out.readings.is_empty());
        assert_eq!(out.unassigned.len(), 1);
    }

    #[test]
    fn base_resonance_decodes_to_anchor() {
        let reg = registry();
        for t in reg.tags() {
            let d = Detection {
                peak_frequency: tag_resonance(t, 0.0).unwrap(),
                prominence_db: 10.0,
                matched_tag: None,
                decoded_value: None,
            };
            let out = decode(&[d], &reg).unwrap();
            assert_eq!(out.readings[0].tag_id, t.id);
            assert!(out.readings[0].value.abs() < 1e-12);
        }
    }

    #[test]
    fn strongest_detection_per_band_wins() {
        let reg = registry();
        let t = &reg.tags()[3];
        let mk = |v: f64, p: f64| Detection {
            peak_frequency: tag_resonance(t, v).unwrap(),
            prominence_db: p,
            matched_tag: None,
            decoded_value: None,
        };
        let out = decode(&[mk(0.2, 8.0), mk(0.7, 30.0)], &reg).unwrap();
        assert_eq!(out.readings.len(), 1);
        assert!((out.readings[0].value - 0.7).abs() < 1e-9);
    }

    #[test]
    fn shift_equivariance() {
        let c = config(4001);
        let t = SensorTag::centred("p", TagKind::Pressure, 20e6, 1e-6, 40.0, 0.02).unwrap();
        let scale = 1.1;
        let mut scaled = t.clone();
        scaled.base_capacitance *= scale;
        let a = detect_peaks(&sweep(&c, std::slice::from_ref(&t), &[0.5], 0).unwrap(), &c.detection);
        let b = detect_peaks(&sweep(&c, &[scaled], &[0.5], 0).unwrap(), &c.detection);
        let ratio = b[0].peak_frequency / a[0].peak_frequency;
        assert!((ratio * scale.sqrt() - 1.0).abs() < bin(&c));
    }
}
