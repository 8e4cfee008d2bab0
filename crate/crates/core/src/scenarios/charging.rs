use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{default_max_segment, wrap_centred, Placement};
use crate::circuit::{
    dc_to_dc_efficiency, max_safe_power, solve_two_port, tuning_capacitance, ConverterModel, LinkModel,
    ResonantPort,
};
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{build_loop_path, build_meander_path, BodyModel, LoopSpec, MeanderSpec, WirePath};
use crate::io::{path_csv, Artifact, CsvTable, Report, RunOutput};
use crate::magnetics::{ac_resistance, field_map, mutual_inductance, self_inductance};

/// Optional replacement for geometric coupling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkOverride {
    /// When set, every placement uses this mutual inductance and the
    /// placement lattice collapses to a single point.
    #[serde(default)]
    pub mutual: Option<f64>,
}

fn frequency() -> f64 {
    6.78e6
}

fn spacing() -> f64 {
    0.05
}

fn gap() -> f64 {
    0.005
}

fn drive() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargingConfig {
    #[serde(default)]
    pub calibrated_from_paper: bool,
    #[serde(default)]
    pub body: BodyModel,
    pub transmitter: MeanderSpec,
    pub transmitter_placement: Placement,
    pub receiver: LoopSpec,
    /// Radial clearance between the transmitter plane and the receiver.
    #[serde(default = "gap")]
    pub receiver_gap: f64,
    #[serde(default = "frequency")]
    pub frequency: f64,
    /// Receiver lattice pitch over the cylinder, metres of arc and height.
    #[serde(default = "spacing")]
    pub placement_spacing: f64,
    #[serde(default = "drive")]
    pub drive_amplitude: f64,
    #[serde(default)]
    pub source_resistance: f64,
    /// Series loss outside the winding (capacitors, contacts), ohms.
    #[serde(default)]
    pub transmitter_extra_resistance: f64,
    #[serde(default)]
    pub receiver_extra_resistance: f64,
    #[serde(default)]
    pub converter: ConverterModel,
    /// DC efficiency a placement needs to count as covered.
    pub eta_dc_floor: f64,
    /// RMS |H| reference level in the body, A/m. No default on purpose.
    pub exposure_h_limit: f64,
    #[serde(default)]
    pub link: LinkOverride,
    #[serde(default = "default_max_segment")]
    pub max_segment: f64,
}

impl ChargingConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.transmitter.validate()?;
        self.receiver.validate()?;
        self.converter.validate()?;
        ensure_positive("frequency", self.frequency)?;
        ensure_positive("placement_spacing", self.placement_spacing)?;
        ensure_positive("drive_amplitude", self.drive_amplitude)?;
        ensure_positive("exposure_h_limit", self.exposure_h_limit)?;
        ensure_positive("max_segment", self.max_segment)?;
        for (name, v) in [
            ("receiver_gap", self.receiver_gap),
            ("source_resistance", self.source_resistance),
            ("transmitter_extra_resistance", self.transmitter_extra_resistance),
            ("receiver_extra_resistance", self.receiver_extra_resistance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be non-negative"));
            }
        }
        if !(0.0..=1.0).contains(&self.eta_dc_floor) {
            return Err(Error::param("eta_dc_floor", "must lie in [0, 1]"));
        }
        if let Some(m) = self.link.mutual {
            if !m.is_finite() {
                return Err(Error::param("link.mutual", "must be finite"));
            }
        }
        Ok(())
    }

    /// Receiver centres on a lattice over the cylinder surface.
    fn lattice(&self) -> Vec<Placement> {
        let radius = self.body.radius + self.transmitter.standoff + self.receiver_gap;
        let around = ((2.0 * PI * radius / self.placement_spacing).floor() as usize).max(1);
        let along = ((self.body.height / self.placement_spacing).floor() as usize).max(1);
        let mut out = Vec::with_capacity(around * along);
        for j in 0..along {
            let axial = (j as f64 + 0.5) * self.placement_spacing;
            for i in 0..around {
                let azimuth = 2.0 * PI * i as f64 / around as f64;
                out.push(Placement { azimuth, axial });
            }
        }
        out
    }
}

/// One lattice point's link figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct PlacementResult {
    azimuth: f64,
    axial: f64,
    mutual: f64,
    k: f64,
    eta_ac: f64,
    eta_dc: f64,
}

pub fn run_charging(cfg: &ChargingConfig, config_echo: serde_json::Value) -> Result<RunOutput> {
    cfg.validate()?;
    let f = cfg.frequency;
    let tx_spec = &cfg.transmitter;
    let footprint = (tx_spec.footprint_width, tx_spec.footprint_height);
    let tx = wrap_centred(
        &cfg.body,
        &build_meander_path(tx_spec)?,
        footprint,
        tx_spec.standoff,
        cfg.transmitter_placement,
        cfg.max_segment,
    )?;
    let rx_flat = crate::geometry::resample_path(&build_loop_path(&cfg.receiver)?, cfg.max_segment)?;

    let l_tx = self_inductance(&tx)?.value;
    let l_rx = self_inductance(&rx_flat)?.value;
    let r_tx = ac_resistance(&tx, f)? + cfg.transmitter_extra_resistance;
    let r_rx = ac_resistance(&rx_flat, f)? + cfg.receiver_extra_resistance;
    let port = |l: f64, r: f64, term: f64| -> Result<ResonantPort> {
        Ok(ResonantPort {
            inductance: l,
            capacitance: tuning_capacitance(l, f)?,
            resistance: r,
            termination: term,
        })
    };
    let base = LinkModel {
        transmitter: port(l_tx, r_tx, cfg.source_resistance)?,
        receiver: port(l_rx, r_rx, 0.0)?,
        mutual: 0.0,
        drive_amplitude: cfg.drive_amplitude,
    };
    let optimal = |mutual: f64| {
        let link = LinkModel { mutual, ..base };
        link.with_load(link.optimal_load(f))
    };

    let radial = cfg.body.radius + tx_spec.standoff + cfg.receiver_gap;
    let placements = match cfg.link.mutual {
        Some(_) => vec![cfg.transmitter_placement],
        None => cfg.lattice(),
    };
    let mut results = Vec::with_capacity(placements.len());
    let mut receivers: Vec<WirePath> = Vec::new();
    for p in &placements {
        let mutual = match cfg.link.mutual {
            Some(m) => m,
            None => {
                let rx = cfg.body.place_tangent(&rx_flat, radial, p.azimuth, p.axial)?;
                let m = mutual_inductance(&tx, &rx)?.value;
                if receivers.is_empty() {
                    receivers.push(rx);
                }
                m
            }
        };
        let link = optimal(mutual);
        let sol = solve_two_port(&link, f)?;
        let eta_dc = if sol.efficiency_ac > 0.0 {
            dc_to_dc_efficiency(sol.efficiency_ac, &cfg.converter)?
        } else {
            0.0
        };
        results.push(PlacementResult {
            azimuth: p.azimuth,
            axial: p.axial,
            mutual,
            k: link.coupling(),
            eta_ac: sol.efficiency_ac,
            eta_dc,
        });
    }

    let best = *results
        .iter()
        .max_by(|a, b| a.eta_ac.total_cmp(&b.eta_ac).then(b.azimuth.total_cmp(&a.azimuth)))
        .ok_or_else(|| Error::param("placement_spacing", "no receiver placements"))?;
    let coverage = |floor: f64| {
        results.iter().filter(|r| r.eta_dc >= floor).count() as f64 / results.len() as f64
    };

    let grid = cfg.body.grid()?;
    let per_amp = field_map(&tx, 1.0, &grid)?;
    let exposure = max_safe_power(&per_amp, cfg.exposure_h_limit, &optimal(best.mutual), f)?;

    let mut report = Report::new("charging", config_echo, None);
    let m = &mut report.metrics;
    m.insert("eta_ac_best".into(), best.eta_ac);
    m.insert("eta_dc_best".into(), best.eta_dc);
    m.insert("k_best".into(), best.k);
    m.insert("coverage_frac_eta_ge_threshold".into(), coverage(cfg.eta_dc_floor));
    m.insert("placements".into(), results.len() as f64);
    m.insert("inductance_tx_h".into(), l_tx);
    m.insert("inductance_rx_h".into(), l_rx);
    m.insert("resistance_tx_ohm".into(), r_tx);
    m.insert("resistance_rx_ohm".into(), r_rx);
    m.insert("q_tx".into(), base.transmitter.q(f));
    m.insert("q_rx".into(), base.receiver.q(f));
    m.insert("peak_h_per_amp".into(), exposure.peak_h_per_amp);
    if let Some(p) = exposure.max_power {
        m.insert("p_max_exposure".into(), p);
    }
    m.insert("p_max_unconstrained".into(), if exposure.is_unconstrained() { 1.0 } else { 0.0 });

    let mut table = CsvTable::new(vec!["azimuth_rad", "axial_m", "mutual_h", "k", "eta_ac", "eta_dc"]);
    for r in &results {
        table.push_numbers(&[r.azimuth, r.axial, r.mutual, r.k, r.eta_ac, r.eta_dc]);
    }
    let mut cov = CsvTable::new(vec!["eta_dc_floor", "coverage_frac"]);
    for i in 0..=40 {
        let floor = i as f64 * 0.01;
        cov.push_numbers(&[floor, coverage(floor)]);
    }

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv("path_transmitter.csv", &path_csv(&tx))?);
    if let Some(rx) = receivers.first() {
        out.add(Artifact::csv("path_receiver_first.csv", &path_csv(rx))?);
    }
    out.add(Artifact::csv("placements.csv", &table)?);
    out.add(Artifact::csv("coverage.csv", &cov)?);
    out.add(Artifact::json("exposure.json", &exposure)?);
    Ok(out)
}
