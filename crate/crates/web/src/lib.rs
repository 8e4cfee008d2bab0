//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string. The `*_json`
//! functions hold the logic so they can be tested natively.

use meanderlink::circuit::{efficiency_sweep, solve_two_port, tuning_capacitance, LinkModel, ResonantPort};
use meanderlink::geometry::{build_helical_path, build_meander_path, Region, WirePath};
use meanderlink::magnetics::biot_savart_at;
use meanderlink::scenarios::{wrap_centred, ScenarioConfig};
use meanderlink::telemetry::{
    decode, detect_peaks, sweep, DetectorSettings, ReaderConfig, ReaderMode, SweepRange, TagRegistry,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(err)
}

#[derive(Serialize)]
struct FieldSlice {
    /// Points per side of the square slice.
    n: usize,
    /// Half-width of the slice, metres.
    half_width: f64,
    body_radius: f64,
    /// 0 interior, 1 shell, 2 exterior, -1 outside the labelled volume.
    region: Vec<i8>,
    /// Reduction of |B| from helical to meander in dB; null inside a wire.
    reduction_db: Vec<Option<f64>>,
    frac_ge_10db_interior: f64,
}

/// Horizontal cut through the body at the coil's height comparing the
/// default meander against a helical coil of the same footprint at equal
/// current.
pub fn field_slice_json(lobe_count: usize, helical_turns: usize, n: usize) -> Result<String> {
    let ScenarioConfig::Confinement(mut cfg) = ScenarioConfig::builtin("confinement").map_err(err)? else {
        return Err("unexpected builtin".into());
    };
    cfg.meander.lobe_count = lobe_count;
    cfg.helical.turns = helical_turns;
    cfg.max_segment = 0.005;
    cfg.validate().map_err(err)?;
    if !(8..=201).contains(&n) {
        return Err("slice resolution must lie in 8..=201".into());
    }
    let body = &cfg.body;
    let footprint = (cfg.meander.footprint_width, cfg.meander.footprint_height);
    let wrap = |flat: &WirePath, standoff: f64| wrap_centred(body, flat, footprint, standoff, cfg.placement, cfg.max_segment);
    let meander = wrap(&build_meander_path(&cfg.meander).map_err(err)?, cfg.meander.standoff).map_err(err)?;
    let helical = wrap(&build_helical_path(&cfg.helical).map_err(err)?, cfg.helical.standoff).map_err(err)?;

    let half = body.radius + body.exterior_margin + 0.02;
    let axial = cfg.placement.axial;
    let mut region = Vec::with_capacity(n * n);
    let mut reduction = Vec::with_capacity(n * n);
    let (mut inside, mut confined) = (0usize, 0usize);
    for j in 0..n {
        for i in 0..n {
            let x = -half + 2.0 * half * i as f64 / (n - 1) as f64;
            let y = -half + 2.0 * half * j as f64 / (n - 1) as f64;
            let p = body.cylindrical_point(x.hypot(y), y.atan2(x), axial);
            let r = body.region_of(p);
            region.push(match r {
                Some(Region::Interior) => 0,
                Some(Region::Shell) => 1,
                Some(Region::Exterior) => 2,
                None => -1,
            });
            let db = match (biot_savart_at(&meander, 1.0, p), biot_savart_at(&helical, 1.0, p)) {
                (Ok(bm), Ok(bh)) if bm.norm() > 0.0 => Some(20.0 * (bh.norm() / bm.norm()).log10()),
                _ => None,
            };
            if r == Some(Region::Interior) {
                if let Some(d) = db {
                    inside += 1;
                    confined += (d >= 10.0) as usize;
                }
            }
            reduction.push(db);
        }
    }
    to_json(&FieldSlice {
        n,
        half_width: half,
        body_radius: body.radius,
        region,
        reduction_db: reduction,
        frac_ge_10db_interior: confined as f64 / inside.max(1) as f64,
    })
}

#[derive(Serialize)]
struct LinkCurve {
    frequency_hz: Vec<f64>,
    efficiency: Vec<f64>,
    optimal_load_ohm: f64,
    eta_at_resonance: f64,
    eta_bound: f64,
}

/// Efficiency of two coils tuned to 6.78 MHz versus frequency,
/// with the receiver at its optimal load.
pub fn link_sweep_json(k: f64, q_tx: f64, q_rx: f64, points: usize) -> Result<String> {
    let f0 = 6.78e6;
    if !(q_tx > 0.0 && q_rx > 0.0) {
        return Err("Q must be positive".into());
    }
    let port = |l: f64, q: f64| -> Result<ResonantPort> {
        Ok(ResonantPort {
            inductance: l,
            capacitance: tuning_capacitance(l, f0).map_err(err)?,
            resistance: 2.0 * std::f64::consts::PI * f0 * l / q,
            termination: 0.0,
        })
    };
    let (l1, l2) = (5e-6, 5e-7);
    let base = LinkModel {
        transmitter: port(l1, q_tx)?,
        receiver: port(l2, q_rx)?,
        mutual: k * (l1 * l2).sqrt(),
        drive_amplitude: 1.0,
    };
    base.validate().map_err(err)?;
    let link = base.with_load(base.optimal_load(f0));
    let curve = efficiency_sweep(&link, 0.8 * f0, 1.25 * f0, points).map_err(err)?;
    let x = link.figure_of_merit(f0);
    to_json(&LinkCurve {
        frequency_hz: curve.points.iter().map(|p| p.frequency).collect(),
        efficiency: curve.points.iter().map(|p| p.efficiency).collect(),
        optimal_load_ohm: link.receiver.termination,
        eta_at_resonance: solve_two_port(&link, f0).map_err(err)?.efficiency_ac,
        eta_bound: x / (1.0 + (1.0 + x).sqrt()).powi(2),
    })
}

#[derive(Serialize)]
struct Readout {
    frequency_hz: Vec<f64>,
    magnitude: Vec<f64>,
    readings: Vec<meanderlink::telemetry::Reading>,
    truth: Vec<f64>,
}

/// Bridge sweep over the four demo tags at the given values.
pub fn pit_readout_json(touch: f64, rotation: f64, pressure: f64, noise_density: f64, seed: u64) -> Result<String> {
    let l_reader = 4e-6;
    let reader = ReaderConfig {
        coil: ResonantPort {
            inductance: l_reader,
            capacitance: 1e-6,
            resistance: 5.0,
            termination: 1000.0,
        },
        mode: ReaderMode::Bridge { imbalance: 0.0 },
        drive_power: 1e-4,
        noise_floor_density: noise_density,
        rbw_hz: 1e3,
        sweep: SweepRange {
            f_lo: 8e6,
            f_hi: 30e6,
            points: 1001,
        },
        detection: DetectorSettings::default(),
    };
    reader.validate().map_err(err)?;
    let registry = TagRegistry::four_kinds(1.5e-7, 100.0, 0.02).map_err(err)?;
    let values = vec![0.0, touch, rotation, pressure];
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err("values must lie in [0, 1]".into());
    }
    let result = sweep(&reader, registry.tags(), &values, seed).map_err(err)?;
    let outcome = decode(&detect_peaks(&result, &reader.detection), &registry).map_err(err)?;
    to_json(&Readout {
        frequency_hz: result.frequencies.clone(),
        magnitude: result.response.iter().map(|z| z.norm()).collect(),
        readings: outcome.readings,
        truth: values,
    })
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fieldSlice)]
pub fn field_slice(lobe_count: usize, helical_turns: usize, n: usize) -> std::result::Result<String, JsError> {
    js(field_slice_json(lobe_count, helical_turns, n))
}

#[wasm_bindgen(js_name = linkSweep)]
pub fn link_sweep(k: f64, q_tx: f64, q_rx: f64, points: usize) -> std::result::Result<String, JsError> {
    js(link_sweep_json(k, q_tx, q_rx, points))
}

#[wasm_bindgen(js_name = pitReadout)]
pub fn pit_readout(
    touch: f64,
    rotation: f64,
    pressure: f64,
    noise_density: f64,
    seed: u64,
) -> std::result::Result<String, JsError> {
    js(pit_readout_json(touch, rotation, pressure, noise_density, seed))
}
