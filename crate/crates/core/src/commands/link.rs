use serde::{Deserialize, Serialize};

use super::FrequencySweep;
use crate::circuit::{
    dc_to_dc_efficiency, efficiency_sweep, max_link_efficiency, resonant_frequency, solve_two_port, ConverterModel,
    LinkModel,
};
use crate::error::{ensure_positive, Result};
use crate::io::{curve_csv, Artifact, Report, RunOutput};

/// Circuit-level link with direct L, C, R and M values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub link: LinkModel,
    pub sweep: FrequencySweep,
    /// Defaults to the transmitter's resonance.
    #[serde(default)]
    pub operating_frequency: Option<f64>,
    /// Replace the receiver termination by the optimal load.
    #[serde(default)]
    pub optimal_load: bool,
    #[serde(default)]
    pub converter: ConverterModel,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.converter.validate()?;
        crate::circuit::log_spaced(self.sweep.f_lo, self.sweep.f_hi, self.sweep.points)?;
        if let Some(f) = self.operating_frequency {
            ensure_positive("operating_frequency", f)?;
        }
        Ok(())
    }

    pub fn operating_frequency(&self) -> Result<f64> {
        match self.operating_frequency {
            Some(f) => Ok(f),
            None => resonant_frequency(self.link.transmitter.inductance, self.link.transmitter.capacitance),
        }
    }
}

pub fn run_link(cfg: &LinkConfig, config_echo: serde_json::Value) -> Result<RunOutput> {
    cfg.validate()?;
    let f = cfg.operating_frequency()?;
    let link = if cfg.optimal_load {
        cfg.link.with_load(cfg.link.optimal_load(f))
    } else {
        cfg.link
    };
    let sol = solve_two_port(&link, f)?;
    let curve = efficiency_sweep(&link, cfg.sweep.f_lo, cfg.sweep.f_hi, cfg.sweep.points)?;
    let (q1, q2) = (link.transmitter.q(f), link.receiver.q(f));

    let mut report = Report::new("link", config_echo, None);
    let m = &mut report.metrics;
    m.insert("operating_frequency_hz".into(), f);
    m.insert("coupling_k".into(), link.coupling());
    m.insert("q_tx".into(), q1);
    m.insert("q_rx".into(), q2);
    m.insert("figure_of_merit".into(), link.figure_of_merit(f));
    m.insert("eta_bound".into(), max_link_efficiency(link.coupling(), q1, q2)?);
    m.insert("eta_ac".into(), sol.efficiency_ac);
    m.insert("eta_dc".into(), dc_to_dc_efficiency(sol.efficiency_ac, &cfg.converter).unwrap_or(0.0));
    m.insert("load_ohm".into(), link.receiver.termination);
    m.insert("input_power_w".into(), sol.input_power);
    m.insert("delivered_power_w".into(), sol.delivered_power);
    let balance = sol.input_power - sol.delivered_power - sol.coil_losses[0] - sol.coil_losses[1];
    m.insert("energy_balance_residual".into(), balance.abs() / sol.input_power.abs().max(f64::MIN_POSITIVE));
    if let Some(best) = curve.best() {
        m.insert("best_sweep_frequency_hz".into(), best.frequency);
        m.insert("best_sweep_efficiency".into(), best.efficiency);
    }

    let mut out = RunOutput::new(report);
    out.add(Artifact::csv("efficiency_curve.csv", &curve_csv(&curve))?);
    out.add(Artifact::json("operating_point.json", &sol)?);
    Ok(out)
}
