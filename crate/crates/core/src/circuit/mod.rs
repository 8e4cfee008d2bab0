//! Series-series resonant link, converter chain and exposure-limited power.

mod converter;
mod link;
mod resonance;
mod safety;

pub use converter::{dc_to_dc_efficiency, ConverterModel};
pub use link::{
    efficiency_sweep, log_spaced, max_link_efficiency, solve_two_port, LinkModel, LinkSolution,
    ResonantPort, ResponseCurve, ResponsePoint,
};
pub use resonance::{resonant_frequency, tuning_capacitance};
pub use safety::{max_safe_power, ExposureLimit};
