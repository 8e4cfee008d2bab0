//! Passive inductive telemetry: resonant tags read through swept reflected
//! impedance, either directly or through a twin-coil bridge.

mod detect;
mod power;
mod reader;
mod tags;

pub use detect::{decode, detect_peaks, DecodeOutcome, Detection, DetectorSettings, Reading};
pub use power::{min_output_power, PowerRequirement};
pub use reader::{
    bridge_response, single_response, sweep, ReaderConfig, ReaderMode, ResponseKind, SweepRange,
    SweepResult, TwinBridge,
};
pub use tags::{reflected_impedance, tag_resonance, SensorTag, TagKind, TagRegistry};
