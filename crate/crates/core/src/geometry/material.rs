use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// Conductor used for a coil: bulk resistivity and round-wire radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductorMaterial {
    pub name: String,
    /// Ohm-metres.
    pub resistivity: f64,
    /// Metres.
    pub wire_radius: f64,
}

impl ConductorMaterial {
    pub fn new(name: impl Into<String>, resistivity: f64, wire_radius: f64) -> Result<Self> {
        let m = Self {
            name: name.into(),
            resistivity,
            wire_radius,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("resistivity", self.resistivity)?;
        ensure_positive("wire_radius", self.wire_radius)
    }

    /// Liquid-metal (eGaIn) filled thread, 1 mm diameter.
    pub fn liquid_metal_thread() -> Self {
        Self {
            name: "liquid-metal thread".into(),
            resistivity: 29.6e-8,
            wire_radius: 0.5e-3,
        }
    }

    /// Standard silver-plated conductive thread, 1 mm diameter.
    pub fn conductive_thread() -> Self {
        Self {
            name: "conductive thread".into(),
            resistivity: 246.6e-8,
            wire_radius: 0.5e-3,
        }
    }

    /// Annealed copper with the given round-wire radius.
    pub fn copper(wire_radius: f64) -> Self {
        Self {
            name: "copper".into(),
            resistivity: 1.68e-8,
            wire_radius,
        }
    }
}
