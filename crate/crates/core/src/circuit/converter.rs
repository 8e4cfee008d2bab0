use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverter and rectifier as multiplicative efficiency stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterModel {
    pub inverter_efficiency: f64,
    pub rectifier_efficiency: f64,
}

impl Default for ConverterModel {
    /// Two equal stages whose product is 0.25/0.41 ≈ 0.6098.
    fn default() -> Self {
        let stage = (0.25f64 / 0.41).sqrt();
        Self {
            inverter_efficiency: stage,
            rectifier_efficiency: stage,
        }
    }
}

impl ConverterModel {
    pub const IDEAL: ConverterModel = ConverterModel {
        inverter_efficiency: 1.0,
        rectifier_efficiency: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        check_fraction("inverter_efficiency", self.inverter_efficiency)?;
        check_fraction("rectifier_efficiency", self.rectifier_efficiency)
    }

    pub fn combined(&self) -> f64 {
        self.inverter_efficiency * self.rectifier_efficiency
    }
}

fn check_fraction(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1], got {v}")))
    }
}

/// DC-to-DC efficiency of the full chain around an AC-to-AC link.
pub fn dc_to_dc_efficiency(eta_ac: f64, converter: &ConverterModel) -> Result<f64> {
    check_fraction("eta_ac", eta_ac)?;
    converter.validate()?;
    Ok(eta_ac * converter.inverter_efficiency * converter.rectifier_efficiency)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_converters_pass_through() {
        assert_eq!(dc_to_dc_efficiency(0.41, &ConverterModel::IDEAL).unwrap(), 0.41);
    }

    #[test]
    fn default_chain() {
        let conv = ConverterModel::default();
        assert!((conv.combined() - 0.6098).abs() < 1e-4);
        assert!((dc_to_dc_efficiency(0.41, &conv).unwrap() - 0.25).abs() < 1e-12);
        assert!((dc_to_dc_efficiency(0.08, &conv).unwrap() - 0.0488).abs() < 1e-4);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(dc_to_dc_efficiency(0.0, &ConverterModel::IDEAL).is_err());
        assert!(dc_to_dc_efficiency(1.2, &ConverterModel::IDEAL).is_err());
        let bad = ConverterModel {
            inverter_efficiency: 1.5,
            rectifier_efficiency: 0.9,
        };
        assert!(dc_to_dc_efficiency(0.5, &bad).is_err());
    }

    proptest::proptest! {
        #[test]
        fn chain_never_exceeds_ac(eta in 1e-6f64..=1.0, a in 1e-6f64..=1.0, b in 1e-6f64..=1.0) {
            let conv = ConverterModel { inverter_efficiency: a, rectifier_efficiency: b };
            proptest::prop_assert!(dc_to_dc_efficiency(eta, &conv).unwrap() <= eta);
        }
    }
}
