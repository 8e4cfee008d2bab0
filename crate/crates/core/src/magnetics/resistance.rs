use crate::error::{ensure_positive, Error, Result};
use crate::geometry::WirePath;
use crate::MU0;

/// Skin depth (m) of a non-magnetic conductor; infinite at DC.
pub fn skin_depth(resistivity: f64, frequency: f64) -> f64 {
    if frequency == 0.0 {
        f64::INFINITY
    } else {
        (resistivity / (std::f64::consts::PI * frequency * MU0)).sqrt()
    }
}

pub fn dc_resistance(path: &WirePath) -> f64 {
    let m = path.material();
    m.resistivity * path.length() / (std::f64::consts::PI * m.wire_radius * m.wire_radius)
}

/// AC resistance (Ω) of the path's round conductor.
///
/// Above `a/δ = 2` the classic thick-wire asymptote `a/(2δ) + 1/4` is used.
/// Below it the ratio follows `1 + (a/δ)⁴/64`, which meets the asymptote
/// with matching value and slope at the crossover, so the curve is C¹ and
/// monotone in frequency.
pub fn ac_resistance(path: &WirePath, frequency: f64) -> Result<f64> {
    if !(frequency.is_finite() && frequency >= 0.0) {
        return Err(Error::param("frequency", format!("must be non-negative, got {frequency}")));
    }
    let m = path.material();
    let x = m.wire_radius / skin_depth(m.resistivity, frequency);
    let ratio = if x > 2.0 {
        0.5 * x + 0.25
    } else {
        1.0 + x.powi(4) / 64.0
    };
    Ok(dc_resistance(path) * ratio)
}

/// `k = M / √(L1·L2)`.
pub fn coupling_coefficient(mutual: f64, l1: f64, l2: f64) -> Result<f64> {
    ensure_positive("l1", l1)?;
    ensure_positive("l2", l2)?;
    Ok(mutual / (l1 * l2).sqrt())
}

/// `Q = 2πf·L / R`.
pub fn quality_factor(inductance: f64, resistance: f64, frequency: f64) -> Result<f64> {
    ensure_positive("inductance", inductance)?;
    ensure_positive("resistance", resistance)?;
    ensure_positive("frequency", frequency)?;
    Ok(2.0 * std::f64::consts::PI * frequency * inductance / resistance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConductorMaterial;
    use crate::Vec3;

    fn metre_of(material: ConductorMaterial) -> WirePath {
        WirePath::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)], false, material).unwrap()
    }

    #[test]
    fn dc_resistance_of_liquid_metal_thread() {
        let r = ac_resistance(&metre_of(ConductorMaterial::liquid_metal_thread()), 0.0).unwrap();
        let expected = 29.6e-8 / (std::f64::consts::PI * 0.5e-3 * 0.5e-3);
        assert_eq!(r, expected);
        assert!((r - 0.377).abs() < 5e-4);
    }

    #[test]
    fn standard_thread_is_about_eight_times_more_resistive() {
        let lm = ac_resistance(&metre_of(ConductorMaterial::liquid_metal_thread()), 0.0).unwrap();
        let st = ac_resistance(&metre_of(ConductorMaterial::conductive_thread()), 0.0).unwrap();
        assert!((st / lm - 246.6 / 29.6).abs() < 1e-12);
        assert!((st / lm - 8.33).abs() < 0.01);
    }

    #[test]
    fn monotone_and_continuous_in_frequency() {
        let p = metre_of(ConductorMaterial::liquid_metal_thread());
        let mut prev = ac_resistance(&p, 0.0).unwrap();
        let mut f = 1.0;
        while f < 1e9 {
            let r = ac_resistance(&p, f).unwrap();
            assert!(r >= prev);
            // no jumps larger than the local step allows
            assert!(r / prev < 1.05);
            prev = r;
            f *= 1.02;
        }
        let lo = ac_resistance(&p, 1e3).unwrap();
        let hi = ac_resistance(&p, 6.78e6).unwrap();
        assert!(hi >= lo);
        assert!(ac_resistance(&p, -1.0).is_err());
    }

    #[test]
    fn crossover_is_smooth() {
        let p = metre_of(ConductorMaterial::copper(1e-3));
        let m = p.material();
        // frequency where a/δ = 2
        let f = 4.0 * m.resistivity / (std::f64::consts::PI * MU0 * m.wire_radius * m.wire_radius);
        let below = ac_resistance(&p, f * (1.0 - 1e-9)).unwrap();
        let above = ac_resistance(&p, f * (1.0 + 1e-9)).unwrap();
        assert!((above - below).abs() < 1e-8 * below);
        assert!((below / dc_resistance(&p) - 1.25).abs() < 1e-8);
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling_coefficient(0.0, 1e-6, 2e-6).unwrap(), 0.0);
        let (l1, l2) = (1e-6f64, 4e-6f64);
        let k = coupling_coefficient(0.5 * (l1 * l2).sqrt(), l1, l2).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        assert!(coupling_coefficient(1e-7, 0.0, 1e-6).is_err());
    }

    #[test]
    fn quality_factor_examples() {
        let q = quality_factor(1e-6, 1.0, 6.78e6).unwrap();
        assert!((q - 42.6).abs() < 0.01);
        let q2 = quality_factor(1e-6, 2.0, 6.78e6).unwrap();
        assert!((q / q2 - 2.0).abs() < 1e-15);
        assert!(quality_factor(1e-6, 0.0, 6.78e6).is_err());
    }

    #[test]
    fn q_ratio_of_materials_is_inverse_resistance_ratio() {
        let lm = metre_of(ConductorMaterial::liquid_metal_thread());
        let st = metre_of(ConductorMaterial::conductive_thread());
        let f = 6.78e6;
        let (r_lm, r_st) = (ac_resistance(&lm, f).unwrap(), ac_resistance(&st, f).unwrap());
        let ratio = quality_factor(1e-6, r_lm, f).unwrap() / quality_factor(1e-6, r_st, f).unwrap();
        assert!((ratio - r_st / r_lm).abs() < 1e-12 * ratio);
    }
}
