use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::magnetics::par_map;

/// Series RLC tank with its source or load resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonantPort {
    pub inductance: f64,
    pub capacitance: f64,
    /// Coil ESR.
    pub resistance: f64,
    pub termination: f64,
}

impl ResonantPort {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("inductance", self.inductance)?;
        ensure_positive("capacitance", self.capacitance)?;
        for (name, v) in [("resistance", self.resistance), ("termination", self.termination)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Loop impedance including the termination.
    pub fn impedance(&self, frequency: f64) -> Complex64 {
        let w = 2.0 * PI * frequency;
        Complex64::new(
            self.resistance + self.termination,
            w * self.inductance - 1.0 / (w * self.capacitance),
        )
    }

    /// Unloaded quality factor `ωL/R`.
    pub fn q(&self, frequency: f64) -> f64 {
        2.0 * PI * frequency * self.inductance / self.resistance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkModel {
    pub transmitter: ResonantPort,
    pub receiver: ResonantPort,
    pub mutual: f64,
    /// Peak source voltage.
    pub drive_amplitude: f64,
}

impl LinkModel {
    pub fn coupling(&self) -> f64 {
        self.mutual.abs() / (self.transmitter.inductance * self.receiver.inductance).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        self.transmitter.validate()?;
        self.receiver.validate()?;
        ensure_positive("drive_amplitude", self.drive_amplitude)?;
        if !self.mutual.is_finite() || self.coupling() >= 1.0 {
            return Err(Error::param("mutual", format!("coupling must be below 1, got {}", self.coupling())));
        }
        Ok(())
    }

    /// Figure of merit `k²Q1Q2` at `frequency`.
    pub fn figure_of_merit(&self, frequency: f64) -> f64 {
        let k = self.coupling();
        k * k * self.transmitter.q(frequency) * self.receiver.q(frequency)
    }

    /// Load `R2·√(1 + k²Q1Q2)` that maximises efficiency at resonance.
    pub fn optimal_load(&self, frequency: f64) -> f64 {
        self.receiver.resistance * (1.0 + self.figure_of_merit(frequency)).sqrt()
    }

    pub fn with_load(mut self, load: f64) -> Self {
        self.receiver.termination = load;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSolution {
    pub frequency: f64,
    pub efficiency_ac: f64,
    /// Power entering the transmitter coil terminals (source resistance excluded).
    pub input_power: f64,
    pub delivered_power: f64,
    pub coil_losses: [f64; 2],
    /// Impedance seen at the transmitter coil terminals.
    pub input_impedance: Complex64,
    pub coil_currents: [Complex64; 2],
}

/// Mesh analysis of the coupled series-series link. Powers use peak phasors,
/// `P = ½|I|²R`.
pub fn solve_two_port(link: &LinkModel, frequency: f64) -> Result<LinkSolution> {
    link.validate()?;
    ensure_positive("frequency", frequency)?;
    let w = 2.0 * PI * frequency;
    let z1 = link.transmitter.impedance(frequency);
    let z2 = link.receiver.impedance(frequency);
    let zm = Complex64::new(0.0, w * link.mutual);
    // [z1 zm; zm z2]·[i1; i2] = [v; 0]
    let det = z1 * z2 - zm * zm;
    let scale = w * w * link.transmitter.inductance * link.receiver.inductance
        + z1.norm() * z2.norm()
        + zm.norm_sqr();
    if !(det.norm() > 1e-14 * scale) {
        return Err(Error::DegenerateLink);
    }
    let v = Complex64::new(link.drive_amplitude, 0.0);
    let i1 = v * z2 / det;
    let i2 = -zm * v / det;

    let rs = link.transmitter.termination;
    let coil_voltage = v - i1 * rs;
    let input_power = 0.5 * (coil_voltage * i1.conj()).re;
    let delivered_power = 0.5 * i2.norm_sqr() * link.receiver.termination;
    let coil_losses = [
        0.5 * i1.norm_sqr() * link.transmitter.resistance,
        0.5 * i2.norm_sqr() * link.receiver.resistance,
    ];
    let input_impedance = if z2.norm() > 0.0 {
        z1 - rs + (w * link.mutual).powi(2) / z2
    } else {
        Complex64::new(f64::INFINITY, 0.0)
    };
    let efficiency_ac = if input_power > 0.0 {
        (delivered_power / input_power).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(LinkSolution {
        frequency,
        efficiency_ac,
        input_power,
        delivered_power,
        coil_losses,
        input_impedance,
        coil_currents: [i1, i2],
    })
}

/// Optimal-load efficiency bound `x/(1+√(1+x))²` with `x = k²Q1Q2`.
pub fn max_link_efficiency(k: f64, q1: f64, q2: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::param("k", format!("must lie in [0, 1), got {k}")));
    }
    ensure_positive("q1", q1)?;
    ensure_positive("q2", q2)?;
    let x = k * k * q1 * q2;
    Ok(x / (1.0 + (1.0 + x).sqrt()).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub frequency: f64,
    pub efficiency: f64,
    pub delivered_power: f64,
    pub input_impedance: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub points: Vec<ResponsePoint>,
}

impl ResponseCurve {
    /// Point of highest efficiency.
    pub fn best(&self) -> Option<&ResponsePoint> {
        self.points.iter().max_by(|a, b| a.efficiency.total_cmp(&b.efficiency))
    }
}

/// `points` frequencies log-spaced over `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    ensure_positive("f_lo", lo)?;
    ensure_positive("f_hi", hi)?;
    if lo >= hi {
        return Err(Error::param("f_hi", "must exceed f_lo"));
    }
    if points < 2 {
        return Err(Error::param("points", "need at least 2"));
    }
    let ratio = hi / lo;
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            i if i == points - 1 => hi,
            i => lo * ratio.powf(i as f64 / last),
        })
        .collect())
}

pub fn efficiency_sweep(link: &LinkModel, f_lo: f64, f_hi: f64, points: usize) -> Result<ResponseCurve> {
    link.validate()?;
    let freqs = log_spaced(f_lo, f_hi, points)?;
    let solved = par_map(&freqs, |&f| solve_two_port(link, f));
    let points = solved
        .into_iter()
        .map(|s| {
            s.map(|s| ResponsePoint {
                frequency: s.frequency,
                efficiency: s.efficiency_ac,
                delivered_power: s.delivered_power,
                input_impedance: s.input_impedance,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ResponseCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tuning_capacitance;

    const F0: f64 = 6.78e6;

    /// Symmetric link tuned to F0 with the requested k and Q.
    fn symmetric(k: f64, q: f64) -> LinkModel {
        let l = 1e-6;
        let c = tuning_capacitance(l, F0).unwrap();
        let r = 2.0 * PI * F0 * l / q;
        let port = ResonantPort {
            inductance: l,
            capacitance: c,
            resistance: r,
            termination: 0.0,
        };
        LinkModel {
            transmitter: ResonantPort { termination: 1.0, ..port },
            receiver: ResonantPort { termination: r, ..port },
            mutual: k * l,
            drive_amplitude: 1.0,
        }
    }

    fn balance(s: &LinkSolution) -> f64 {
        (s.input_power - s.delivered_power - s.coil_losses[0] - s.coil_losses[1]).abs() / s.input_power
    }

    #[test]
    fn uncoupled_link_delivers_nothing() {
        let s = solve_two_port(&symmetric(0.0, 50.0), F0).unwrap();
        assert_eq!(s.efficiency_ac, 0.0);
        assert_eq!(s.coil_currents[1].norm(), 0.0);
        let curve = efficiency_sweep(&symmetric(0.0, 50.0), 1e6, 2e7, 50).unwrap();
        assert!(curve.points.iter().all(|p| p.efficiency == 0.0));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(max_link_efficiency(0.0, 10.0, 10.0).unwrap(), 0.0);
        let x: f64 = 100.0;
        let oracle = x / (1.0 + x.sqrt().hypot(1.0)).powi(2);
        let e = max_link_efficiency(0.1, 100.0, 100.0).unwrap();
        assert!((e - oracle).abs() < 1e-12);
        assert!((e - 0.819).abs() < 5e-4);
        // η = (s−1)/(s+1) with s = √(1+x): η = 0.41 at s = 1.41/0.59
        let s: f64 = 1.41 / 0.59;
        let x41 = s * s - 1.0;
        let k = (x41 / 100.0).sqrt();
        assert!((max_link_efficiency(k, 10.0, 10.0).unwrap() - 0.41).abs() < 1e-12);
        assert!(max_link_efficiency(1.0, 10.0, 10.0).is_err());
        assert!(max_link_efficiency(0.1, 0.0, 10.0).is_err());
    }

    #[test]
    fn optimal_load_matches_bound() {
        for x in [0.1_f64, 1.0, 10.0, 100.0] {
            let q = 100.0;
            let link = symmetric(x.sqrt() / q, q);
            let link = link.with_load(link.optimal_load(F0));
            let s = solve_two_port(&link, F0).unwrap();
            let bound = max_link_efficiency(link.coupling(), q, q).unwrap();
            assert!((s.efficiency_ac - bound).abs() <= 0.01 * bound, "x={x}");
            assert!(balance(&s) < 1e-9);
        }
    }

    #[test]
    fn optimum_beats_other_loads() {
        let link = symmetric(0.05, 80.0);
        let best = solve_two_port(&link.with_load(link.optimal_load(F0)), F0).unwrap();
        for factor in [0.3, 0.7, 1.4, 3.0] {
            let other = link.with_load(link.optimal_load(F0) * factor);
            assert!(solve_two_port(&other, F0).unwrap().efficiency_ac < best.efficiency_ac);
        }
    }

    #[test]
    fn detuning_lowers_efficiency() {
        let link = symmetric(0.2, 50.0);
        let link = link.with_load(link.optimal_load(F0));
        let on = solve_two_port(&link, F0).unwrap().efficiency_ac;
        for f in [0.9 * F0, 0.97 * F0, 1.03 * F0, 1.1 * F0] {
            assert!(solve_two_port(&link, f).unwrap().efficiency_ac < on);
        }
    }

    #[test]
    fn weak_coupling_single_peak_at_resonance() {
        let link = symmetric(0.01, 30.0);
        let link = link.with_load(link.optimal_load(F0));
        let curve = efficiency_sweep(&link, 5e6, 9e6, 401).unwrap();
        let idx = curve
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.efficiency.total_cmp(&b.1.efficiency))
            .unwrap()
            .0;
        let bin = (9e6f64 / 5e6).ln() / 400.0;
        assert!((curve.points[idx].frequency / F0).ln().abs() <= bin);
        let maxima = (1..400)
            .filter(|&i| {
                let e = |j: usize| curve.points[j].efficiency;
                e(i) > e(i - 1) && e(i) >= e(i + 1)
            })
            .count();
        assert_eq!(maxima, 1);
    }

    #[test]
    fn strong_coupling_splits_the_resonance() {
        let k = 0.2;
        let link = symmetric(k, 300.0).with_load(0.05);
        let curve = efficiency_sweep(&link, 4e6, 1.2e7, 4001).unwrap();
        // minima of |Z_in| mark the two normal modes
        let z: Vec<f64> = curve.points.iter().map(|p| p.input_impedance.norm()).collect();
        let minima: Vec<f64> = (1..z.len() - 1)
            .filter(|&i| z[i] < z[i - 1] && z[i] <= z[i + 1])
            .map(|i| curve.points[i].frequency)
            .collect();
        assert_eq!(minima.len(), 2, "{minima:?}");
        let lo = F0 / (1.0 + k).sqrt();
        let hi = F0 / (1.0 - k).sqrt();
        assert!((minima[0] / lo - 1.0).abs() < 2e-3);
        assert!((minima[1] / hi - 1.0).abs() < 2e-3);
        // delivered power also peaks twice, near the same modes
        let p: Vec<f64> = curve.points.iter().map(|p| p.delivered_power).collect();
        let peaks = (1..p.len() - 1).filter(|&i| p[i] > p[i - 1] && p[i] >= p[i + 1]).count();
        assert_eq!(peaks, 2);
    }

    #[test]
    fn lossless_tuned_link_is_degenerate() {
        let port = ResonantPort {
            inductance: 1e-6,
            capacitance: tuning_capacitance(1e-6, F0).unwrap(),
            resistance: 0.0,
            termination: 0.0,
        };
        let link = LinkModel {
            transmitter: port,
            receiver: port,
            mutual: 0.0,
            drive_amplitude: 1.0,
        };
        assert!(matches!(solve_two_port(&link, F0), Err(Error::DegenerateLink)));
    }

    #[test]
    fn rejects_bad_links() {
        let mut link = symmetric(0.1, 50.0);
        link.mutual = 2e-6;
        assert!(solve_two_port(&link, F0).is_err());
        let mut link = symmetric(0.1, 50.0);
        link.drive_amplitude = 0.0;
        assert!(solve_two_port(&link, F0).is_err());
        assert!(efficiency_sweep(&symmetric(0.1, 50.0), 2e7, 1e6, 10).is_err());
        assert!(efficiency_sweep(&symmetric(0.1, 50.0), 1e6, 2e7, 1).is_err());
    }

    #[test]
    fn log_grid_endpoints_and_ratio() {
        let f = log_spaced(1e6, 1e8, 3).unwrap();
        assert_eq!((f[0], f[2]), (1e6, 1e8));
        assert!((f[1] - 1e7).abs() < 1e-6);
    }

    proptest::proptest! {
        #[test]
        fn energy_balance_and_bounds(
            k in 0.0f64..0.9,
            q1 in 5.0f64..500.0,
            q2 in 5.0f64..500.0,
            load in 0.01f64..100.0,
            detune in 0.7f64..1.4,
        ) {
            let mut link = symmetric(k, q1);
            link.receiver.resistance = 2.0 * PI * F0 * 1e-6 / q2;
            let link = link.with_load(load);
            let s = solve_two_port(&link, F0 * detune).unwrap();
            proptest::prop_assert!(balance(&s) <= 1e-9);
            proptest::prop_assert!((0.0..=1.0).contains(&s.efficiency_ac));
        }

        #[test]
        fn bound_is_monotone_in_merit(a in 0.0f64..1e4, b in 0.0f64..1e4) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let e = |x: f64| max_link_efficiency((x / 1e4).sqrt().min(0.999), 100.0, 100.0).unwrap();
            proptest::prop_assert!(e(lo) <= e(hi));
            proptest::prop_assert!((0.0..1.0).contains(&e(hi)));
        }
    }
}
