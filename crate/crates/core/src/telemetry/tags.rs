use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{resonant_frequency, tuning_capacitance};
use crate::error::{ensure_positive, Error, Result};

/// How a tag encodes its value in capacitance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    /// Fixed capacitance, presence only.
    Identifier,
    /// Two states.
    Touch,
    /// Eight discrete steps.
    Rotation,
    /// Continuous.
    Pressure,
}

const ROTATION_STEPS: f64 = 7.0;

impl TagKind {
    /// Nearest value this kind can represent.
    pub fn quantise(self, value: f64) -> f64 {
        match self {
            TagKind::Identifier => 0.0,
            _ => self.encode(value),
        }
    }

    /// Normalised capacitance offset for a value in [0, 1].
    fn encode(self, value: f64) -> f64 {
        match self {
            TagKind::Identifier => 0.0,
            TagKind::Touch => {
                if value >= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            TagKind::Rotation => (value * ROTATION_STEPS).round() / ROTATION_STEPS,
            TagKind::Pressure => value,
        }
    }

    /// Snaps a measured offset back onto the value set of this kind.
    fn decode(self, offset: f64) -> f64 {
        self.encode(offset.clamp(0.0, 1.0))
    }
}

/// LC tag whose capacitance `C_base·(1 + span·g(value))` rises with value,
/// so resonance falls across its band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorTag {
    pub id: String,
    pub kind: TagKind,
    pub inductance: f64,
    pub base_capacitance: f64,
    /// Relative capacitance change at full scale.
    pub capacitance_span: f64,
    pub esr: f64,
    /// `[f_min, f_max]` in Hz.
    pub band: [f64; 2],
    pub coupling_to_reader: f64,
}

/// Resonance sits this far above the band centre at value 0 and below it
/// at value 1.
const EXCURSION: f64 = 0.08;
const BAND_HALF_WIDTH: f64 = 0.10;

impl SensorTag {
    /// Tag with a ±10% band around `centre`, swinging from +8% at value 0 to
    /// −8% at full scale.
    pub fn centred(
        id: impl Into<String>,
        kind: TagKind,
        centre: f64,
        inductance: f64,
        q: f64,
        coupling_to_reader: f64,
    ) -> Result<Self> {
        ensure_positive("centre", centre)?;
        ensure_positive("q", q)?;
        let hi = 1.0 + EXCURSION;
        let lo = 1.0 - EXCURSION;
        let tag = Self {
            id: id.into(),
            kind,
            inductance,
            base_capacitance: tuning_capacitance(inductance, centre * hi)?,
            capacitance_span: (hi / lo).powi(2) - 1.0,
            esr: 2.0 * PI * centre * inductance / q,
            band: [centre * (1.0 - BAND_HALF_WIDTH), centre * (1.0 + BAND_HALF_WIDTH)],
            coupling_to_reader,
        };
        tag.validate()?;
        Ok(tag)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("inductance", self.inductance)?;
        ensure_positive("base_capacitance", self.base_capacitance)?;
        ensure_positive("esr", self.esr)?;
        if self.kind != TagKind::Identifier {
            ensure_positive("capacitance_span", self.capacitance_span)?;
        }
        if !(self.band[0] > 0.0 && self.band[0] < self.band[1]) {
            return Err(Error::param("band", format!("need 0 < f_min < f_max, got {:?}", self.band)));
        }
        if !(0.0..1.0).contains(&self.coupling_to_reader) {
            return Err(Error::param("coupling_to_reader", "must lie in [0, 1)"));
        }
        for v in [0.0, 1.0] {
            let f = self.resonance(v);
            if f < self.band[0] || f > self.band[1] {
                return Err(Error::param(
                    "band",
                    format!("tag `{}` resonates at {f:.4e} Hz outside its band", self.id),
                ));
            }
        }
        Ok(())
    }

    pub fn capacitance(&self, value: f64) -> f64 {
        self.base_capacitance * (1.0 + self.capacitance_span * self.kind.encode(value))
    }

    fn resonance(&self, value: f64) -> f64 {
        1.0 / (2.0 * PI * (self.inductance * self.capacitance(value)).sqrt())
    }

    /// Series RLC impedance of the tag.
    pub fn impedance(&self, value: f64, frequency: f64) -> Complex64 {
        let w = 2.0 * PI * frequency;
        Complex64::new(self.esr, w * self.inductance - 1.0 / (w * self.capacitance(value)))
    }

    /// Mutual inductance to a reader coil of inductance `reader_inductance`.
    pub fn mutual_to(&self, reader_inductance: f64) -> f64 {
        self.coupling_to_reader * (self.inductance * reader_inductance).sqrt()
    }

    /// Inverts the resonance law. Values are snapped to the kind's value set.
    pub fn value_at(&self, frequency: f64) -> Result<f64> {
        let c = tuning_capacitance(self.inductance, frequency)?;
        if self.kind == TagKind::Identifier {
            return Ok(0.0);
        }
        Ok(self.kind.decode((c / self.base_capacitance - 1.0) / self.capacitance_span))
    }

    pub fn contains(&self, frequency: f64) -> bool {
        frequency >= self.band[0] && frequency <= self.band[1]
    }
}

fn check_value(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param("value", format!("must lie in [0, 1], got {value}")))
    }
}

pub fn tag_resonance(tag: &SensorTag, value: f64) -> Result<f64> {
    check_value(value)?;
    resonant_frequency(tag.inductance, tag.capacitance(value))
}

/// Impedance `(ωM)²/Z_tag` a tag reflects into the coil it couples to.
pub fn reflected_impedance(tag: &SensorTag, value: f64, frequency: f64, mutual: f64) -> Result<Complex64> {
    check_value(value)?;
    ensure_positive("frequency", frequency)?;
    let wm = 2.0 * PI * frequency * mutual;
    Ok(wm * wm / tag.impedance(value, frequency))
}

/// Tags with pairwise disjoint bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SensorTag>", into = "Vec<SensorTag>")]
pub struct TagRegistry {
    tags: Vec<SensorTag>,
}

impl TagRegistry {
    pub fn new(tags: Vec<SensorTag>) -> Result<Self> {
        for t in &tags {
            t.validate()?;
        }
        for (i, a) in tags.iter().enumerate() {
            for b in &tags[i + 1..] {
                if a.band[0] <= b.band[1] && b.band[0] <= a.band[1] {
                    return Err(Error::OverlappingBands(a.id.clone(), b.id.clone()));
                }
                if a.id == b.id {
                    return Err(Error::param("id", format!("duplicate tag id `{}`", a.id)));
                }
            }
        }
        Ok(Self { tags })
    }

    pub fn tags(&self) -> &[SensorTag] {
        &self.tags
    }

    /// The tag whose band contains `frequency`.
    pub fn lookup(&self, frequency: f64) -> Option<&SensorTag> {
        self.tags.iter().find(|t| t.contains(frequency))
    }

    /// One tag of each kind at 10, 15, 20 and 25 MHz.
    pub fn four_kinds(inductance: f64, q: f64, coupling: f64) -> Result<Self> {
        let kinds = [
            ("id", TagKind::Identifier, 10e6),
            ("touch", TagKind::Touch, 15e6),
            ("rotation", TagKind::Rotation, 20e6),
            ("pressure", TagKind::Pressure, 25e6),
        ];
        let tags = kinds
            .into_iter()
            .map(|(id, kind, fc)| SensorTag::centred(id, kind, fc, inductance, q, coupling))
            .collect::<Result<_>>()?;
        Self::new(tags)
    }
}

impl TryFrom<Vec<SensorTag>> for TagRegistry {
    type Error = Error;

    fn try_from(tags: Vec<SensorTag>) -> Result<Self> {
        Self::new(tags)
    }
}

impl From<TagRegistry> for Vec<SensorTag> {
    fn from(r: TagRegistry) -> Self {
        r.tags
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(kind: TagKind) -> SensorTag {
        SensorTag::centred("t", kind, 20e6, 1e-6, 40.0, 0.01).unwrap()
    }

    #[test]
    fn base_value_hits_base_resonance() {
        let t = tag(TagKind::Pressure);
        let f = tag_resonance(&t, 0.0).unwrap();
        assert_eq!(f, resonant_frequency(t.inductance, t.base_capacitance).unwrap());
        assert!((f / 21.6e6 - 1.0).abs() < 1e-12);
        assert!((tag_resonance(&t, 1.0).unwrap() / 18.4e6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacitance_ratio_sets_frequency_ratio() {
        let t = SensorTag {
            id: "c".into(),
            kind: TagKind::Pressure,
            inductance: 1e-6,
            base_capacitance: 100e-12,
            capacitance_span: 0.21,
            esr: 1.0,
            band: [1e6, 1e9],
            coupling_to_reader: 0.0,
        };
        let r = tag_resonance(&t, 1.0).unwrap() / tag_resonance(&t, 0.0).unwrap();
        assert!((r - 1.0 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn value_ordering_and_range() {
        let t = tag(TagKind::Pressure);
        assert!(tag_resonance(&t, 0.2).unwrap() > tag_resonance(&t, 0.8).unwrap());
        assert!(tag_resonance(&t, 1.5).is_err());
        assert!(tag_resonance(&t, -0.1).is_err());
    }

    #[test]
    fn discrete_kinds() {
        let rot = tag(TagKind::Rotation);
        let levels: std::collections::BTreeSet<u64> = (0..=100)
            .map(|i| tag_resonance(&rot, i as f64 / 100.0).unwrap().to_bits())
            .collect();
        assert_eq!(levels.len(), 8);
        let touch = tag(TagKind::Touch);
        assert_eq!(touch.value_at(tag_resonance(&touch, 0.9).unwrap()).unwrap(), 1.0);
        assert_eq!(touch.value_at(tag_resonance(&touch, 0.1).unwrap()).unwrap(), 0.0);
        let id = tag(TagKind::Identifier);
        assert_eq!(tag_resonance(&id, 0.0).unwrap(), tag_resonance(&id, 1.0).unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let t = tag(TagKind::Pressure);
        for i in 0..=10 {
            let v = i as f64 / 10.0;
            let back = t.value_at(tag_resonance(&t, v).unwrap()).unwrap();
            assert!((back - v).abs() < 1e-12);
        }
        let r = tag(TagKind::Rotation);
        for step in 0..8 {
            let v = step as f64 / 7.0;
            assert_eq!(r.value_at(tag_resonance(&r, v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn reflection_at_resonance_is_real() {
        let t = tag(TagKind::Pressure);
        let m = 50e-9;
        let f = tag_resonance(&t, 0.4).unwrap();
        let z = reflected_impedance(&t, 0.4, f, m).unwrap();
        let oracle = (2.0 * PI * f * m).powi(2) / t.esr;
        assert!((z.re - oracle).abs() < 1e-9 * oracle);
        assert!(z.im.abs() < 1e-6 * oracle);
        assert_eq!(reflected_impedance(&t, 0.4, f, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let off = reflected_impedance(&t, 0.4, f / 10.0, m).unwrap();
        assert!(off.norm() * 100.0 < z.norm());
    }

    #[test]
    fn reflection_depends_only_on_mutual() {
        // swapping reader roles keeps M and the tag, hence the reflection
        let t = tag(TagKind::Touch);
        let a = reflected_impedance(&t, 1.0, 19e6, t.mutual_to(2e-6)).unwrap();
        let b = reflected_impedance(&t, 1.0, 19e6, (t.inductance * 2e-6).sqrt() * t.coupling_to_reader).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn registry_rejects_overlap() {
        let a = SensorTag::centred("a", TagKind::Pressure, 20e6, 1e-6, 40.0, 0.01).unwrap();
        let b = SensorTag::centred("b", TagKind::Touch, 21e6, 1e-6, 40.0, 0.01).unwrap();
        assert!(matches!(TagRegistry::new(vec![a, b]), Err(Error::OverlappingBands(_, _))));
        let reg = TagRegistry::four_kinds(1e-6, 40.0, 0.01).unwrap();
        assert_eq!(reg.tags().len(), 4);
        assert_eq!(reg.lookup(15.2e6).unwrap().id, "touch");
        assert!(reg.lookup(12e6).is_none());
    }

    #[test]
    fn registry_json_revalidates() {
        let reg = TagRegistry::four_kinds(1e-6, 40.0, 0.01).unwrap();
        let mut v: Vec<SensorTag> = reg.clone().into();
        v[1].band = v[0].band;
        let json = serde_json::to_string(&v).unwrap();
        assert!(serde_json::from_str::<TagRegistry>(&json).is_err());
        let ok = serde_json::to_string(&reg).unwrap();
        assert_eq!(serde_json::from_str::<TagRegistry>(&ok).unwrap(), reg);
    }

    proptest::proptest! {
        #[test]
        fn pressure_resonance_strictly_decreasing(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            proptest::prop_assume!(a < b);
            let t = tag(TagKind::Pressure);
            proptest::prop_assert!(tag_resonance(&t, a).unwrap() > tag_resonance(&t, b).unwrap());
        }
    }
}
