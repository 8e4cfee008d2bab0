use num_complex::Complex64;

use crate::circuit::ResponseCurve;
use crate::error::{Error, Result};
use crate::geometry::WirePath;
use crate::magnetics::FieldMap;
use crate::telemetry::SweepResult;

/// Floats are written in shortest round-trip exponent form.
fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| num(v)).collect());
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = ::csv::Writer::from_writer(Vec::new());
        let wrap = |e: ::csv::Error| Error::InvalidGeometry(format!("csv encoding failed: {e}"));
        w.write_record(&self.header).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row).map_err(wrap)?;
        }
        w.into_inner()
            .map_err(|e| Error::InvalidGeometry(format!("csv encoding failed: {e}")))
    }
}

pub fn path_csv(path: &WirePath) -> CsvTable {
    let mut t = CsvTable::new(vec!["x", "y", "z"]);
    for v in path.vertices() {
        t.push_numbers(&[v.x, v.y, v.z]);
    }
    t
}

/// One row per grid point; masked points carry zero field and `masked=1`.
pub fn field_csv(map: &FieldMap) -> CsvTable {
    let mut t = CsvTable::new(vec!["x", "y", "z", "region", "bx", "by", "bz", "masked"]);
    for (((p, r), b), m) in map
        .grid
        .points()
        .iter()
        .zip(map.grid.regions())
        .zip(&map.b)
        .zip(&map.masked)
    {
        t.rows.push(vec![
            num(p.x),
            num(p.y),
            num(p.z),
            r.as_str().to_string(),
            num(b.x),
            num(b.y),
            num(b.z),
            if *m { "1" } else { "0" }.to_string(),
        ]);
    }
    t
}

pub fn curve_csv(curve: &ResponseCurve) -> CsvTable {
    let mut t = CsvTable::new(vec!["frequency_hz", "efficiency", "re_zin", "im_zin", "delivered_power_w"]);
    for p in &curve.points {
        t.push_numbers(&[
            p.frequency,
            p.efficiency,
            p.input_impedance.re,
            p.input_impedance.im,
            p.delivered_power,
        ]);
    }
    t
}

pub fn sweep_csv(result: &SweepResult) -> CsvTable {
    let mut t = CsvTable::new(vec!["frequency_hz", "re_response", "im_response"]);
    for (f, z) in result.frequencies.iter().zip(&result.response) {
        let z: &Complex64 = z;
        t.push_numbers(&[*f, z.re, z.im]);
    }
    t
}

/// `|B|` of two sources along a common distance axis.
pub fn far_field_csv(distance: &[f64], a: &[f64], b: &[f64], names: [&'static str; 2]) -> CsvTable {
    let mut t = CsvTable::new(vec!["distance_m", names[0], names[1]]);
    for ((d, x), y) in distance.iter().zip(a).zip(b) {
        t.push_numbers(&[*d, *x, *y]);
    }
    t
}
