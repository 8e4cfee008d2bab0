use serde::{Deserialize, Serialize};

use super::ConductorMaterial;
use crate::error::{ensure_positive, Error, Result};
use crate::Vec3;

/// Discretised conductor centre-line.
///
/// A closed path implicitly connects its last vertex back to the first; the
/// first vertex is never repeated at the end of `vertices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WirePath {
    vertices: Vec<Vec3>,
    closed: bool,
    material: ConductorMaterial,
}

impl WirePath {
    pub fn new(vertices: Vec<Vec3>, closed: bool, material: ConductorMaterial) -> Result<Self> {
        material.validate()?;
        if vertices.len() < 2 {
            return Err(Error::InvalidGeometry(format!(
                "a path needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite())) {
            return Err(Error::InvalidGeometry("non-finite vertex coordinate".into()));
        }
        let path = Self {
            vertices,
            closed,
            material,
        };
        if let Some(index) = path.segments().position(|(a, b)| a == b) {
            return Err(Error::DegenerateSegment { index });
        }
        Ok(path)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn material(&self) -> &ConductorMaterial {
        &self.material
    }

    pub fn wire_radius(&self) -> f64 {
        self.material.wire_radius
    }

    pub fn with_material(mut self, material: ConductorMaterial) -> Result<Self> {
        material.validate()?;
        self.material = material;
        Ok(self)
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Segments as `(start, end)` pairs in traversal order.
    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.vertices.len();
        (0..self.segment_count()).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn max_segment_length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    /// Vector area `½ ∮ r × dr` of the closed path: the magnetic moment per
    /// unit current. Open paths are treated as closed by their chord.
    pub fn vector_area(&self) -> Vec3 {
        let n = self.vertices.len();
        let mut acc = Vec3::ZERO;
        for i in 0..n {
            acc += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        acc * 0.5
    }

    /// Signed area enclosed in the xy-plane (positive counter-clockwise).
    pub fn signed_area_xy(&self) -> f64 {
        self.vector_area().z
    }

    /// Rigid transform: every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        Self::new(
            self.vertices.iter().map(|&v| f(v)).collect(),
            self.closed,
            self.material.clone(),
        )
    }

    pub fn translated(&self, offset: Vec3) -> Result<Self> {
        self.map_vertices(|v| v + offset)
    }

    pub fn segment_list(&self) -> Vec<(Vec3, Vec3)> {
        self.segments().collect()
    }
}

/// Subdivides every segment uniformly so that none exceeds `max_segment`.
///
/// Original vertices are kept, so the polyline (and its length) is
/// unchanged; a segment already short enough is left untouched.
pub fn resample_path(path: &WirePath, max_segment: f64) -> Result<WirePath> {
    ensure_positive("max_segment", max_segment)?;
    let mut out = Vec::with_capacity(path.vertices.len());
    for (a, b) in path.segments() {
        out.push(a);
        let len = a.distance(b);
        // tolerate rounding so an already-resampled path stays fixed
        let pieces = ((len / max_segment) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        for k in 1..pieces {
            out.push(a.lerp(b, k as f64 / pieces as f64));
        }
    }
    if !path.closed {
        out.push(*path.vertices.last().expect("path has vertices"));
    }
    WirePath::new(out, path.closed, path.material.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat() -> ConductorMaterial {
        ConductorMaterial::liquid_metal_thread()
    }

    #[test]
    fn rejects_short_and_degenerate_paths() {
        assert!(WirePath::new(vec![Vec3::ZERO], false, mat()).is_err());
        let e = WirePath::new(
            vec![Vec3::ZERO, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)],
            false,
            mat(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::DegenerateSegment { index: 0 }));
    }

    #[test]
    fn straight_segment_subdivides_into_ten() {
        let p = WirePath::new(
            vec![Vec3::ZERO, Vec3::new(0.1, 0.0, 0.0)],
            false,
            mat(),
        )
        .unwrap();
        let r = resample_path(&p, 0.01).unwrap();
        assert_eq!(r.vertices().len(), 11);
        assert!(r.max_segment_length() <= 0.01 + 1e-15);
    }

    #[test]
    fn fine_path_is_unchanged() {
        let p = WirePath::new(
            vec![Vec3::ZERO, Vec3::new(0.001, 0.0, 0.0), Vec3::new(0.001, 0.001, 0.0)],
            true,
            mat(),
        )
        .unwrap();
        let r = resample_path(&p, 0.01).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn resampling_never_adds_curvature() {
        let n = 8;
        let radius = 0.05;
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Vec3::new(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect();
        let p = WirePath::new(verts, true, mat()).unwrap();
        let r = resample_path(&p, 1e-3).unwrap();
        let octagon = 2.0 * n as f64 * radius * (std::f64::consts::PI / n as f64).sin();
        assert!((r.length() - octagon).abs() <= 1e-12 * octagon);
        assert!(r.length() < 2.0 * std::f64::consts::PI * radius * 0.98);
    }

    #[test]
    fn rejects_non_positive_max_segment() {
        let p = WirePath::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)], false, mat()).unwrap();
        assert!(resample_path(&p, 0.0).is_err());
    }

    #[test]
    fn unit_square_area() {
        let p = WirePath::new(
            vec![
                Vec3::ZERO,
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            true,
            mat(),
        )
        .unwrap();
        assert_eq!(p.signed_area_xy(), 1.0);
        assert_eq!(p.length(), 4.0);
    }

    proptest::proptest! {
        #[test]
        fn resample_preserves_length_and_is_idempotent(
            pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 3..12),
            max_seg in 0.005f64..0.5,
        ) {
            let verts: Vec<Vec3> = pts.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
            let Ok(p) = WirePath::new(verts, true, mat()) else { return Ok(()); };
            let r = resample_path(&p, max_seg).unwrap();
            let l0 = p.length();
            proptest::prop_assert!((r.length() - l0).abs() <= 1e-12 * l0);
            proptest::prop_assert!(r.max_segment_length() <= max_seg * (1.0 + 1e-12));
            let rr = resample_path(&r, max_seg).unwrap();
            proptest::prop_assert_eq!(rr, r);
        }
    }
}
