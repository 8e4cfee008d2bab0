//! Flat coil builders.
//!
//! Meander and helical coils are laid out in the xy-plane over the footprint
//! `[0, width] × [0, height]` with +z as the coil normal. Loops are centred on
//! the origin. Wrapping onto the body happens in [`super::BodyModel`].

use serde::{Deserialize, Serialize};

use super::{ConductorMaterial, WirePath, DEFAULT_MAX_SEGMENT, DEFAULT_STANDOFF, NESTED_TURN_SPACING};
use crate::error::{ensure_positive, Error, Result};
use crate::Vec3;

fn default_turns() -> usize {
    1
}

fn default_standoff() -> f64 {
    DEFAULT_STANDOFF
}

/// Alternating-lobe (figure-eight chain) coil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanderSpec {
    pub footprint_width: f64,
    pub footprint_height: f64,
    pub lobe_count: usize,
    #[serde(default = "default_turns")]
    pub turns_per_lobe: usize,
    /// Gap between adjacent lobes, where the two rails cross over.
    pub lobe_spacing: f64,
    #[serde(default = "default_standoff")]
    pub standoff: f64,
    pub material: ConductorMaterial,
}

/// Single-direction rectangular spiral over the same kind of footprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelicalSpec {
    pub footprint_width: f64,
    pub footprint_height: f64,
    pub turns: usize,
    pub turn_spacing: f64,
    #[serde(default = "default_standoff")]
    pub standoff: f64,
    pub material: ConductorMaterial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum LoopShape {
    Square { side_length: f64 },
    Circle { radius: f64 },
}

/// Small receiver or sensor coil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    #[serde(flatten)]
    pub shape: LoopShape,
    #[serde(default = "default_turns")]
    pub turns: usize,
    #[serde(default)]
    pub turn_spacing: f64,
    pub material: ConductorMaterial,
}

impl MeanderSpec {
    /// Width of an interior lobe's straight rail for the outermost chain.
    fn rail_width(&self) -> f64 {
        let g = self.lobe_spacing;
        (self.footprint_width + 0.5 * g) / self.lobe_count as f64 - g
    }

    /// Area enclosed by a single lobe of the outermost chain.
    pub fn lobe_area(&self) -> f64 {
        (self.rail_width() + 0.5 * self.lobe_spacing) * self.footprint_height
    }

    pub fn footprint_area(&self) -> f64 {
        self.footprint_width * self.footprint_height
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("footprint_width", self.footprint_width)?;
        ensure_positive("footprint_height", self.footprint_height)?;
        ensure_positive("lobe_spacing", self.lobe_spacing)?;
        self.material.validate()?;
        if !(self.standoff.is_finite() && self.standoff >= 0.0) {
            return Err(Error::param("standoff", "must be non-negative"));
        }
        if self.lobe_count < 2 || !self.lobe_count.is_multiple_of(2) {
            return Err(Error::param(
                "lobe_count",
                format!("must be even and at least 2, got {}", self.lobe_count),
            ));
        }
        if self.turns_per_lobe == 0 {
            return Err(Error::param("turns_per_lobe", "must be at least 1"));
        }
        let diameter = 2.0 * self.material.wire_radius;
        if self.lobe_spacing < diameter {
            return Err(Error::InvalidGeometry(format!(
                "adjacent lobes overlap: spacing {} m is below the wire diameter {} m",
                self.lobe_spacing, diameter
            )));
        }
        let nest = 2.0 * (self.turns_per_lobe - 1) as f64 * NESTED_TURN_SPACING;
        if self.turns_per_lobe > 1 && 0.5 * NESTED_TURN_SPACING < diameter {
            return Err(Error::InvalidGeometry(format!(
                "nested turns at {NESTED_TURN_SPACING} m pitch do not fit a wire diameter of {diameter} m"
            )));
        }
        if self.rail_width() - nest <= diameter || self.footprint_height - nest <= diameter {
            return Err(Error::InvalidGeometry(
                "lobes too small for the requested lobe count, spacing and turns".into(),
            ));
        }
        Ok(())
    }
}

impl HelicalSpec {
    pub fn footprint_area(&self) -> f64 {
        self.footprint_width * self.footprint_height
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("footprint_width", self.footprint_width)?;
        ensure_positive("footprint_height", self.footprint_height)?;
        self.material.validate()?;
        if self.turns == 0 {
            return Err(Error::param("turns", "must be at least 1"));
        }
        if self.turns > 1 {
            ensure_positive("turn_spacing", self.turn_spacing)?;
            if self.turn_spacing < 2.0 * self.material.wire_radius {
                return Err(Error::InvalidGeometry(
                    "turn spacing is below the wire diameter".into(),
                ));
            }
        }
        let inset = 2.0 * (self.turns - 1) as f64 * self.turn_spacing;
        let min_dim = self.footprint_width.min(self.footprint_height);
        if inset >= min_dim - 2.0 * self.material.wire_radius {
            return Err(Error::InvalidGeometry(format!(
                "{} turns at {} m spacing do not fit a {} m footprint",
                self.turns, self.turn_spacing, min_dim
            )));
        }
        Ok(())
    }
}

impl LoopSpec {
    pub fn footprint_area(&self) -> f64 {
        match self.shape {
            LoopShape::Square { side_length } => side_length * side_length,
            LoopShape::Circle { radius } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        let outer = match self.shape {
            LoopShape::Square { side_length } => {
                ensure_positive("side_length", side_length)?;
                0.5 * side_length
            }
            LoopShape::Circle { radius } => {
                ensure_positive("radius", radius)?;
                radius
            }
        };
        if self.turns == 0 {
            return Err(Error::param("turns", "must be at least 1"));
        }
        if self.turns > 1 {
            ensure_positive("turn_spacing", self.turn_spacing)?;
            if self.turn_spacing < 2.0 * self.material.wire_radius {
                return Err(Error::InvalidGeometry(
                    "turn spacing is below the wire diameter".into(),
                ));
            }
            if (self.turns - 1) as f64 * self.turn_spacing >= outer - self.material.wire_radius {
                return Err(Error::InvalidGeometry("turns do not fit inside the loop".into()));
            }
        }
        Ok(())
    }
}

/// Height of the crossover that returns from the innermost nested turn.
fn lead_lift(material: &ConductorMaterial) -> f64 {
    4.0 * material.wire_radius
}

/// Appends the lifted return lead from the innermost turn start back over the
/// transitions to the first vertex. Transitions and lead are collinear in
/// projection, so they add no area normal to the coil.
fn push_return_lead(verts: &mut Vec<Vec3>, first: Vec3, innermost: Vec3, lift: f64) {
    let up = Vec3::new(0.0, 0.0, lift);
    verts.push(innermost + up);
    verts.push(first + up);
}

/// Figure-eight chain of `lobe_count` lobes with alternating winding sense.
///
/// The conductor runs out along alternating top/bottom rails, turns at the
/// far end and returns on the opposite rails, so the two passes cross in
/// every gap. Lobe 0 is traversed clockwise, lobe 1 counter-clockwise and so
/// on; every lobe encloses the same area, so the net moment vanishes. Each
/// extra turn repeats the chain inset by [`NESTED_TURN_SPACING`]. Crossovers
/// are modelled as coplanar filaments meeting at the gap centre.
pub fn build_meander_path(spec: &MeanderSpec) -> Result<WirePath> {
    spec.validate()?;
    let n = spec.lobe_count;
    let g = spec.lobe_spacing;
    let w = spec.rail_width();
    let w_end = w + 0.25 * g;
    let width = spec.footprint_width;
    let height = spec.footprint_height;

    // outer-chain rail extents
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut x = 0.0;
    for i in 0..n {
        let rail = if i == 0 || i == n - 1 { w_end } else { w };
        left.push(x);
        right.push(x + rail);
        x += rail + g;
    }

    let s = NESTED_TURN_SPACING;
    let mut verts = Vec::new();
    let mut starts = Vec::with_capacity(spec.turns_per_lobe);
    for k in 0..spec.turns_per_lobe {
        let d = k as f64 * s;
        let (yb, yt) = (d, height - d);
        let l = |i: usize| if i == 0 { 0.5 * d } else { left[i] + d };
        let r = |i: usize| if i == n - 1 { width - 0.5 * d } else { right[i] - d };
        let forward_rail = |i: usize| if i.is_multiple_of(2) { yt } else { yb };
        let return_rail = |i: usize| if i.is_multiple_of(2) { yb } else { yt };
        let p = |x: f64, y: f64| Vec3::new(x, y, 0.0);

        let start = p(l(0), yb);
        starts.push(start);
        verts.push(start);
        verts.push(p(l(0), yt));
        for i in 0..n {
            let y = forward_rail(i);
            if i > 0 {
                verts.push(p(l(i), y));
            }
            verts.push(p(r(i), y));
        }
        verts.push(p(r(n - 1), yt));
        for i in (0..n).rev() {
            let y = return_rail(i);
            if i < n - 1 {
                verts.push(p(r(i), y));
            }
            if i > 0 {
                verts.push(p(l(i), y));
            }
        }
        if spec.turns_per_lobe > 1 {
            verts.push(start);
        }
    }
    if spec.turns_per_lobe > 1 {
        let first = starts[0];
        let last = *starts.last().expect("at least one turn");
        push_return_lead(&mut verts, first, last, lead_lift(&spec.material));
    }
    WirePath::new(verts, true, spec.material.clone())
}

/// Concentric rectangular turns all wound counter-clockwise.
pub fn build_helical_path(spec: &HelicalSpec) -> Result<WirePath> {
    spec.validate()?;
    let (w, h) = (spec.footprint_width, spec.footprint_height);
    let mut verts = Vec::new();
    let mut starts = Vec::new();
    for k in 0..spec.turns {
        let d = k as f64 * spec.turn_spacing;
        let start = Vec3::new(d, d, 0.0);
        starts.push(start);
        verts.push(start);
        verts.push(Vec3::new(w - d, d, 0.0));
        verts.push(Vec3::new(w - d, h - d, 0.0));
        verts.push(Vec3::new(d, h - d, 0.0));
        if spec.turns > 1 {
            verts.push(start);
        }
    }
    if spec.turns > 1 {
        push_return_lead(&mut verts, starts[0], starts[spec.turns - 1], lead_lift(&spec.material));
    }
    WirePath::new(verts, true, spec.material.clone())
}

/// Square or circular multi-turn loop centred on the origin, normal +z.
///
/// Circles are polygonised with chords no longer than
/// [`DEFAULT_MAX_SEGMENT`].
pub fn build_loop_path(spec: &LoopSpec) -> Result<WirePath> {
    spec.validate()?;
    let mut verts = Vec::new();
    let mut starts = Vec::new();
    for k in 0..spec.turns {
        let inset = k as f64 * spec.turn_spacing;
        match spec.shape {
            LoopShape::Square { side_length } => {
                let a = 0.5 * side_length - inset;
                let start = Vec3::new(-a, -a, 0.0);
                starts.push(start);
                verts.push(start);
                verts.push(Vec3::new(a, -a, 0.0));
                verts.push(Vec3::new(a, a, 0.0));
                verts.push(Vec3::new(-a, a, 0.0));
            }
            LoopShape::Circle { radius } => {
                let r = radius - inset;
                let n = ((2.0 * std::f64::consts::PI * r / DEFAULT_MAX_SEGMENT).ceil() as usize)
                    .max(8);
                starts.push(Vec3::new(r, 0.0, 0.0));
                for j in 0..n {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    verts.push(Vec3::new(r * t.cos(), r * t.sin(), 0.0));
                }
            }
        }
        if spec.turns > 1 {
            verts.push(starts[k]);
        }
    }
    if spec.turns > 1 {
        push_return_lead(&mut verts, starts[0], starts[spec.turns - 1], lead_lift(&spec.material));
    }
    WirePath::new(verts, true, spec.material.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lm() -> ConductorMaterial {
        ConductorMaterial::liquid_metal_thread()
    }

    fn meander(width: f64, height: f64, lobes: usize, turns: usize, gap: f64) -> MeanderSpec {
        MeanderSpec {
            footprint_width: width,
            footprint_height: height,
            lobe_count: lobes,
            turns_per_lobe: turns,
            lobe_spacing: gap,
            standoff: DEFAULT_STANDOFF,
            material: lm(),
        }
    }

    /// Shoelace area of a rectangle-with-triangles lobe region, computed from
    /// the lobe's bounding rails and crossing points, independent of the
    /// builder's traversal.
    fn polygon_area(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len();
        0.5 * (0..n)
            .map(|i| {
                let (x0, y0) = pts[i];
                let (x1, y1) = pts[(i + 1) % n];
                x0 * y1 - x1 * y0
            })
            .sum::<f64>()
    }

    #[test]
    fn two_lobe_pair_cancels() {
        let g = 0.01;
        // footprint chosen so that each lobe encloses 0.1 × 0.1 m
        let spec = meander(0.2 + 0.5 * g, 0.1, 2, 1, g);
        assert!((spec.lobe_area() - 0.01).abs() < 1e-15);
        let path = build_meander_path(&spec).unwrap();
        assert!(path.signed_area_xy().abs() <= 1e-9 * spec.lobe_area());

        // lobe regions: rectangle plus the triangle out to the crossing point
        let v = path.vertices();
        let (xc, yc) = (0.5 * spec.footprint_width, 0.05);
        let lobe0 = [(v[0].x, 0.0), (v[0].x, 0.1), (v[2].x, 0.1), (xc, yc), (v[2].x, 0.0)];
        let a0 = polygon_area(&lobe0);
        assert!((a0.abs() - 0.01).abs() < 1e-12, "lobe 0 area {a0}");
    }

    #[test]
    fn lobes_alternate_with_equal_area() {
        let spec = meander(0.6, 0.3, 8, 1, 0.01);
        let path = build_meander_path(&spec).unwrap();
        // Split the closed chain at each crossing: lobe i is bounded by its
        // two rails and the gap centres on either side.
        let g = spec.lobe_spacing;
        let w = spec.rail_width();
        let h = spec.footprint_height;
        let mut lefts = vec![0.0];
        let mut x = w + 0.25 * g;
        let mut rights = vec![x];
        for i in 1..8 {
            x += g;
            lefts.push(x);
            x += if i == 7 { w + 0.25 * g } else { w };
            rights.push(x);
        }
        let mut areas = Vec::new();
        for i in 0..8 {
            let (l, r) = (lefts[i], rights[i]);
            let mut poly = Vec::new();
            if i == 0 {
                poly.extend([(l, 0.0), (l, h)]);
            } else {
                poly.extend([(l - 0.5 * g, 0.5 * h), (l, h)]);
            }
            poly.push((r, h));
            if i < 7 {
                poly.push((r + 0.5 * g, 0.5 * h));
            }
            poly.push((r, 0.0));
            if i > 0 {
                poly.push((l, 0.0));
            }
            areas.push(polygon_area(&poly).abs());
        }
        for a in &areas {
            assert!((a - spec.lobe_area()).abs() < 1e-12, "{areas:?}");
        }
        assert!(path.signed_area_xy().abs() <= 1e-9 * spec.lobe_area());
        // the chain closes on its starting vertex after the last rail
        assert_eq!(path.vertices().last().unwrap().x, spec.rail_width() + 0.25 * g);
    }

    #[test]
    fn lobe_orientation_alternates() {
        // probe winding via the field direction proxy: the vertex order of
        // lobe 0 (left edge up, then right along the top) is clockwise.
        let spec = meander(0.4, 0.2, 4, 1, 0.01);
        let v = build_meander_path(&spec).unwrap().vertices().to_vec();
        assert!(v[1].y > v[0].y && v[2].x > v[1].x && v[2].y == v[1].y);
        // forward pass: lobe 1 rail at the bottom, lobe 2 back at the top
        assert_eq!(v[3].y, 0.0);
        assert_eq!(v[5].y, 0.2);
    }

    #[test]
    fn eight_lobe_length_matches_perimeter_sum() {
        let spec = meander(0.6, 0.3, 8, 1, 0.01);
        let (g, h) = (spec.lobe_spacing, spec.footprint_height);
        // oracle: every lobe contributes its two rails; end lobes also their
        // outer edge; every gap contributes two crossing diagonals.
        let w = (0.6 + 0.5 * g) / 8.0 - g;
        let rails = 2.0 * (6.0 * w + 2.0 * (w + 0.25 * g));
        let edges = 2.0 * h;
        let diagonals = 7.0 * 2.0 * (g * g + h * h).sqrt();
        let expected = rails + edges + diagonals;
        let path = build_meander_path(&spec).unwrap();
        assert!((path.length() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn multi_turn_meander_still_cancels() {
        let spec = meander(0.6, 0.3, 8, 3, 0.01);
        let path = build_meander_path(&spec).unwrap();
        assert!(path.signed_area_xy().abs() <= 1e-9 * spec.lobe_area());
        assert!(path.vertices().len() > 3 * 30);
    }

    #[test]
    fn meander_rejections() {
        assert!(build_meander_path(&meander(0.6, 0.3, 7, 1, 0.01)).is_err());
        assert!(build_meander_path(&meander(0.6, 0.3, 0, 1, 0.01)).is_err());
        // spacing below the 1 mm wire diameter
        assert!(matches!(
            build_meander_path(&meander(0.6, 0.3, 8, 1, 0.0005)),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(build_meander_path(&meander(0.06, 0.3, 8, 1, 0.01)).is_err());
    }

    #[test]
    fn body_scale_garment_hosts_receiver_at_point_four_percent() {
        // 4 × 4 cm receiver on a 0.4 m² garment footprint
        let spec = meander(1.0, 0.4, 16, 1, 0.01);
        assert!(build_meander_path(&spec).is_ok());
        let frac = super::super::coverage_fraction(0.04 * 0.04, spec.footprint_area()).unwrap();
        assert!((frac - 0.004).abs() < 1e-12);
    }

    #[test]
    fn meander_is_mirror_symmetric() {
        let spec = meander(0.6, 0.3, 8, 2, 0.012);
        let path = build_meander_path(&spec).unwrap();
        let key = |x: f64, y: f64| ((x * 1e9).round() as i64, (y * 1e9).round() as i64);
        let mut orig: Vec<_> = path.vertices().iter().map(|v| key(v.x, v.y)).collect();
        let mut mirrored: Vec<_> = path
            .vertices()
            .iter()
            .map(|v| key(spec.footprint_width - v.x, v.y))
            .collect();
        orig.sort();
        orig.dedup();
        mirrored.sort();
        mirrored.dedup();
        // transitions and the return lead sit at the left end only
        let interior = |k: &(i64, i64)| k.0 > 10_000_000 && k.0 < 590_000_000;
        let a: Vec<_> = orig.iter().filter(|k| interior(k)).collect();
        let b: Vec<_> = mirrored.iter().filter(|k| interior(k)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn single_turn_helical_is_its_rectangle() {
        let spec = HelicalSpec {
            footprint_width: 0.1,
            footprint_height: 0.1,
            turns: 1,
            turn_spacing: 0.0,
            standoff: DEFAULT_STANDOFF,
            material: lm(),
        };
        let p = build_helical_path(&spec).unwrap();
        assert!((p.signed_area_xy() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn five_turn_helical_area_is_shoelace_sum() {
        let spec = HelicalSpec {
            footprint_width: 0.1,
            footprint_height: 0.1,
            turns: 5,
            turn_spacing: 0.002,
            standoff: DEFAULT_STANDOFF,
            material: lm(),
        };
        let expected: f64 = (0..5)
            .map(|k| {
                let d = 0.002 * k as f64;
                polygon_area(&[(d, d), (0.1 - d, d), (0.1 - d, 0.1 - d), (d, 0.1 - d)])
            })
            .sum();
        let p = build_helical_path(&spec).unwrap();
        assert!((p.signed_area_xy() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn helical_on_meander_footprint_has_net_area() {
        let spec = HelicalSpec {
            footprint_width: 0.6,
            footprint_height: 0.3,
            turns: 5,
            turn_spacing: 0.02,
            standoff: DEFAULT_STANDOFF,
            material: lm(),
        };
        assert!(build_helical_path(&spec).unwrap().signed_area_xy() > 0.0);
        let too_many = HelicalSpec { turns: 10, ..spec };
        assert!(build_helical_path(&too_many).is_err());
    }

    #[test]
    fn circle_loop_length() {
        let spec = LoopSpec {
            shape: LoopShape::Circle { radius: 0.05 },
            turns: 1,
            turn_spacing: 0.0,
            material: lm(),
        };
        let p = build_loop_path(&spec).unwrap();
        let r = super::super::resample_path(&p, 1e-3).unwrap();
        assert!(r.segment_count() >= 314);
        let c = 2.0 * PI * 0.05;
        assert!((r.length() - c).abs() < 1e-3 * c);
    }

    #[test]
    fn square_loop_lengths() {
        let single = LoopSpec {
            shape: LoopShape::Square { side_length: 0.04 },
            turns: 1,
            turn_spacing: 0.0,
            material: lm(),
        };
        assert!((build_loop_path(&single).unwrap().length() - 0.16).abs() < 1e-15);

        let triple = LoopSpec {
            shape: LoopShape::Square { side_length: 0.03 },
            turns: 3,
            turn_spacing: 0.001,
            material: ConductorMaterial::copper(0.2e-3),
        };
        // oracle: concentric perimeters plus transitions out and the lifted
        // lead back (diagonal run, two risers)
        let perimeters: f64 = (0..3).map(|k| 4.0 * (0.03 - 2.0 * 0.001 * k as f64)).sum();
        let diag = 2.0 * 0.001 * 2f64.sqrt();
        let lift = 4.0 * 0.2e-3;
        let expected = perimeters + 2.0 * diag + 2.0 * lift;
        let len = build_loop_path(&triple).unwrap().length();
        assert!((len - expected).abs() < 1e-14, "{len} vs {expected}");
    }

    #[test]
    fn loop_rejects_bad_dimensions() {
        let bad = LoopSpec {
            shape: LoopShape::Circle { radius: -0.01 },
            turns: 1,
            turn_spacing: 0.0,
            material: lm(),
        };
        assert!(build_loop_path(&bad).is_err());
    }
}
