use serde::{Deserialize, Serialize};

use super::par_map;
use crate::error::{Error, Result};
use crate::geometry::WirePath;
use crate::vec3::segment_segment_distance;
use crate::{Vec3, MU0};

const MU0_OVER_4PI: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InductanceResult {
    /// Henries.
    pub value: f64,
    pub quadrature_segments: usize,
    /// Relative change when every pair is integrated one quadrature order
    /// lower; a proxy for quadrature error.
    pub estimated_relative_error: f64,
}

// Gauss-Legendre nodes and weights on [0, 1].
const GL1: [(f64, f64); 1] = [(0.5, 1.0)];
const GL2: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];
const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_7, 0.173_927_422_568_726_9),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_1),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_1),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_9),
];
const GL8: [(f64, f64); 8] = [
    (0.019_855_071_751_231_9, 0.050_614_268_145_188_1),
    (0.101_666_761_293_186_6, 0.111_190_517_226_687_2),
    (0.237_233_795_041_835_5, 0.156_853_322_938_943_6),
    (0.408_282_678_752_175_1, 0.181_341_891_689_181_1),
    (0.591_717_321_247_824_9, 0.181_341_891_689_181_1),
    (0.762_766_204_958_164_5, 0.156_853_322_938_943_6),
    (0.898_333_238_706_813_4, 0.111_190_517_226_687_2),
    (0.980_144_928_248_768_1, 0.050_614_268_145_188_1),
];

fn rule(order: usize) -> &'static [(f64, f64)] {
    match order {
        1 => &GL1,
        2 => &GL2,
        4 => &GL4,
        _ => &GL8,
    }
}

/// Quadrature order from the separation-to-length ratio of a segment pair.
fn order_for(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3) -> usize {
    let la = a0.distance(a1);
    let lb = b0.distance(b1);
    let d = ((a0 + a1) * 0.5).distance((b0 + b1) * 0.5);
    let ratio = d / la.max(lb);
    if ratio > 8.0 {
        1
    } else if ratio > 3.0 {
        2
    } else if ratio > 1.0 {
        4
    } else {
        8
    }
}

/// `∫∫ dl_a·dl_b / r` over two straight filaments with the given rule.
fn filament_pair(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3, order: usize) -> f64 {
    let da = a1 - a0;
    let db = b1 - b0;
    let dot = da.dot(db);
    if dot == 0.0 {
        return 0.0;
    }
    let q = rule(order);
    let mut acc = 0.0;
    for &(s, ws) in q {
        let pa = a0 + da * s;
        for &(t, wt) in q {
            acc += ws * wt / pa.distance(b0 + db * t);
        }
    }
    dot * acc
}

/// `∫∫ dl_a·dl_b / √(r² + a²)` with each segment split into `pieces`
/// sub-segments and a Gauss rule of `order` on every sub-pair.
fn regularised_pair(
    a0: Vec3,
    a1: Vec3,
    b0: Vec3,
    b1: Vec3,
    radius: f64,
    pieces: usize,
    order: usize,
) -> f64 {
    let da = (a1 - a0) / pieces as f64;
    let db = (b1 - b0) / pieces as f64;
    let dot = da.dot(db);
    if dot == 0.0 {
        return 0.0;
    }
    let a2 = radius * radius;
    let q = rule(order);
    let mut acc = 0.0;
    for i in 0..pieces {
        let sa = a0 + da * i as f64;
        for j in 0..pieces {
            let sb = b0 + db * j as f64;
            for &(s, ws) in q {
                let pa = sa + da * s;
                for &(t, wt) in q {
                    let r2 = (pa - (sb + db * t)).norm_sq();
                    acc += ws * wt / (r2 + a2).sqrt();
                }
            }
        }
    }
    dot * acc
}

/// Self-inductance pair term: far pairs use the plain kernel, near pairs
/// (including segments sharing a vertex) the wire-radius regularised one.
fn self_pair_with_check(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3, radius: f64) -> (f64, f64) {
    let order = order_for(a0, a1, b0, b1);
    if order < 8 {
        return pair_with_check(a0, a1, b0, b1);
    }
    let len = a0.distance(a1).max(b0.distance(b1));
    let pieces = ((len / radius).ceil() as usize).clamp(1, 8);
    let hi = regularised_pair(a0, a1, b0, b1, radius, pieces, 8);
    let lo = regularised_pair(a0, a1, b0, b1, radius, pieces, 4);
    (hi, lo)
}

/// Quadrature at the selected order and one order lower.
fn pair_with_check(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3) -> (f64, f64) {
    let order = order_for(a0, a1, b0, b1);
    let hi = filament_pair(a0, a1, b0, b1, order);
    let lo = if order == 1 {
        hi
    } else {
        filament_pair(a0, a1, b0, b1, order / 2)
    };
    (hi, lo)
}

/// Partial self-inductance (H) of a straight round wire, mean distance `a`.
pub fn partial_self_inductance(length: f64, radius: f64) -> f64 {
    let l = length;
    let a = radius;
    let s = (l * l + a * a).sqrt();
    (MU0 / (2.0 * std::f64::consts::PI)) * (l * ((l + s) / a).ln() - s + a)
}

/// Minimum distance between any two segments of the two paths.
pub fn min_separation(a: &WirePath, b: &WirePath) -> f64 {
    let sb = b.segment_list();
    par_map(&a.segment_list(), |&(a0, a1)| {
        sb.iter()
            .map(|&(b0, b1)| segment_segment_distance(a0, a1, b0, b1))
            .fold(f64::INFINITY, f64::min)
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

fn bounding_box(v: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in v {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    (lo, hi)
}

fn box_gap(alo: Vec3, ahi: Vec3, blo: Vec3, bhi: Vec3) -> f64 {
    let dx = (blo.x - ahi.x).max(alo.x - bhi.x).max(0.0);
    let dy = (blo.y - ahi.y).max(alo.y - bhi.y).max(0.0);
    let dz = (blo.z - ahi.z).max(alo.z - bhi.z).max(0.0);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn relative_change(hi: f64, lo: f64) -> f64 {
    if hi == 0.0 {
        if lo == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((hi - lo) / hi).abs()
    }
}

/// Mutual inductance (H) between two disjoint conductor paths via the
/// Neumann double sum over their straight segments.
pub fn mutual_inductance(a: &WirePath, b: &WirePath) -> Result<InductanceResult> {
    let required = a.wire_radius() + b.wire_radius();
    let (alo, ahi) = bounding_box(a.vertices());
    let (blo, bhi) = bounding_box(b.vertices());
    if box_gap(alo, ahi, blo, bhi) <= required {
        let separation = min_separation(a, b);
        if separation <= required {
            return Err(Error::OverlappingConductors {
                separation,
                required,
            });
        }
    }
    let sa = a.segment_list();
    let sb = b.segment_list();
    let rows = par_map(&sa, |&(a0, a1)| {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for &(b0, b1) in &sb {
            let (h, l) = pair_with_check(a0, a1, b0, b1);
            hi += h;
            lo += l;
        }
        (hi, lo)
    });
    let (hi, lo) = rows
        .into_iter()
        .fold((0.0, 0.0), |(h, l), (rh, rl)| (h + rh, l + rl));
    Ok(InductanceResult {
        value: MU0_OVER_4PI * hi,
        quadrature_segments: sa.len() + sb.len(),
        estimated_relative_error: relative_change(hi, lo),
    })
}

/// Self-inductance (H) of a closed path.
///
/// Neumann sum over distinct segment pairs plus the straight-wire partial
/// self-inductance of every segment. The partial self term is the Neumann
/// self-integral with kernel `1/√(r² + a²)`, `a` the wire radius; near pairs
/// use the same regularised kernel so that short segments (length of a few
/// wire radii) stay consistent with it.
pub fn self_inductance(path: &WirePath) -> Result<InductanceResult> {
    if !path.is_closed() {
        return Err(Error::OpenPath);
    }
    let radius = path.wire_radius();
    let segs = path.segment_list();
    let indices: Vec<usize> = (0..segs.len()).collect();
    let rows = par_map(&indices, |&i| {
        let (a0, a1) = segs[i];
        let mut hi = 0.0;
        let mut lo = 0.0;
        for &(b0, b1) in &segs[i + 1..] {
            let (h, l) = self_pair_with_check(a0, a1, b0, b1, radius);
            hi += h;
            lo += l;
        }
        (hi, lo)
    });
    let (hi, lo) = rows
        .into_iter()
        .fold((0.0, 0.0), |(h, l), (rh, rl)| (h + rh, l + rl));
    let partial: f64 = segs
        .iter()
        .map(|&(a0, a1)| partial_self_inductance(a0.distance(a1), radius))
        .sum();
    let value = partial + 2.0 * MU0_OVER_4PI * hi;
    let value_lo = partial + 2.0 * MU0_OVER_4PI * lo;
    Ok(InductanceResult {
        value,
        quadrature_segments: segs.len(),
        estimated_relative_error: relative_change(value, value_lo),
    })
}
