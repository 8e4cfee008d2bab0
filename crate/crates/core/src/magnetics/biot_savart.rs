use crate::error::{Error, Result};
use crate::geometry::WirePath;
use crate::{Vec3, MU0};

/// Field of a straight filament from `a` to `b` carrying unit current,
/// without the `μ0/4π` prefactor, together with the distance from `p` to
/// the segment.
///
/// Closed form `(r1 × r2)(|r1| + |r2|) / (|r1||r2|(|r1||r2| + r1·r2))`, exact
/// for a straight segment.
#[inline]
pub fn segment_field(a: Vec3, b: Vec3, p: Vec3) -> (Vec3, f64) {
    let r1 = p - a;
    let r2 = p - b;
    let ab = b - a;
    let len_sq = ab.norm_sq();
    let t = (r1.dot(ab) / len_sq).clamp(0.0, 1.0);
    let dist = (r1 - ab * t).norm();
    let n1 = r1.norm();
    let n2 = r2.norm();
    let denom = n1 * n2 * (n1 * n2 + r1.dot(r2));
    if denom <= 0.0 {
        return (Vec3::ZERO, dist);
    }
    (r1.cross(r2) * ((n1 + n2) / denom), dist)
}

/// Flux density (T) at `point` from `current` flowing along `path`.
pub fn biot_savart_at(path: &WirePath, current: f64, point: Vec3) -> Result<Vec3> {
    let radius = path.wire_radius();
    let mut acc = Vec3::ZERO;
    for (index, (a, b)) in path.segments().enumerate() {
        if a == b {
            return Err(Error::DegenerateSegment { index });
        }
        let (f, dist) = segment_field(a, b, point);
        if dist < radius {
            return Err(Error::PointInsideConductor { distance: dist, radius });
        }
        acc += f;
    }
    Ok(acc * (MU0 * current / (4.0 * std::f64::consts::PI)))
}
