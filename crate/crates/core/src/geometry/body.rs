use serde::{Deserialize, Serialize};

use super::WirePath;
use crate::error::{ensure_positive, Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Shell,
    Exterior,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Interior, Region::Shell, Region::Exterior];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Shell => "shell",
            Region::Exterior => "exterior",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        match s {
            "interior" => Some(Region::Interior),
            "shell" => Some(Region::Shell),
            "exterior" => Some(Region::Exterior),
            _ => None,
        }
    }
}

/// Labelled evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    points: Vec<Vec3>,
    regions: Vec<Region>,
}

impl EvalGrid {
    pub fn new(points: Vec<Vec3>, regions: Vec<Region>) -> Result<Self> {
        if points.len() != regions.len() {
            return Err(Error::InvalidGeometry(format!(
                "{} points but {} region labels",
                points.len(),
                regions.len()
            )));
        }
        Ok(Self { points, regions })
    }

    /// Every point labelled `region`.
    pub fn uniform(points: Vec<Vec3>, region: Region) -> Self {
        let regions = vec![region; points.len()];
        Self { points, regions }
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, region: Region) -> usize {
        self.regions.iter().filter(|&&r| r == region).count()
    }
}

fn default_axis_direction() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

fn default_radius() -> f64 {
    0.15
}

fn default_height() -> f64 {
    0.6
}

fn default_resolution() -> f64 {
    0.01
}

fn default_shell() -> f64 {
    0.01
}

fn default_margin() -> f64 {
    0.03
}

/// Upright cylinder standing in for the torso.
///
/// The axis runs from `axis_origin` along `axis_direction` for `height`.
/// Azimuth zero points along the local x axis of the body frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyModel {
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default)]
    pub axis_origin: Vec3,
    #[serde(default = "default_axis_direction")]
    pub axis_direction: Vec3,
    #[serde(default = "default_resolution")]
    pub grid_resolution: f64,
    #[serde(default = "default_shell")]
    pub shell_thickness: f64,
    /// Radial extent of exterior sample points beyond the body surface.
    #[serde(default = "default_margin")]
    pub exterior_margin: f64,
}

impl Default for BodyModel {
    fn default() -> Self {
        Self {
            radius: default_radius(),
            height: default_height(),
            axis_origin: Vec3::ZERO,
            axis_direction: default_axis_direction(),
            grid_resolution: default_resolution(),
            shell_thickness: default_shell(),
            exterior_margin: default_margin(),
        }
    }
}

impl BodyModel {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("radius", self.radius)?;
        ensure_positive("height", self.height)?;
        ensure_positive("grid_resolution", self.grid_resolution)?;
        ensure_positive("shell_thickness", self.shell_thickness)?;
        if self.shell_thickness >= self.radius {
            return Err(Error::param("shell_thickness", "must be smaller than the radius"));
        }
        if !(self.exterior_margin >= 0.0 && self.exterior_margin.is_finite()) {
            return Err(Error::param("exterior_margin", "must be non-negative"));
        }
        ensure_positive("axis_direction", self.axis_direction.norm())
    }

    /// Orthonormal body frame `(e1, e2, axis)`.
    fn frame(&self) -> (Vec3, Vec3, Vec3) {
        let a = self.axis_direction.normalized();
        let helper = if a.x.abs() < 0.9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 1.0, 0.0)
        };
        let e1 = (helper - a * helper.dot(a)).normalized();
        let e2 = a.cross(e1);
        (e1, e2, a)
    }

    /// World position of cylindrical body coordinates.
    pub fn cylindrical_point(&self, radial: f64, azimuth: f64, axial: f64) -> Vec3 {
        let (e1, e2, a) = self.frame();
        self.axis_origin + e1 * (radial * azimuth.cos()) + e2 * (radial * azimuth.sin()) + a * axial
    }

    /// Unit tangent, axis and outward normal at the given azimuth.
    fn surface_frame(&self, azimuth: f64) -> (Vec3, Vec3, Vec3) {
        let (e1, e2, a) = self.frame();
        let normal = e1 * azimuth.cos() + e2 * azimuth.sin();
        let tangent = e2 * azimuth.cos() - e1 * azimuth.sin();
        (tangent, a, normal)
    }

    pub fn radial_distance(&self, p: Vec3) -> f64 {
        let (_, _, a) = self.frame();
        let d = p - self.axis_origin;
        (d - a * d.dot(a)).norm()
    }

    pub fn region_of(&self, p: Vec3) -> Option<Region> {
        let (_, _, a) = self.frame();
        let axial = (p - self.axis_origin).dot(a);
        if axial < -1e-12 || axial > self.height + 1e-12 {
            return None;
        }
        let r = self.radial_distance(p);
        if r < self.radius - self.shell_thickness {
            Some(Region::Interior)
        } else if r <= self.radius {
            Some(Region::Shell)
        } else if r <= self.radius + self.exterior_margin {
            Some(Region::Exterior)
        } else {
            None
        }
    }

    /// Cartesian lattice at `grid_resolution`, centred on the axis, covering
    /// the body and the exterior margin over the body height.
    pub fn grid(&self) -> Result<EvalGrid> {
        self.validate()?;
        let h = self.grid_resolution;
        let reach = self.radius + self.exterior_margin;
        let n_lat = (reach / h).floor() as i64;
        let n_ax = (self.height / h).floor() as i64;
        let (e1, e2, a) = self.frame();
        let mut points = Vec::new();
        let mut regions = Vec::new();
        for k in 0..=n_ax {
            for j in -n_lat..=n_lat {
                for i in -n_lat..=n_lat {
                    let p = self.axis_origin
                        + e1 * (i as f64 * h)
                        + e2 * (j as f64 * h)
                        + a * (k as f64 * h);
                    if let Some(r) = self.region_of(p) {
                        points.push(p);
                        regions.push(r);
                    }
                }
            }
        }
        EvalGrid::new(points, regions)
    }

    /// Wraps a flat coil around the body.
    ///
    /// Flat coordinates `(u, v, w)` map to arc length around the body at
    /// radius `radius + standoff`, axial height and extra radial offset. The
    /// flat point `anchor` lands at (`azimuth`, `axial`). Resample the flat
    /// path first: straight segments stay straight chords.
    pub fn wrap(
        &self,
        flat: &WirePath,
        anchor: (f64, f64),
        standoff: f64,
        azimuth: f64,
        axial: f64,
    ) -> Result<WirePath> {
        self.validate()?;
        let base = self.radius + standoff;
        flat.map_vertices(|v| {
            let theta = azimuth + (v.x - anchor.0) / base;
            self.cylindrical_point(base + v.z, theta, axial + (v.y - anchor.1))
        })
    }

    /// Places a flat coil (normal +z) tangent to the body at the given
    /// cylindrical position; flat x runs along the azimuthal tangent, y
    /// along the axis and +z points outward.
    pub fn place_tangent(
        &self,
        flat: &WirePath,
        radial: f64,
        azimuth: f64,
        axial: f64,
    ) -> Result<WirePath> {
        let centre = self.cylindrical_point(radial, azimuth, axial);
        let (t, a, n) = self.surface_frame(azimuth);
        flat.map_vertices(|v| centre + t * v.x + a * v.y + n * v.z)
    }
}
