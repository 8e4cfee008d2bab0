use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("zero-length segment at vertex {index}")]
    DegenerateSegment { index: usize },

    #[error("observation point lies inside the conductor (distance {distance:.3e} m < wire radius {radius:.3e} m)")]
    PointInsideConductor { distance: f64, radius: f64 },

    #[error("conductors overlap (minimum separation {separation:.3e} m < {required:.3e} m)")]
    OverlappingConductors { separation: f64, required: f64 },

    #[error("self-inductance requires a closed path")]
    OpenPath,

    #[error("empty evaluation grid")]
    EmptyGrid,

    #[error("field maps were computed on different grids")]
    GridMismatch,

    #[error("degenerate link: mesh equations are singular")]
    DegenerateLink,

    #[error("no points in the body regions")]
    EmptyBodyRegion,

    #[error("sensor band registry has overlapping bands: `{0}` and `{1}`")]
    OverlappingBands(String, String),

    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Rejects non-positive or non-finite values.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {value}")))
    }
}
