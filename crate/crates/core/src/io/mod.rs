//! Config loading, CSV export and atomic file emission.

mod config;
mod csv;
mod emit;

pub use self::config::{apply_overrides, from_value, load_json, parse_override, read_config};
pub use self::csv::{curve_csv, far_field_csv, field_csv, path_csv, sweep_csv, CsvTable};
pub use self::emit::{emit, write_atomic, Artifact, Manifest, ManifestEntry, Report, RunOutput};
