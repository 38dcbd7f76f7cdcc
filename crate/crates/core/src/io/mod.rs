//! Instance generation, trip-log ingestion and the JSON interchange formats.

mod generate;
mod schema;
mod trips;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use generate::{generate_instance, GenConfig};
pub use schema::{
    instance_from_json, instance_to_json, matching_from_json, matching_to_json, InstanceDoc, MatchingDoc, Parsed,
    SCHEMA_VERSION,
};
pub use trips::{ingest_trips, IngestConfig, Ingested, TRIP_COLUMNS};

use crate::model::{Instance, ModelError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schema_version {0}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("matching references unknown {kind} `{id}`")]
    UnknownReference { kind: &'static str, id: String },
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("trip input: {0}")]
    Trips(String),
}

pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, instance_to_json(instance)).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads an instance file. Unknown fields are ignored and returned as
/// warnings (also logged).
pub fn load_instance(path: impl AsRef<Path>) -> Result<Parsed<Instance>, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = instance_from_json(&text)?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed)
}
