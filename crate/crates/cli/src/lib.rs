//! Command-line front end for `floquet-pt`: configuration, figure presets,
//! command runners and file output.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use thiserror::Error;

pub use commands::{run, Command, Report};
pub use config::{parse_config, ConfigError, RunConfig};
pub use presets::FigurePreset;

pub const THREADS_ENV: &str = "FLOQUET_PT_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Merges preset, config file and overrides, in that order, and validates
/// the result.
pub fn load_config(
    preset: Option<&str>,
    path: Option<&Path>,
    sets: &[String],
) -> Result<RunConfig, CliError> {
    let mut doc = Value::Object(Map::new());
    if let Some(name) = preset {
        config::merge(&mut doc, &name.parse::<FigurePreset>()?.document());
    }
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        config::merge(&mut doc, &config::parse_document(&text)?);
    }
    config::merge(&mut doc, &config::overrides_layer(sets)?);
    Ok(parse_config(&doc)?)
}

/// Reads the thread cap from the environment value, if any.
pub fn threads_from_env(value: Option<&str>) -> Result<usize, ConfigError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v.parse().map_err(|_| ConfigError::MalformedNumber {
            key: THREADS_ENV.into(),
            found: v.into(),
        }),
    }
}
