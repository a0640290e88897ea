//! File formats, parallel Monte Carlo drivers and scenario orchestration on
//! top of [`perforate_core`].

use std::fs;
use std::path::Path;

pub use perforate_core as core;

pub mod cloud;
pub mod config;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod render;
pub mod reports;
pub mod scenario;

mod error;

pub use error::{Error, Result};

/// Name of the environment variable holding the output root.
pub const OUTPUT_ROOT_ENV: &str = "PERFORATE_OUTPUT_ROOT";

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
