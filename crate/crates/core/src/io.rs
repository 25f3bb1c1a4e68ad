//! JSON file plumbing: the monomer system format plus generic typed
//! readers/writers that attach the file path to every error.
//!
//! Serialization uses serde_json's default f64 formatting (shortest decimal
//! that round-trips), so a written file read back reproduces every value
//! bit-exactly.

use crate::pauli::{Connectivity, MonomerData};
use crate::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk description of an exciton system: per-monomer electronic data and
/// the retained-pair policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub monomers: Vec<MonomerData>,
    pub connectivity: Connectivity,
}

impl SystemFile {
    pub fn new(monomers: Vec<MonomerData>, connectivity: Connectivity) -> Self {
        SystemFile {
            monomers,
            connectivity,
        }
    }

    /// Shape check: the connectivity must address exactly these monomers.
    pub fn validate(&self) -> Result<()> {
        if self.connectivity.n_sites != self.monomers.len() {
            return Err(Error::InvalidInput(format!(
                "connectivity is for {} sites but {} monomers are listed",
                self.connectivity.n_sites,
                self.monomers.len()
            )));
        }
        Ok(())
    }
}

/// Read and deserialize a JSON file into any serde-deserializable type.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Serialize a value as pretty-printed JSON and write it to `path`.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Read a system file and shape-check it.
pub fn read_system(path: impl AsRef<Path>) -> Result<SystemFile> {
    let system: SystemFile = read_json(path)?;
    system.validate()?;
    Ok(system)
}

pub fn write_system(path: impl AsRef<Path>, system: &SystemFile) -> Result<()> {
    write_json(path, system)
}
