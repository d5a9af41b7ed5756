//! JSON state files.
//!
//! A state file is a JSON object `{"n": <int>, "amplitudes": [[re, im], ...]}`
//! with exactly 2^n entries in ascending basis-index order. Writers emit full
//! double precision (the shortest representation that round-trips).

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{PureState, StateError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("malformed state file {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },

    #[error("invalid state: {0}")]
    State(#[from] StateError),
}

/// Wire form of a state file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl From<&PureState> for StateFile {
    fn from(s: &PureState) -> StateFile {
        StateFile {
            n: s.n(),
            amplitudes: s.amplitudes().to_vec(),
        }
    }
}

impl StateFile {
    /// Validate and convert into a state.
    pub fn into_state(self) -> Result<PureState, StateError> {
        PureState::new(self.n, self.amplitudes)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateFile::from(self).serialize(serializer)
    }
}

pub fn read_state(path: &Path) -> Result<PureState, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: StateFile = serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    Ok(file.into_state()?)
}

pub fn write_state(path: &Path, s: &PureState) -> Result<(), IoError> {
    let mut text = serde_json::to_string(&StateFile::from(s)).expect("state serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
