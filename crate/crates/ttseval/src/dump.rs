//! Versioned per-utterance feature container.
//!
//! One JSON record per utterance holding the analysis parameters and
//! the framed feature streams in row-major order. Writing is
//! deterministic: the same inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pitch::PitchParams;
use crate::prosody::{AttentionMatrix, ProsodyError};
use crate::spectral::SpectralParams;

pub const DUMP_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad dump encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dump schema version {found} unsupported (this toolkit reads {supported})")]
    SchemaVersion { found: u32, supported: u32 },
    #[error("dump shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Attention(#[from] ProsodyError),
}

/// A `frames x dim` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramedMatrix {
    pub frames: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl FramedMatrix {
    pub fn from_array(values: &Array2<f64>) -> Self {
        Self {
            frames: values.nrows(),
            dim: values.ncols(),
            data: values.iter().cloned().collect(),
        }
    }

    pub fn to_array(&self) -> Result<Array2<f64>, DumpError> {
        if self.data.len() != self.frames * self.dim {
            return Err(DumpError::ShapeMismatch(format!(
                "{} x {} declared but {} values present",
                self.frames,
                self.dim,
                self.data.len()
            )));
        }
        Ok(Array2::from_shape_vec((self.frames, self.dim), self.data.clone())
            .expect("shape checked above"))
    }
}

/// Everything extracted from one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDump {
    pub schema_version: u32,
    pub utterance_id: String,
    pub sample_rate_hz: u32,
    pub spectral: SpectralParams,
    pub n_mels: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub cepstral_order: usize,
    pub pitch: PitchParams,
    pub log_mel: FramedMatrix,
    pub mel_cepstrum: FramedMatrix,
    pub f0_hz: Vec<f64>,
    pub energy: Vec<f64>,
    /// Optional `frames x tokens` attention record.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attention: Option<FramedMatrix>,
}

impl FeatureDump {
    /// Decodes the optional attention record into a validated matrix.
    pub fn attention_matrix(&self) -> Result<Option<AttentionMatrix>, DumpError> {
        match &self.attention {
            None => Ok(None),
            Some(framed) => Ok(Some(AttentionMatrix::new(framed.to_array()?)?)),
        }
    }
}

pub fn save_dump(dump: &FeatureDump, path: &Path) -> Result<(), DumpError> {
    let json = serde_json::to_string(dump)?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_dump(path: &Path) -> Result<FeatureDump, DumpError> {
    let text = fs::read_to_string(path)?;
    let dump: FeatureDump = serde_json::from_str(&text)?;
    if dump.schema_version != DUMP_SCHEMA_VERSION {
        return Err(DumpError::SchemaVersion {
            found: dump.schema_version,
            supported: DUMP_SCHEMA_VERSION,
        });
    }
    dump.log_mel.to_array()?;
    dump.mel_cepstrum.to_array()?;
    Ok(dump)
}
