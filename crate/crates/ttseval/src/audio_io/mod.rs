//! Mono PCM audio: in-memory buffers, WAV files and resampling.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{read_wav, write_wav};

use thiserror::Error;

/// Errors for audio IO and resampling.
#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed wav: {0}")]
    MalformedWav(String),
    #[error("unsupported encoding: format tag {format_tag}, {bits_per_sample} bits per sample")]
    UnsupportedEncoding {
        format_tag: u16,
        bits_per_sample: u16,
    },
    #[error("expected mono audio, found {channels} channels")]
    MultiChannelUnsupported { channels: u16 },
    #[error("invalid sample rate: {0}")]
    InvalidRate(String),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

/// A single-channel waveform with its sample rate.
///
/// Samples are nominally in `[-1, 1]`; intermediate DSP results may
/// exceed that range and are only clamped when written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    /// Builds a buffer, rejecting a zero rate and non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self, AudioError> {
        if sample_rate_hz == 0 {
            return Err(AudioError::InvalidRate("sample rate must be > 0".into()));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AudioError::NonFiniteSample(idx));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}
