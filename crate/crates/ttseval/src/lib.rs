//! Speech-synthesis evaluation and signal-processing toolkit.
//!
//! The crate provides the pieces needed to score generated speech against
//! reference recordings and to run the non-neural half of a synthesis
//! pipeline:
//!
//! - [`audio_io`] — WAV read/write and windowed-sinc resampling.
//! - [`spectral`] — STFT/ISTFT, mel filterbanks, log-mel spectrograms,
//!   mel cepstra and per-frame energy.
//! - [`pitch`] — YIN fundamental-frequency estimation with
//!   voiced/unvoiced decisions.
//! - [`metrics`] — DTW alignment, mel-cepstral distortion, log-F0 RMSE,
//!   character error rate and MOS statistics.
//! - [`griffin_lim`] — mel inversion and iterative phase reconstruction.
//! - [`prosody`] — duration extraction from attention weights,
//!   token-averaged features and random-window sampling.
//! - [`corpus`] — TSV manifests, utterance pairing and evaluation
//!   configuration.
//! - [`dump`] — the versioned per-utterance feature container.
//! - [`report`] — report records and table rendering.
//! - [`commands`] — the batch pipelines behind the `ttseval` binary.

pub mod audio_io;
pub mod commands;
pub mod corpus;
pub mod dump;
pub mod griffin_lim;
pub mod metrics;
pub mod pitch;
pub mod prosody;
pub mod report;
pub mod spectral;

#[cfg(test)]
pub(crate) mod testutil;

pub use audio_io::AudioBuffer;
pub use corpus::{EvalConfig, Manifest};
pub use metrics::DtwPath;
pub use pitch::{PitchParams, PitchTrack};
pub use spectral::{MelCepstrum, MelFilterbank, MelSpectrogram, SpectralParams};

/// Crate version string embedded in report provenance.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
