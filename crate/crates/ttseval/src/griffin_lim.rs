//! Mel-spectrogram-to-waveform synthesis: pseudo-inverse mel inversion
//! followed by Griffin-Lim phase reconstruction.
//!
//! The core loop alternates `x <- istft(mag * exp(i * angle(stft(x))))`
//! starting from a configured initial phase. Optional momentum gives
//! the fast variant; at momentum 0 the spectral-convergence error is
//! non-increasing.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio_io::AudioBuffer;
use crate::spectral::{
    istft, stft, ComplexSpectrogram, MelFilterbank, MelSpectrogram, SpectralError, SpectralParams,
};

#[derive(Debug, Error)]
pub enum VocoderError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid vocoder config: {0}")]
    InvalidConfig(String),
    #[error("mel filterbank pseudo-inverse failed: {0}")]
    PseudoInverse(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("audio error: {0}")]
    Audio(#[from] crate::audio_io::AudioError),
}

/// Initial phase for the first iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseInit {
    /// All-zero phase; fully deterministic without a seed.
    Zero,
    /// Uniform random phase from a seeded generator.
    SeededRandom { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GriffinLimConfig {
    pub n_iters: usize,
    pub init_phase: PhaseInit,
    /// Fast-Griffin-Lim momentum in `[0, 1)`; 0 is the plain algorithm.
    pub momentum: f64,
}

impl Default for GriffinLimConfig {
    fn default() -> Self {
        Self {
            n_iters: 60,
            init_phase: PhaseInit::Zero,
            momentum: 0.0,
        }
    }
}

impl GriffinLimConfig {
    pub fn validate(&self) -> Result<(), VocoderError> {
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(VocoderError::InvalidConfig(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

/// Inverts a log-mel spectrogram to a linear magnitude spectrogram.
///
/// Applies the Moore-Penrose pseudo-inverse of the filterbank to
/// `exp(mel)` and clamps negatives to zero. Output is
/// `frames x (n_fft/2 + 1)`, elementwise nonnegative.
pub fn mel_to_linear(
    mel: &MelSpectrogram,
    fb: &MelFilterbank,
) -> Result<Array2<f64>, VocoderError> {
    if mel.n_mels() != fb.n_mels() {
        return Err(VocoderError::ShapeMismatch(format!(
            "mel has {} bands, filterbank has {}",
            mel.n_mels(),
            fb.n_mels()
        )));
    }
    if mel.params().n_fft != fb.n_fft() {
        return Err(VocoderError::ShapeMismatch(format!(
            "mel built with n_fft {}, filterbank with {}",
            mel.params().n_fft,
            fb.n_fft()
        )));
    }

    let pinv = pseudo_inverse(fb.weights())?;
    let energies = mel.values().mapv(f64::exp);
    let linear = energies.dot(&pinv.t());
    Ok(linear.mapv(|v| v.max(0.0)))
}

/// Moore-Penrose pseudo-inverse of an `m x n` matrix, as `n x m`.
fn pseudo_inverse(w: &Array2<f64>) -> Result<Array2<f64>, VocoderError> {
    let (rows, cols) = (w.nrows(), w.ncols());
    let m = nalgebra::DMatrix::from_row_iterator(rows, cols, w.iter().cloned());
    let max_sv = m
        .clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let pinv = m
        .pseudo_inverse(max_sv * 1e-12)
        .map_err(|e| VocoderError::PseudoInverse(e.to_string()))?;
    Ok(Array2::from_shape_fn((cols, rows), |(i, j)| pinv[(i, j)]))
}

fn initial_angles(shape: (usize, usize), init: PhaseInit) -> Array2<Complex64> {
    match init {
        PhaseInit::Zero => Array2::from_elem(shape, Complex64::new(1.0, 0.0)),
        PhaseInit::SeededRandom { seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            Array2::from_shape_fn(shape, |_| {
                let theta: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                Complex64::from_polar(1.0, theta)
            })
        }
    }
}

/// Unit-modulus projection; a zero bin keeps zero phase.
fn unit_phase(c: Complex64) -> Complex64 {
    let norm = c.norm();
    if norm > 1e-300 {
        c / norm
    } else {
        Complex64::new(1.0, 0.0)
    }
}

fn frobenius(mag: &Array2<f64>) -> f64 {
    mag.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Griffin-Lim phase reconstruction for a magnitude spectrogram.
pub fn griffin_lim(
    mag: &Array2<f64>,
    params: &SpectralParams,
    sample_rate_hz: u32,
    cfg: &GriffinLimConfig,
) -> Result<AudioBuffer, VocoderError> {
    griffin_lim_traced(mag, params, sample_rate_hz, cfg).map(|(buf, _)| buf)
}

/// Like [`griffin_lim`], also returning the spectral-convergence error
/// `||stft(x_k)| - mag||_F / ||mag||_F` of the estimate entering each
/// iteration.
pub fn griffin_lim_traced(
    mag: &Array2<f64>,
    params: &SpectralParams,
    sample_rate_hz: u32,
    cfg: &GriffinLimConfig,
) -> Result<(AudioBuffer, Vec<f64>), VocoderError> {
    params.validate().map_err(VocoderError::Spectral)?;
    cfg.validate()?;
    if !params.satisfies_cola() {
        return Err(VocoderError::Spectral(SpectralError::NonInvertibleParams(
            format!("hop {} > win {} / 2", params.hop_length, params.win_length),
        )));
    }
    if mag.ncols() != params.num_bins() {
        return Err(VocoderError::ShapeMismatch(format!(
            "magnitude has {} bins, params imply {}",
            mag.ncols(),
            params.num_bins()
        )));
    }
    if mag.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(VocoderError::ShapeMismatch(
            "magnitudes must be finite and nonnegative".into(),
        ));
    }

    let mag_norm = frobenius(mag);
    let as_complex = |angles: &Array2<Complex64>| -> Array2<Complex64> {
        let mut est = angles.clone();
        est.zip_mut_with(mag, |a, &m| *a *= m);
        est
    };

    let mut angles = initial_angles(mag.dim(), cfg.init_phase);
    let mut prev: Option<Array2<Complex64>> = None;
    let mut trace = Vec::with_capacity(cfg.n_iters);
    let beta = cfg.momentum / (1.0 + cfg.momentum);

    for _ in 0..cfg.n_iters {
        let estimate =
            ComplexSpectrogram::from_bins(as_complex(&angles), *params, sample_rate_hz)?;
        let inverse = istft(&estimate)?;
        if inverse.is_empty() {
            break;
        }
        let rebuilt = stft(&inverse, params)?.bins().clone();
        let err = if mag_norm > 0.0 {
            let diff: f64 = rebuilt
                .iter()
                .zip(mag.iter())
                .map(|(c, &m)| (c.norm() - m) * (c.norm() - m))
                .sum();
            diff.sqrt() / mag_norm
        } else {
            0.0
        };
        trace.push(err);

        let mut update = rebuilt.clone();
        if let Some(p) = &prev {
            update.zip_mut_with(p, |u, &t| *u -= t * beta);
        }
        prev = Some(rebuilt);
        angles = update.mapv(unit_phase);
    }

    let final_spec = ComplexSpectrogram::from_bins(as_complex(&angles), *params, sample_rate_hz)?;
    let out = istft(&final_spec)?;
    Ok((out, trace))
}
