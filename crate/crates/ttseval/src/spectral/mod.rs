//! Framed spectral analysis: STFT/ISTFT, mel filterbanks, log-mel
//! spectrograms, mel cepstra and per-frame energy.

mod mel;
mod stft;

pub use mel::{hz_to_mel, mel_cepstrum, mel_filterbank, mel_to_hz, log_mel_spectrogram};
pub use stft::{frame_energy, istft, stft};

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floor applied to mel energies before taking the natural log.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid params: {0}")]
    InvalidParams(String),
    #[error("params do not satisfy constant overlap-add: {0}")]
    NonInvertibleParams(String),
    #[error("invalid frequency range: {0}")]
    InvalidRange(String),
    #[error("filterbank mismatch: {0}")]
    RateMismatch(String),
    #[error("cepstral order {order} needs {required} mel bands, filterbank has {n_mels}")]
    OrderTooHigh {
        order: usize,
        required: usize,
        n_mels: usize,
    },
}

/// Analysis configuration shared by the STFT and everything framed on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralParams {
    /// FFT size in samples; must be a power of two.
    pub n_fft: usize,
    /// Window length in samples, at most `n_fft`.
    pub win_length: usize,
    /// Frame shift in samples.
    pub hop_length: usize,
    /// Reflect-pad the signal by `n_fft / 2` so frames are centered.
    pub center: bool,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            n_fft: 1024,
            win_length: 1024,
            hop_length: 256,
            center: true,
        }
    }
}

impl SpectralParams {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.n_fft == 0 || !self.n_fft.is_power_of_two() {
            return Err(SpectralError::InvalidParams(format!(
                "n_fft must be a power of two, got {}",
                self.n_fft
            )));
        }
        if self.hop_length == 0 || self.hop_length > self.win_length || self.win_length > self.n_fft
        {
            return Err(SpectralError::InvalidParams(format!(
                "need 0 < hop_length <= win_length <= n_fft, got hop {}, win {}, n_fft {}",
                self.hop_length, self.win_length, self.n_fft
            )));
        }
        Ok(())
    }

    /// Number of retained FFT bins (`n_fft / 2 + 1`).
    pub fn num_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    pub(crate) fn pad(&self) -> usize {
        if self.center {
            self.n_fft / 2
        } else {
            0
        }
    }

    /// Frame count for a signal of `num_samples`:
    /// `1 + floor((padded - n_fft) / hop)`.
    pub fn num_frames(&self, num_samples: usize) -> usize {
        let padded = num_samples + 2 * self.pad();
        if padded < self.n_fft {
            0
        } else {
            1 + (padded - self.n_fft) / self.hop_length
        }
    }

    /// Center of frame `t` in signal coordinates.
    pub fn frame_center(&self, frame: usize) -> usize {
        frame * self.hop_length + (self.n_fft / 2 - self.pad())
    }

    /// Whether squared-Hann overlap-add reconstruction is possible.
    pub fn satisfies_cola(&self) -> bool {
        self.hop_length <= self.win_length / 2
    }

    /// Periodic Hann window of `win_length`, zero-padded centered into
    /// an `n_fft`-sized frame.
    pub(crate) fn padded_window(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_fft];
        let offset = (self.n_fft - self.win_length) / 2;
        for i in 0..self.win_length {
            let phase = 2.0 * std::f64::consts::PI * i as f64 / self.win_length as f64;
            w[offset + i] = 0.5 - 0.5 * phase.cos();
        }
        w
    }
}

/// One-sided complex STFT: `frames x (n_fft/2 + 1)` bins.
#[derive(Debug, Clone)]
pub struct ComplexSpectrogram {
    bins: Array2<Complex64>,
    params: SpectralParams,
    sample_rate_hz: u32,
}

impl ComplexSpectrogram {
    pub fn from_bins(
        bins: Array2<Complex64>,
        params: SpectralParams,
        sample_rate_hz: u32,
    ) -> Result<Self, SpectralError> {
        params.validate()?;
        if bins.ncols() != params.num_bins() {
            return Err(SpectralError::InvalidParams(format!(
                "expected {} bins per frame, got {}",
                params.num_bins(),
                bins.ncols()
            )));
        }
        if bins.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SpectralError::InvalidParams(
                "spectrogram contains non-finite entries".into(),
            ));
        }
        Ok(Self {
            bins,
            params,
            sample_rate_hz,
        })
    }

    pub fn bins(&self) -> &Array2<Complex64> {
        &self.bins
    }

    pub fn num_frames(&self) -> usize {
        self.bins.nrows()
    }

    pub fn params(&self) -> &SpectralParams {
        &self.params
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// Per-bin magnitudes, same shape as the complex bins.
    pub fn magnitudes(&self) -> Array2<f64> {
        self.bins.mapv(|c| c.norm())
    }
}

/// Triangular mel filterbank over FFT bin center frequencies.
///
/// Rows are peak-normalized: each filter's maximum weight is 1.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Array2<f64>,
    f_min: f64,
    f_max: f64,
    sample_rate_hz: u32,
    n_fft: usize,
}

impl MelFilterbank {
    /// Wraps an explicit weight matrix (`n_mels x bins`).
    pub fn from_weights(
        weights: Array2<f64>,
        f_min: f64,
        f_max: f64,
        sample_rate_hz: u32,
        n_fft: usize,
    ) -> Result<Self, SpectralError> {
        if weights.ncols() != n_fft / 2 + 1 {
            return Err(SpectralError::RateMismatch(format!(
                "weights have {} columns, n_fft {} implies {}",
                weights.ncols(),
                n_fft,
                n_fft / 2 + 1
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(SpectralError::InvalidRange(
                "filterbank weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            weights,
            f_min,
            f_max,
            sample_rate_hz,
            n_fft,
        })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn n_mels(&self) -> usize {
        self.weights.nrows()
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }
}

/// Log-mel spectrogram (natural log, floored at [`LOG_FLOOR`]).
#[derive(Debug, Clone)]
pub struct MelSpectrogram {
    values: Array2<f64>,
    params: SpectralParams,
    sample_rate_hz: u32,
}

impl MelSpectrogram {
    pub fn from_values(
        values: Array2<f64>,
        params: SpectralParams,
        sample_rate_hz: u32,
    ) -> Result<Self, SpectralError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidParams(
                "mel spectrogram contains non-finite entries".into(),
            ));
        }
        Ok(Self {
            values,
            params,
            sample_rate_hz,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn num_frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_mels(&self) -> usize {
        self.values.ncols()
    }

    pub fn params(&self) -> &SpectralParams {
        &self.params
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }
}

/// Mel-cepstral coefficients `mc_0 .. mc_D` per frame.
#[derive(Debug, Clone)]
pub struct MelCepstrum {
    coeffs: Array2<f64>,
}

impl MelCepstrum {
    pub(crate) fn new(coeffs: Array2<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn num_frames(&self) -> usize {
        self.coeffs.nrows()
    }

    /// The cepstral order D (`columns - 1`).
    pub fn order(&self) -> usize {
        self.coeffs.ncols().saturating_sub(1)
    }
}
