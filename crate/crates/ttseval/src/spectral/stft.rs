//! Forward and inverse short-time Fourier transforms.
//!
//! Analysis uses a periodic Hann window and optional reflect padding of
//! `n_fft / 2`. Synthesis is windowed overlap-add normalized by the
//! accumulated squared window, which makes `istft(stft(x))` exact on
//! the retained region.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::audio_io::AudioBuffer;

use super::{ComplexSpectrogram, SpectralError, SpectralParams};

/// Reflection index (edge samples not repeated) with bounce for short signals.
fn reflect_index(i: isize, len: usize) -> usize {
    debug_assert!(len > 0);
    if len == 1 {
        return 0;
    }
    let period = 2 * (len - 1) as isize;
    let mut j = i.rem_euclid(period);
    if j >= len as isize {
        j = period - j;
    }
    j as usize
}

fn padded_sample(samples: &[f64], idx: isize, pad: usize) -> f64 {
    samples[reflect_index(idx - pad as isize, samples.len())]
}

/// Short-time Fourier transform of a mono buffer.
///
/// Bin `k` of each frame is the windowed DFT at frequency
/// `k * sample_rate / n_fft`.
pub fn stft(
    buffer: &AudioBuffer,
    params: &SpectralParams,
) -> Result<ComplexSpectrogram, SpectralError> {
    params.validate()?;
    if buffer.is_empty() {
        return Err(SpectralError::InvalidParams("buffer is empty".into()));
    }

    let n_fft = params.n_fft;
    let n_bins = params.num_bins();
    let frames = params.num_frames(buffer.len());
    let window = params.padded_window();
    let pad = params.pad();
    let samples = buffer.samples();

    let fft = FftPlanner::new().plan_fft_forward(n_fft);
    let mut bins = Array2::zeros((frames, n_bins));
    let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
    for t in 0..frames {
        let start = (t * params.hop_length) as isize;
        for (i, slot) in frame.iter_mut().enumerate() {
            *slot = Complex64::new(padded_sample(samples, start + i as isize, pad) * window[i], 0.0);
        }
        fft.process(&mut frame);
        for k in 0..n_bins {
            bins[(t, k)] = frame[k];
        }
    }

    ComplexSpectrogram::from_bins(bins, *params, buffer.sample_rate_hz())
}

/// Inverse STFT by squared-window overlap-add.
///
/// Requires `hop_length <= win_length / 2` (Hann overlap-add); for
/// centered analysis the output length is `(frames - 1) * hop_length`.
pub fn istft(spec: &ComplexSpectrogram) -> Result<AudioBuffer, SpectralError> {
    let params = spec.params();
    params.validate()?;
    if !params.satisfies_cola() {
        return Err(SpectralError::NonInvertibleParams(format!(
            "hop {} > win {} / 2",
            params.hop_length, params.win_length
        )));
    }

    let n_fft = params.n_fft;
    let hop = params.hop_length;
    let frames = spec.num_frames();
    let window = params.padded_window();
    let pad = params.pad();

    if frames == 0 {
        return AudioBuffer::new(Vec::new(), spec.sample_rate_hz());
    }

    let full_len = n_fft + (frames - 1) * hop;
    let mut acc = vec![0.0f64; full_len];
    let mut wsum = vec![0.0f64; full_len];

    let fft = FftPlanner::new().plan_fft_inverse(n_fft);
    let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
    for t in 0..frames {
        // Rebuild the full spectrum from the one-sided half.
        for k in 0..params.num_bins() {
            frame[k] = spec.bins()[(t, k)];
        }
        for k in 1..n_fft / 2 {
            frame[n_fft - k] = spec.bins()[(t, k)].conj();
        }
        fft.process(&mut frame);
        let start = t * hop;
        for i in 0..n_fft {
            let sample = frame[i].re / n_fft as f64;
            acc[start + i] += sample * window[i];
            wsum[start + i] += window[i] * window[i];
        }
    }

    let out_start = pad;
    let out_end = full_len - pad;
    let out = acc[out_start..out_end]
        .iter()
        .zip(&wsum[out_start..out_end])
        .map(|(&num, &den)| if den > 1e-11 { num / den } else { 0.0 })
        .collect();
    AudioBuffer::new(out, spec.sample_rate_hz())
}

/// Per-frame energy: the L2 norm over the retained magnitude bins.
pub fn frame_energy(spec: &ComplexSpectrogram) -> Vec<f64> {
    spec.bins()
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}
