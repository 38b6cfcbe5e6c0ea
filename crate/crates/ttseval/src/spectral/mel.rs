//! Mel filterbanks, log-mel spectrograms and mel cepstra.
//!
//! The mel scale is the HTK formula `m(f) = 2595 log10(1 + f/700)`.
//! Filters are triangles with centers equally spaced in mel, peak
//! normalized so every row has maximum weight 1. The mel cepstrum is
//! the orthonormal DCT-II of each log-mel frame truncated to the
//! requested order.

use ndarray::{Array1, Array2};

use crate::audio_io::AudioBuffer;

use super::{
    stft, ComplexSpectrogram, MelCepstrum, MelFilterbank, MelSpectrogram, SpectralError,
    SpectralParams, LOG_FLOOR,
};

/// Hz to mel, HTK convention.
pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

/// Mel to Hz, inverse of [`hz_to_mel`].
pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Builds a triangular mel filterbank for the given analysis setup.
pub fn mel_filterbank(
    n_mels: usize,
    params: &SpectralParams,
    sample_rate_hz: u32,
    f_min: f64,
    f_max: f64,
) -> Result<MelFilterbank, SpectralError> {
    params.validate()?;
    let nyquist = sample_rate_hz as f64 / 2.0;
    if n_mels < 2 {
        return Err(SpectralError::InvalidRange(format!(
            "n_mels must be >= 2, got {n_mels}"
        )));
    }
    if !(0.0 <= f_min && f_min < f_max && f_max <= nyquist) {
        return Err(SpectralError::InvalidRange(format!(
            "need 0 <= f_min < f_max <= {nyquist}, got [{f_min}, {f_max}]"
        )));
    }

    let n_bins = params.num_bins();
    let bin_hz = sample_rate_hz as f64 / params.n_fft as f64;
    let mel_lo = hz_to_mel(f_min);
    let mel_hi = hz_to_mel(f_max);
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
        .collect();

    let mut weights = Array2::zeros((n_mels, n_bins));
    for m in 0..n_mels {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        let mut row_max = 0.0f64;
        for k in 0..n_bins {
            let f = k as f64 * bin_hz;
            let rising = (f - left) / (center - left);
            let falling = (right - f) / (right - center);
            let w = rising.min(falling).max(0.0);
            weights[(m, k)] = w;
            row_max = row_max.max(w);
        }
        if row_max <= 0.0 {
            return Err(SpectralError::InvalidRange(format!(
                "mel filter {m} has no FFT bin in its support; lower n_mels or raise n_fft"
            )));
        }
        for k in 0..n_bins {
            weights[(m, k)] /= row_max;
        }
    }

    MelFilterbank::from_weights(weights, f_min, f_max, sample_rate_hz, params.n_fft)
}

/// Log-mel spectrogram: `ln(max(fb . |X|, LOG_FLOOR))` per frame.
pub fn log_mel_spectrogram(
    buffer: &AudioBuffer,
    params: &SpectralParams,
    fb: &MelFilterbank,
) -> Result<MelSpectrogram, SpectralError> {
    let spec = stft(buffer, params)?;
    log_mel_from_spectrogram(&spec, fb)
}

/// Same as [`log_mel_spectrogram`] but starting from an existing STFT.
pub fn log_mel_from_spectrogram(
    spec: &ComplexSpectrogram,
    fb: &MelFilterbank,
) -> Result<MelSpectrogram, SpectralError> {
    if fb.n_fft() != spec.params().n_fft || fb.sample_rate_hz() != spec.sample_rate_hz() {
        return Err(SpectralError::RateMismatch(format!(
            "filterbank built for n_fft {} at {} Hz, spectrogram has n_fft {} at {} Hz",
            fb.n_fft(),
            fb.sample_rate_hz(),
            spec.params().n_fft,
            spec.sample_rate_hz()
        )));
    }
    let mags = spec.magnitudes();
    let mel = mags.dot(&fb.weights().t());
    let values = mel.mapv(|v| v.max(LOG_FLOOR).ln());
    MelSpectrogram::from_values(values, *spec.params(), spec.sample_rate_hz())
}

/// Orthonormal DCT-II of one frame, truncated to `order + 1` coefficients.
fn dct_frame(frame: &[f64], order: usize) -> Array1<f64> {
    let n = frame.len();
    let mut out = Array1::zeros(order + 1);
    for k in 0..=order {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        let mut acc = 0.0;
        for (i, &x) in frame.iter().enumerate() {
            acc += x * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
        out[k] = scale * acc;
    }
    out
}

/// Mel cepstrum `mc_0 .. mc_order` of each log-mel frame.
pub fn mel_cepstrum(mel: &MelSpectrogram, order: usize) -> Result<MelCepstrum, SpectralError> {
    let n_mels = mel.n_mels();
    if order + 1 > n_mels {
        return Err(SpectralError::OrderTooHigh {
            order,
            required: order + 1,
            n_mels,
        });
    }
    let frames = mel.num_frames();
    let mut coeffs = Array2::zeros((frames, order + 1));
    for t in 0..frames {
        let row = mel.values().row(t);
        let c = dct_frame(row.as_slice().expect("row-major layout"), order);
        coeffs.row_mut(t).assign(&c);
    }
    Ok(MelCepstrum::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::speechlike_noise;
    use ndarray::Array2;
    use proptest::prelude::*;

    #[test]
    fn mel_scale_reference_points() {
        // 2595 * log10(2) by hand.
        assert!((hz_to_mel(700.0) - 781.1728387480312).abs() < 1e-9);
        assert_eq!(hz_to_mel(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn mel_scale_is_invertible(f in 1e-3f64..11025.0) {
            let back = mel_to_hz(hz_to_mel(f));
            prop_assert!((back - f).abs() / f < 1e-6);
        }
    }

    #[test]
    fn filterbank_rows_are_peak_normalized_triangles() {
        let params = SpectralParams::default();
        let fb = mel_filterbank(80, &params, 22050, 0.0, 11025.0).unwrap();
        for row in fb.weights().rows() {
            let max = row.iter().cloned().fold(0.0f64, f64::max);
            assert!((max - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&w| w >= 0.0));
            // Support is one contiguous run.
            let nonzero: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(k, _)| k)
                .collect();
            for pair in nonzero.windows(2) {
                assert_eq!(pair[1], pair[0] + 1);
            }
        }
    }

    #[test]
    fn filterbank_rejects_bad_ranges() {
        let params = SpectralParams::default();
        assert!(matches!(
            mel_filterbank(80, &params, 22050, 0.0, 12000.0),
            Err(SpectralError::InvalidRange(_))
        ));
        assert!(matches!(
            mel_filterbank(80, &params, 22050, 500.0, 400.0),
            Err(SpectralError::InvalidRange(_))
        ));
        assert!(matches!(
            mel_filterbank(1, &params, 22050, 0.0, 11025.0),
            Err(SpectralError::InvalidRange(_))
        ));
    }

    #[test]
    fn zero_signal_hits_the_log_floor() {
        let params = SpectralParams::default();
        let fb = mel_filterbank(80, &params, 22050, 0.0, 11025.0).unwrap();
        let buf = AudioBuffer::new(vec![0.0; 8192], 22050).unwrap();
        let mel = log_mel_spectrogram(&buf, &params, &fb).unwrap();
        let floor = LOG_FLOOR.ln();
        assert!((floor + 23.025850929940457).abs() < 1e-12);
        assert!(mel.values().iter().all(|&v| v == floor));
        assert_eq!(mel.num_frames(), params.num_frames(8192));
    }

    #[test]
    fn doubling_amplitude_adds_ln2() {
        let params = SpectralParams::default();
        let fb = mel_filterbank(80, &params, 22050, 0.0, 11025.0).unwrap();
        let buf = speechlike_noise(22050, 0.3, 11);
        let scaled = AudioBuffer::new(
            buf.samples().iter().map(|s| s * 2.0).collect(),
            buf.sample_rate_hz(),
        )
        .unwrap();
        let a = log_mel_spectrogram(&buf, &params, &fb).unwrap();
        let b = log_mel_spectrogram(&scaled, &params, &fb).unwrap();
        let ln2 = 2.0f64.ln();
        let floor = LOG_FLOOR.ln();
        for (x, y) in a.values().iter().zip(b.values().iter()) {
            if *x > floor + 1.0 {
                assert!((y - x - ln2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn log_mel_rejects_mismatched_filterbank() {
        let params = SpectralParams::default();
        let fb = mel_filterbank(80, &params, 16000, 0.0, 8000.0).unwrap();
        let buf = speechlike_noise(22050, 0.1, 5);
        assert!(matches!(
            log_mel_spectrogram(&buf, &params, &fb),
            Err(SpectralError::RateMismatch(_))
        ));
    }

    /// Inverse orthonormal DCT-II, used as the round-trip oracle.
    fn idct(coeffs: &[f64], n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| {
                        let scale = if k == 0 {
                            (1.0 / n as f64).sqrt()
                        } else {
                            (2.0 / n as f64).sqrt()
                        };
                        scale
                            * c
                            * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64
                                / (2 * n) as f64)
                                .cos()
                    })
                    .sum()
            })
            .collect()
    }

    fn mel_from_raw(values: Array2<f64>) -> MelSpectrogram {
        MelSpectrogram::from_values(values, SpectralParams::default(), 22050).unwrap()
    }

    #[test]
    fn constant_frame_puts_everything_in_c0() {
        let n = 24;
        let c = -3.75;
        let mel = mel_from_raw(Array2::from_elem((1, n), c));
        let mc = mel_cepstrum(&mel, n - 1).unwrap();
        assert!((mc.coeffs()[(0, 0)] - c * (n as f64).sqrt()).abs() < 1e-9);
        for k in 1..n {
            assert!(mc.coeffs()[(0, k)].abs() < 1e-9);
        }
    }

    #[test]
    fn full_order_dct_round_trips() {
        let n = 16;
        let frame: Vec<f64> = (0..n).map(|i| ((i * i) as f64 * 0.13).sin() * 4.0).collect();
        let mel = mel_from_raw(Array2::from_shape_vec((1, n), frame.clone()).unwrap());
        let mc = mel_cepstrum(&mel, n - 1).unwrap();
        let back = idct(mc.coeffs().row(0).as_slice().unwrap(), n);
        for (x, y) in frame.iter().zip(&back) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_frame_gives_zero_cepstrum() {
        let mel = mel_from_raw(Array2::zeros((3, 20)));
        let mc = mel_cepstrum(&mel, 12).unwrap();
        assert!(mc.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(mc.order(), 12);
        assert_eq!(mc.num_frames(), 3);
    }

    #[test]
    fn order_too_high_is_rejected() {
        let mel = mel_from_raw(Array2::zeros((1, 10)));
        assert!(matches!(
            mel_cepstrum(&mel, 10),
            Err(SpectralError::OrderTooHigh { .. })
        ));
    }
}
