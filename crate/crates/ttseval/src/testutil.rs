//! Shared signal generators for unit tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::audio_io::AudioBuffer;

pub(crate) fn tone(freq: f64, rate: u32, secs: f64, amp: f64) -> AudioBuffer {
    let n = (rate as f64 * secs) as usize;
    let samples = (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).sin() * amp)
        .collect();
    AudioBuffer::new(samples, rate).unwrap()
}

/// Deterministic speech-like noise: seeded white noise through a
/// one-pole lowpass, which tilts the spectrum toward low frequencies.
pub(crate) fn speechlike_noise(rate: u32, secs: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (rate as f64 * secs) as usize;
    let mut prev = 0.0f64;
    let samples = (0..n)
        .map(|_| {
            let white: f64 = rng.random_range(-1.0..1.0);
            prev = 0.9 * prev + 0.3 * white;
            prev
        })
        .collect();
    AudioBuffer::new(samples, rate).unwrap()
}

/// FFT peak frequency of a signal, refined with quadratic interpolation.
pub(crate) fn dominant_frequency(buffer: &AudioBuffer) -> f64 {
    let n = buffer.len().next_power_of_two() * 2;
    let mut data: Vec<Complex64> = buffer
        .samples()
        .iter()
        .map(|&s| Complex64::new(s, 0.0))
        .collect();
    data.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut data);
    let mags: Vec<f64> = data[..n / 2].iter().map(|c| c.norm()).collect();
    let (peak, _) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let bin = if peak > 0 && peak + 1 < mags.len() {
        let (a, b, c) = (mags[peak - 1], mags[peak], mags[peak + 1]);
        let denom = a - 2.0 * b + c;
        let delta = if denom.abs() > 1e-12 {
            0.5 * (a - c) / denom
        } else {
            0.0
        };
        peak as f64 + delta
    } else {
        peak as f64
    };
    bin * buffer.sample_rate_hz() as f64 / n as f64
}
