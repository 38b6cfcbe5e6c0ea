//! Sample-rate conversion with a polyphase windowed-sinc filter.
//!
//! The prototype lowpass is a Blackman-windowed sinc with 64 taps per
//! phase and its cutoff at 0.95 of the smaller Nyquist frequency. Each
//! phase is normalized to unit gain so DC passes exactly.

use super::{AudioBuffer, AudioError};

const TAPS_PER_PHASE: usize = 64;
const CUTOFF_RATIO: f64 = 0.95;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn blackman(k: usize, len: usize) -> f64 {
    let x = k as f64 / (len - 1) as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    0.42 - 0.5 * (two_pi * x).cos() + 0.08 * (2.0 * two_pi * x).cos()
}

/// Prototype lowpass for an `up`/`down` rational rate change.
///
/// Taps are laid out for polyphase use: phase `p` of output sample `n`
/// reads `h[p + j*up]` against input `x[i0 - j]`.
fn prototype(up: usize, source_rate: u32, target_rate: u32) -> Vec<f64> {
    let len = TAPS_PER_PHASE * up + 1;
    let center = (len - 1) / 2;
    let cutoff_hz = CUTOFF_RATIO * 0.5 * source_rate.min(target_rate) as f64;
    // Cutoff in cycles per upsampled sample; gain `up` restores the
    // amplitude lost to zero insertion.
    let fc = cutoff_hz / (source_rate as f64 * up as f64);
    let mut h: Vec<f64> = (0..len)
        .map(|k| {
            let t = k as f64 - center as f64;
            up as f64 * 2.0 * fc * sinc(2.0 * fc * t) * blackman(k, len)
        })
        .collect();
    // Unit DC gain per phase.
    for p in 0..up {
        let sum: f64 = h.iter().skip(p).step_by(up).sum();
        if sum.abs() > 1e-12 {
            for tap in h.iter_mut().skip(p).step_by(up) {
                *tap /= sum;
            }
        }
    }
    h
}

/// Resamples the buffer to `target_rate_hz`.
///
/// The output holds `round(len * target/source)` samples. Resampling to
/// the source rate returns the input unchanged.
pub fn resample(buffer: &AudioBuffer, target_rate_hz: u32) -> Result<AudioBuffer, AudioError> {
    if target_rate_hz == 0 {
        return Err(AudioError::InvalidRate(
            "target sample rate must be > 0".into(),
        ));
    }
    let source_rate = buffer.sample_rate_hz();
    if target_rate_hz == source_rate {
        return Ok(buffer.clone());
    }

    let g = gcd(source_rate as u64, target_rate_hz as u64);
    let up = (target_rate_hz as u64 / g) as usize;
    let down = (source_rate as u64 / g) as usize;
    let h = prototype(up, source_rate, target_rate_hz);
    let center = (h.len() - 1) / 2;

    let x = buffer.samples();
    let out_len = ((x.len() as u128 * target_rate_hz as u128 * 2 + source_rate as u128)
        / (source_rate as u128 * 2)) as usize;

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        // Output n sits at upsampled position n*down; offset by the
        // filter center so the kernel is anchored at that instant.
        let m = n * down + center;
        let phase = m % up;
        let i0 = m / up;
        let mut acc = 0.0;
        let mut j = 0usize;
        let mut tap = phase;
        while tap < h.len() && j <= i0 {
            let i = i0 - j;
            if i < x.len() {
                acc += h[tap] * x[i];
            }
            j += 1;
            tap += up;
        }
        out.push(acc);
    }

    AudioBuffer::new(out, target_rate_hz)
}
