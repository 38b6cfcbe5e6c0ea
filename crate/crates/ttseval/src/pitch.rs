//! Frame-synchronous F0 estimation with the YIN algorithm.
//!
//! Each frame takes a segment of `4 / f0_min` seconds centered on the
//! frame, computes the cumulative-mean-normalized difference function,
//! picks the first dip below the voicing threshold, walks down to its
//! local minimum and refines the lag with parabolic interpolation.
//! Frames without a dip are unvoiced and carry an F0 of 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio_io::AudioBuffer;
use crate::spectral::SpectralParams;

#[derive(Debug, Error)]
pub enum PitchError {
    #[error("buffer too short: {samples} samples, need at least {required} (2 / f0_min)")]
    TooShort { samples: usize, required: usize },
    #[error("invalid pitch params: {0}")]
    InvalidParams(String),
}

/// Search range and voicing threshold for F0 extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchParams {
    pub f0_min: f64,
    pub f0_max: f64,
    pub voicing_threshold: f64,
}

impl Default for PitchParams {
    fn default() -> Self {
        Self {
            f0_min: 70.0,
            f0_max: 400.0,
            voicing_threshold: 0.15,
        }
    }
}

impl PitchParams {
    pub fn validate(&self, sample_rate_hz: u32) -> Result<(), PitchError> {
        let nyquist = sample_rate_hz as f64 / 2.0;
        if !(0.0 < self.f0_min && self.f0_min < self.f0_max && self.f0_max < nyquist) {
            return Err(PitchError::InvalidParams(format!(
                "need 0 < f0_min < f0_max < {nyquist}, got [{}, {}]",
                self.f0_min, self.f0_max
            )));
        }
        if !(self.voicing_threshold > 0.0 && self.voicing_threshold.is_finite()) {
            return Err(PitchError::InvalidParams(format!(
                "voicing threshold must be positive, got {}",
                self.voicing_threshold
            )));
        }
        Ok(())
    }
}

/// Per-frame F0 in Hz; 0 encodes an unvoiced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    f0_hz: Vec<f64>,
    hop_length: usize,
    sample_rate_hz: u32,
}

impl PitchTrack {
    pub fn new(f0_hz: Vec<f64>, hop_length: usize, sample_rate_hz: u32) -> Self {
        Self {
            f0_hz,
            hop_length,
            sample_rate_hz,
        }
    }

    pub fn f0_hz(&self) -> &[f64] {
        &self.f0_hz
    }

    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn hop_length(&self) -> usize {
        self.hop_length
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn is_voiced(&self, frame: usize) -> bool {
        self.f0_hz[frame] > 0.0
    }
}

/// Natural log of F0 per frame; `None` marks unvoiced frames.
pub fn log_f0(track: &PitchTrack) -> Vec<Option<f64>> {
    track
        .f0_hz()
        .iter()
        .map(|&f| if f > 0.0 { Some(f.ln()) } else { None })
        .collect()
}

/// Extracts an F0 track frame-aligned with the spectral analysis.
pub fn extract_f0(
    buffer: &AudioBuffer,
    sp: &SpectralParams,
    pp: &PitchParams,
) -> Result<PitchTrack, PitchError> {
    let sr = buffer.sample_rate_hz();
    pp.validate(sr)?;
    sp.validate()
        .map_err(|e| PitchError::InvalidParams(e.to_string()))?;

    let required = (2.0 * sr as f64 / pp.f0_min).ceil() as usize;
    if buffer.len() < required {
        return Err(PitchError::TooShort {
            samples: buffer.len(),
            required,
        });
    }

    let sr_f = sr as f64;
    // Segment of 4 lowest-pitch periods centered on each frame.
    let mut segment_len = (4.0 * sr_f / pp.f0_min).round() as usize;
    segment_len += segment_len % 2;
    let tau_max = (sr_f / pp.f0_min).floor() as usize;
    let tau_min = ((sr_f / pp.f0_max).floor() as usize).max(2);
    let window = segment_len - tau_max;

    let frames = sp.num_frames(buffer.len());
    let mut f0 = Vec::with_capacity(frames);
    let mut segment = vec![0.0f64; segment_len];
    for t in 0..frames {
        let center = sp.frame_center(t) as isize;
        let start = center - (segment_len / 2) as isize;
        for (i, slot) in segment.iter_mut().enumerate() {
            let idx = start + i as isize;
            *slot = if idx >= 0 && (idx as usize) < buffer.len() {
                buffer.samples()[idx as usize]
            } else {
                0.0
            };
        }
        f0.push(yin_frame(&segment, window, tau_min, tau_max, pp, sr_f));
    }

    Ok(PitchTrack::new(f0, sp.hop_length, sr))
}

/// YIN on one segment; returns 0 for unvoiced.
fn yin_frame(
    segment: &[f64],
    window: usize,
    tau_min: usize,
    tau_max: usize,
    pp: &PitchParams,
    sample_rate: f64,
) -> f64 {
    // Difference function d(tau) over a fixed integration window,
    // via energy prefix sums and a direct cross term.
    let mut prefix_sq = vec![0.0f64; segment.len() + 1];
    for (i, &x) in segment.iter().enumerate() {
        prefix_sq[i + 1] = prefix_sq[i] + x * x;
    }
    let mut diff = vec![0.0f64; tau_max + 1];
    for tau in 1..=tau_max {
        let mut cross = 0.0;
        for j in 0..window {
            cross += segment[j] * segment[j + tau];
        }
        let e0 = prefix_sq[window];
        let e_tau = prefix_sq[tau + window] - prefix_sq[tau];
        diff[tau] = (e0 + e_tau - 2.0 * cross).max(0.0);
    }

    // Cumulative mean normalization.
    let mut cmnd = vec![1.0f64; tau_max + 1];
    let mut running = 0.0;
    for tau in 1..=tau_max {
        running += diff[tau];
        cmnd[tau] = if running > 0.0 {
            diff[tau] * tau as f64 / running
        } else {
            1.0
        };
    }

    // First dip below the threshold, then descend to its local minimum.
    let mut tau = tau_min;
    let dip = loop {
        if tau > tau_max {
            break None;
        }
        if cmnd[tau] < pp.voicing_threshold {
            while tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau] {
                tau += 1;
            }
            break Some(tau);
        }
        tau += 1;
    };

    let Some(tau) = dip else {
        return 0.0;
    };

    let refined = if tau > 1 && tau < tau_max {
        let (a, b, c) = (cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]);
        let denom = a - 2.0 * b + c;
        let delta = if denom.abs() > 1e-12 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        tau as f64 + delta
    } else {
        tau as f64
    };

    (sample_rate / refined).clamp(pp.f0_min, pp.f0_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tone;

    fn defaults() -> (SpectralParams, PitchParams) {
        (SpectralParams::default(), PitchParams::default())
    }

    /// Frames whose full YIN segment lies inside the signal.
    fn interior(track: &PitchTrack, sp: &SpectralParams, pp: &PitchParams, len: usize) -> Vec<f64> {
        let sr = track.sample_rate_hz() as f64;
        let half = (2.0 * sr / pp.f0_min) as usize;
        (0..track.len())
            .filter(|&t| {
                let c = sp.frame_center(t);
                c >= half && c + half <= len
            })
            .map(|t| track.f0_hz()[t])
            .collect()
    }

    #[test]
    fn recovers_220hz_tone() {
        let (sp, pp) = defaults();
        let buf = tone(220.0, 22050, 1.0, 0.6);
        let track = extract_f0(&buf, &sp, &pp).unwrap();
        assert_eq!(track.len(), sp.num_frames(buf.len()));
        let inner = interior(&track, &sp, &pp, buf.len());
        assert!(!inner.is_empty());
        for f in inner {
            assert!((f - 220.0).abs() <= 1.0, "got {f} Hz");
        }
    }

    #[test]
    fn silence_is_fully_unvoiced() {
        let (sp, pp) = defaults();
        let buf = AudioBuffer::new(vec![0.0; 22050], 22050).unwrap();
        let track = extract_f0(&buf, &sp, &pp).unwrap();
        assert!(track.f0_hz().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn chirp_is_monotonically_non_decreasing() {
        let (sp, pp) = defaults();
        let sr = 22050u32;
        let secs = 1.5;
        let n = (sr as f64 * secs) as usize;
        // Linear chirp 100 -> 300 Hz: phase = 2*pi*(f0*t + (f1-f0)/(2T)*t^2).
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / sr as f64;
                let phase =
                    2.0 * std::f64::consts::PI * (100.0 * t + (300.0 - 100.0) / (2.0 * secs) * t * t);
                phase.sin() * 0.5
            })
            .collect();
        let buf = AudioBuffer::new(samples, sr).unwrap();
        let track = extract_f0(&buf, &sp, &pp).unwrap();
        let inner = interior(&track, &sp, &pp, buf.len());
        for pair in inner.windows(2) {
            assert!(pair[1] >= pair[0] - 2.0, "dropped {} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn amplitude_invariance() {
        let (sp, pp) = defaults();
        let buf = tone(173.0, 22050, 0.7, 0.5);
        let quiet = AudioBuffer::new(
            buf.samples().iter().map(|s| s * 0.02).collect(),
            buf.sample_rate_hz(),
        )
        .unwrap();
        let a = extract_f0(&buf, &sp, &pp).unwrap();
        let b = extract_f0(&quiet, &sp, &pp).unwrap();
        for (x, y) in a.f0_hz().iter().zip(b.f0_hz()) {
            assert_eq!(*x > 0.0, *y > 0.0);
            if *x > 0.0 {
                assert!((x - y).abs() < 0.1);
            }
        }
    }

    #[test]
    fn hop_shift_moves_track_by_one_frame() {
        let (sp, pp) = defaults();
        let buf = tone(150.0, 22050, 1.0, 0.5);
        let shifted = AudioBuffer::new(
            buf.samples()[sp.hop_length..].to_vec(),
            buf.sample_rate_hz(),
        )
        .unwrap();
        let a = extract_f0(&buf, &sp, &pp).unwrap();
        let b = extract_f0(&shifted, &sp, &pp).unwrap();
        // Interior frames: b[t] should match a[t + 1].
        let margin = 8;
        for t in margin..b.len() - margin {
            let (x, y) = (a.f0_hz()[t + 1], b.f0_hz()[t]);
            if x > 0.0 && y > 0.0 {
                assert!((x - y).abs() <= 1.0, "frame {t}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn too_short_buffer_is_rejected() {
        let (sp, pp) = defaults();
        let buf = tone(220.0, 22050, 0.01, 0.5);
        assert!(matches!(
            extract_f0(&buf, &sp, &pp),
            Err(PitchError::TooShort { .. })
        ));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let (sp, _) = defaults();
        let buf = tone(220.0, 22050, 0.5, 0.5);
        let bad = PitchParams {
            f0_min: 500.0,
            f0_max: 400.0,
            voicing_threshold: 0.15,
        };
        assert!(matches!(
            extract_f0(&buf, &sp, &bad),
            Err(PitchError::InvalidParams(_))
        ));
    }

    #[test]
    fn log_f0_semantics() {
        let track = PitchTrack::new(vec![std::f64::consts::E.powi(2), 0.0, 220.0], 256, 22050);
        let logs = log_f0(&track);
        assert!((logs[0].unwrap() - 2.0).abs() < 1e-12);
        assert!(logs[1].is_none());
        assert!((logs[2].unwrap().exp() - 220.0).abs() < 1e-12);

        let unvoiced = PitchTrack::new(vec![0.0; 5], 256, 22050);
        assert!(log_f0(&unvoiced).iter().all(|v| v.is_none()));
    }
}
