//! Non-neural prosody utilities: durations from attention weights,
//! token-averaged frame features and random-window sampling.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProsodyError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("window of {window_frames} frames does not fit in {total_frames}")]
    WindowTooLarge {
        window_frames: usize,
        total_frames: usize,
    },
    #[error("window must span at least one frame")]
    EmptyWindow,
    #[error("invalid attention matrix: {0}")]
    InvalidAttention(String),
}

/// Row-stochastic attention weights, `T_out x T_in`.
#[derive(Debug, Clone)]
pub struct AttentionMatrix {
    weights: Array2<f64>,
}

impl AttentionMatrix {
    /// Validates entries in `[0, 1]` and rows summing to 1 within 1e-4.
    pub fn new(weights: Array2<f64>) -> Result<Self, ProsodyError> {
        if weights.nrows() == 0 || weights.ncols() == 0 {
            return Err(ProsodyError::InvalidAttention("empty matrix".into()));
        }
        for (t, row) in weights.rows().into_iter().enumerate() {
            let mut sum = 0.0;
            for &w in row.iter() {
                if !(0.0..=1.0).contains(&w) {
                    return Err(ProsodyError::InvalidAttention(format!(
                        "weight {w} at output step {t} outside [0, 1]"
                    )));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > 1e-4 {
                return Err(ProsodyError::InvalidAttention(format!(
                    "row {t} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn t_out(&self) -> usize {
        self.weights.nrows()
    }

    pub fn t_in(&self) -> usize {
        self.weights.ncols()
    }
}

/// A sampled fixed-length window in frame and sample coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub frame_start: usize,
    pub frame_len: usize,
    pub sample_start: usize,
    pub sample_len: usize,
    pub seed: u64,
}

/// Per-token durations from attention: token j gets the number of
/// output steps whose row argmax lands on column j. Argmax ties break
/// toward the smallest index.
pub fn durations_from_attention(attention: &AttentionMatrix) -> Vec<usize> {
    let mut durations = vec![0usize; attention.t_in()];
    for row in attention.weights().rows() {
        let mut best = 0usize;
        let mut best_w = f64::NEG_INFINITY;
        for (j, &w) in row.iter().enumerate() {
            if w > best_w {
                best_w = w;
                best = j;
            }
        }
        durations[best] += 1;
    }
    durations
}

/// Averages frame values over each token's duration span.
///
/// With a voiced mask only masked-true frames contribute; a span with
/// no contributing frames averages to 0.
pub fn token_average(
    frame_values: &[f64],
    durations: &[usize],
    voiced_mask: Option<&[bool]>,
) -> Result<Vec<f64>, ProsodyError> {
    let total: usize = durations.iter().sum();
    if total != frame_values.len() {
        return Err(ProsodyError::LengthMismatch(format!(
            "durations sum to {total}, frame sequence has {} values",
            frame_values.len()
        )));
    }
    if let Some(mask) = voiced_mask {
        if mask.len() != frame_values.len() {
            return Err(ProsodyError::LengthMismatch(format!(
                "mask has {} entries, frame sequence has {}",
                mask.len(),
                frame_values.len()
            )));
        }
    }

    let mut out = Vec::with_capacity(durations.len());
    let mut start = 0usize;
    for &dur in durations {
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in start..start + dur {
            if voiced_mask.map_or(true, |m| m[t]) {
                sum += frame_values[t];
                count += 1;
            }
        }
        out.push(if count > 0 { sum / count as f64 } else { 0.0 });
        start += dur;
    }
    Ok(out)
}

/// Draws a uniformly positioned window of `window_frames` frames.
///
/// The draw is a pure function of the seed; sample coordinates follow
/// from the hop length.
pub fn sample_random_window(
    total_frames: usize,
    window_frames: usize,
    hop_length: usize,
    seed: u64,
) -> Result<WindowSpec, ProsodyError> {
    if window_frames == 0 {
        return Err(ProsodyError::EmptyWindow);
    }
    if window_frames > total_frames {
        return Err(ProsodyError::WindowTooLarge {
            window_frames,
            total_frames,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let frame_start = rng.random_range(0..=total_frames - window_frames);
    Ok(WindowSpec {
        frame_start,
        frame_len: window_frames,
        sample_start: frame_start * hop_length,
        sample_len: window_frames * hop_length,
        seed,
    })
}
