//! Objective evaluation metrics and their shared alignment machinery.

mod cer;
mod distortion;
mod dtw;
mod stats;

pub use cer::{cer, normalize_text, CerCounts};
pub use distortion::{f0_rmse, mcd};
pub use dtw::{dtw_align, DtwPath};
pub use stats::{mos_summary, summarize, MetricSummary, MosSummary};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("empty sequence")]
    EmptySequence,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("cepstral order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("invalid alignment path: {0}")]
    InvalidPath(String),
    #[error("no aligned frame pair is voiced on both sides")]
    NoVoicedOverlap,
    #[error("reference text is empty after normalization")]
    EmptyReference,
    #[error("need at least 2 ratings, got {0}")]
    TooFewRatings(usize),
    #[error("rating {0} outside the 1..5 scale")]
    RatingOutOfRange(f64),
    #[error("empty value sequence")]
    Empty,
}
