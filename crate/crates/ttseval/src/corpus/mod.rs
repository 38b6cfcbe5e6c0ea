//! Corpus plumbing: TSV manifests, utterance pairing and the staged
//! evaluation configuration.

mod config;
mod manifest;

pub use config::{
    load_config, parse_config, EvalConfig, GlInit, MetricKind, Stage, CONFIG_DEFAULTS_TOML,
};
pub use manifest::{load_manifest, pair_utterances, save_manifest, EvalPair, Manifest, ManifestKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate utterance id {id:?} on line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("malformed manifest line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("manifests share no utterance ids")]
    EmptyIntersection,
    #[error("manifest kind mismatch: {left:?} vs {right:?}")]
    KindMismatch { left: ManifestKind, right: ManifestKind },
    #[error("unknown config key {key:?}")]
    UnknownKey { key: String },
    #[error("config key {key:?}: expected {expected}, got {got}")]
    TypeError {
        key: String,
        expected: &'static str,
        got: String,
    },
    #[error("config key {key:?}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("config is not valid TOML: {0}")]
    Toml(String),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}
