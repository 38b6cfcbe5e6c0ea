//! Batch pipelines behind the `ttseval` subcommands.
//!
//! Per-utterance failures never abort a batch: they become error
//! records in the report and the process exits with status 1.
//! Configuration and IO failures abort with status 2.

mod cer;
mod eval;
mod feats;
mod mos;
mod vocode;

pub use cer::run_cer;
pub use eval::run_eval;
pub use feats::run_feats;
pub use mos::run_mos;
pub use vocode::run_vocode;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::CorpusError;

/// Abort-class failures (exit status 2).
#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// What a command produced and whether any utterance failed.
#[derive(Debug)]
pub struct CommandOutcome {
    pub report_json: PathBuf,
    pub report_md: PathBuf,
    pub markdown: String,
    pub utterance_errors: usize,
}

impl CommandOutcome {
    pub fn succeeded(&self) -> bool {
        self.utterance_errors == 0
    }
}

/// Worker count: CLI flag, then TTSEVAL_WORKERS, then all cores.
pub fn resolve_workers(cli: Option<usize>) -> usize {
    cli.filter(|&n| n > 0)
        .or_else(|| {
            std::env::var("TTSEVAL_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&n| n > 0)
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub(crate) fn build_pool(workers: usize) -> Result<rayon::ThreadPool, CommandError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CommandError::Pool(e.to_string()))
}

/// Utterance ids become file names; refuse anything that escapes out_dir.
pub(crate) fn checked_file_stem(id: &str) -> Result<&str, String> {
    if id.contains('/') || id.contains('\\') || id == "." || id == ".." {
        Err(format!("utterance id {id:?} is not a valid file stem"))
    } else {
        Ok(id)
    }
}

pub(crate) fn write_report<T: Serialize>(
    report: &T,
    markdown: String,
    out_dir: &Path,
    utterance_errors: usize,
) -> Result<CommandOutcome, CommandError> {
    fs::create_dir_all(out_dir)?;
    let report_json = out_dir.join("report.json");
    let report_md = out_dir.join("report.md");
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&report_json, json)?;
    fs::write(&report_md, &markdown)?;
    Ok(CommandOutcome {
        report_json,
        report_md,
        markdown,
        utterance_errors,
    })
}
