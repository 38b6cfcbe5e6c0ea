//! `ttseval` — batch evaluation and DSP pipelines over corpus manifests.
//!
//! Exit codes: 0 on success, 1 when per-utterance errors were recorded,
//! 2 on configuration or IO failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ttseval::commands::{
    resolve_workers, run_cer, run_eval, run_feats, run_mos, run_vocode, CommandError,
    CommandOutcome,
};
use ttseval::corpus::{load_config, EvalConfig};

#[derive(Parser)]
#[command(name = "ttseval", version, about = "Speech synthesis evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score generated audio against references (MCD, log-F0 RMSE).
    Eval {
        /// Reference audio manifest (TSV: id <TAB> wav path).
        #[arg(long = "ref")]
        ref_manifest: PathBuf,
        /// Generated audio manifest.
        #[arg(long = "gen")]
        gen_manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.json and report.md.
        #[arg(long)]
        out: PathBuf,
        /// Parallel workers (default: TTSEVAL_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Seed override for randomized stages.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Character error rate from transcript manifests.
    Cer {
        /// Reference transcript manifest (TSV: id <TAB> text).
        #[arg(long = "ref")]
        ref_manifest: PathBuf,
        /// Hypothesis transcript manifest.
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Extract feature dumps (log-mel, mel cepstrum, F0, energy).
    Feats {
        /// Audio manifest (TSV: id <TAB> wav path).
        #[arg(long)]
        audio: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Synthesize WAVs from feature dumps with Griffin-Lim.
    Vocode {
        /// Dump manifest (TSV: id <TAB> dump path).
        #[arg(long)]
        dumps: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// MOS means and 95% confidence intervals from rating manifests.
    Mos {
        /// Ratings manifest (TSV: id <TAB> comma-separated 1..5).
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_effective_config(
    path: &Option<PathBuf>,
    seed: Option<u64>,
) -> Result<EvalConfig, CommandError> {
    let mut config = match path {
        Some(p) => load_config(p)?,
        None => EvalConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<CommandOutcome, CommandError> {
    match cli.command {
        Command::Eval {
            ref_manifest,
            gen_manifest,
            config,
            out,
            workers,
            seed,
        } => {
            let config = load_effective_config(&config, seed)?;
            run_eval(
                &ref_manifest,
                &gen_manifest,
                &config,
                &out,
                resolve_workers(workers),
            )
        }
        Command::Cer {
            ref_manifest,
            hyp,
            config,
            out,
            workers,
        } => {
            let config = load_effective_config(&config, None)?;
            run_cer(&ref_manifest, &hyp, &config, &out, resolve_workers(workers))
        }
        Command::Feats {
            audio,
            config,
            out,
            workers,
        } => {
            let config = load_effective_config(&config, None)?;
            run_feats(&audio, &config, &out, resolve_workers(workers))
        }
        Command::Vocode {
            dumps,
            config,
            out,
            workers,
            seed,
        } => {
            let config = load_effective_config(&config, seed)?;
            run_vocode(&dumps, &config, &out, resolve_workers(workers))
        }
        Command::Mos {
            ratings,
            config,
            out,
        } => {
            let config = load_effective_config(&config, None)?;
            run_mos(&ratings, &config, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(outcome) => {
            print!("{}", outcome.markdown);
            println!("report: {}", outcome.report_json.display());
            if outcome.succeeded() {
                ExitCode::from(0)
            } else {
                eprintln!(
                    "ttseval: {} utterance(s) recorded errors",
                    outcome.utterance_errors
                );
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("ttseval: {e}");
            ExitCode::from(2)
        }
    }
}
