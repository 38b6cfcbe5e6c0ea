//! `ttseval cer`: character error rate between reference transcripts
//! and externally produced hypothesis transcripts.

use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{load_manifest, pair_utterances, EvalConfig, ManifestKind};
use crate::metrics::cer;
use crate::report::{EvalReport, Provenance, UtteranceRecord};

use super::{build_pool, write_report, CommandError, CommandOutcome};

pub fn run_cer(
    ref_manifest: &Path,
    hyp_manifest: &Path,
    config: &EvalConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<CommandOutcome, CommandError> {
    let reference = load_manifest(ref_manifest, ManifestKind::Text)?;
    let hypothesis = load_manifest(hyp_manifest, ManifestKind::Text)?;
    let (pairs, missing_in_gen, missing_in_ref) = pair_utterances(&reference, &hypothesis)?;

    let pool = build_pool(workers)?;
    let scored: Vec<(UtteranceRecord, Option<(usize, usize)>)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| {
                let mut record = UtteranceRecord::empty(&pair.utterance_id);
                match cer(&pair.ref_payload, &pair.gen_payload) {
                    Ok((counts, rate)) => {
                        record.cer = Some(rate);
                        (record, Some((counts.total_edits(), counts.ref_len)))
                    }
                    Err(e) => {
                        record.errors.push(format!("cer: {e}"));
                        (record, None)
                    }
                }
            })
            .collect()
    });

    // Pooled corpus CER over the scored records only.
    let (edits, ref_len) = scored
        .iter()
        .filter_map(|(_, counts)| *counts)
        .fold((0usize, 0usize), |(e, n), (de, dn)| (e + de, n + dn));
    let corpus_cer = (ref_len > 0).then(|| edits as f64 / ref_len as f64);

    let records: Vec<UtteranceRecord> = scored.into_iter().map(|(r, _)| r).collect();
    let report = EvalReport::assemble(
        Provenance::new(config),
        records,
        corpus_cer,
        missing_in_gen,
        missing_in_ref,
    );
    let errors = report.utterance_error_count();
    let markdown = report.to_markdown();
    write_report(&report, markdown, out_dir, errors)
}
