//! `ttseval mos`: MOS statistics from rating manifests.
//!
//! Each manifest line maps a system id to comma-separated integer
//! ratings on the 1..5 scale.

use std::path::Path;

use crate::corpus::{load_manifest, EvalConfig, ManifestKind};
use crate::metrics::mos_summary;
use crate::report::{MosRecord, MosReport, Provenance};

use super::{write_report, CommandError, CommandOutcome};

pub fn run_mos(
    ratings_manifest: &Path,
    config: &EvalConfig,
    out_dir: &Path,
) -> Result<CommandOutcome, CommandError> {
    let manifest = load_manifest(ratings_manifest, ManifestKind::Ratings)?;

    let systems: Vec<MosRecord> = manifest
        .entries()
        .iter()
        .map(|(id, payload)| {
            let mut record = MosRecord {
                id: id.clone(),
                summary: None,
                errors: Vec::new(),
            };
            match parse_ratings(id, payload) {
                Ok(ratings) => match mos_summary(&ratings) {
                    Ok(summary) => record.summary = Some(summary),
                    Err(e) => record.errors.push(format!("mos: {e}")),
                },
                Err(message) => record.errors.push(message),
            }
            record
        })
        .collect();

    let report = MosReport::new(Provenance::new(config), systems);
    let errors = report.system_error_count();
    let markdown = report.to_markdown();
    write_report(&report, markdown, out_dir, errors)
}

fn parse_ratings(id: &str, payload: &str) -> Result<Vec<f64>, String> {
    payload
        .split(',')
        .map(|token| {
            let token = token.trim();
            let value: i64 = token
                .parse()
                .map_err(|_| format!("system {id}: rating {token:?} is not an integer"))?;
            if !(1..=5).contains(&value) {
                return Err(format!("system {id}: rating {value} outside the 1..5 scale"));
            }
            Ok(value as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comma_separated_ratings() {
        assert_eq!(parse_ratings("s", "4,5, 3").unwrap(), vec![4.0, 5.0, 3.0]);
    }

    #[test]
    fn rejects_out_of_scale_and_junk() {
        let err = parse_ratings("sysA", "4,6").unwrap_err();
        assert!(err.contains("sysA"), "{err}");
        assert!(err.contains('6'));
        assert!(parse_ratings("s", "4,x").is_err());
    }
}
