//! Report records and rendering.
//!
//! Each command writes a JSON report plus a markdown table rendered
//! from the same struct, so both carry identical numbers. Aggregate
//! cells follow fixed precision conventions: MCD with 2 decimals,
//! log-F0 RMSE with 3, MOS with 2, CER as a percentage with 1.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::EvalConfig;
use crate::metrics::{summarize, MetricSummary, MosSummary};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const MCD_DECIMALS: usize = 2;
pub const F0_RMSE_DECIMALS: usize = 3;
pub const MOS_DECIMALS: usize = 2;

/// `"6.47 ± 0.58"`-style cell.
pub fn format_mean_std(mean: f64, std: f64, decimals: usize) -> String {
    format!("{mean:.decimals$} ± {std:.decimals$}")
}

/// `"4.15 ± 0.08"`-style MOS cell.
pub fn format_mos(summary: &MosSummary) -> String {
    format_mean_std(summary.mean, summary.ci95, MOS_DECIMALS)
}

/// CER rate rendered as a percentage with one decimal, e.g. `"1.2"`.
pub fn format_cer_percent(rate: f64) -> String {
    format!("{:.1}", rate * 100.0)
}

/// Where the numbers came from.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub toolkit_version: String,
    pub generated_at: String,
}

impl Provenance {
    pub fn new(config: &EvalConfig) -> Self {
        let encoded = serde_json::to_vec(config).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&encoded);
        let digest = hasher.finalize();
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            config_sha256,
            toolkit_version: crate::TOOLKIT_VERSION.to_string(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Per-utterance metric values; `None` marks a metric that was
/// disabled or failed (see `errors`).
#[derive(Debug, Clone, Serialize)]
pub struct UtteranceRecord {
    pub id: String,
    pub mcd: Option<f64>,
    pub f0_rmse: Option<f64>,
    pub cer: Option<f64>,
    pub errors: Vec<String>,
}

impl UtteranceRecord {
    pub fn empty(id: &str) -> Self {
        Self {
            id: id.to_string(),
            mcd: None,
            f0_rmse: None,
            cer: None,
            errors: Vec::new(),
        }
    }
}

/// Batch evaluation report: per-utterance records plus aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub utterances: Vec<UtteranceRecord>,
    /// metric name -> mean/STD over utterances with a valid value.
    pub aggregates: BTreeMap<String, MetricSummary>,
    /// Pooled corpus CER `sum(S+D+I) / sum(N)`, when CER was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_cer: Option<f64>,
    pub missing_in_gen: Vec<String>,
    pub missing_in_ref: Vec<String>,
}

impl EvalReport {
    /// Builds the report, deriving aggregates from the records.
    pub fn assemble(
        provenance: Provenance,
        utterances: Vec<UtteranceRecord>,
        corpus_cer: Option<f64>,
        missing_in_gen: Vec<String>,
        missing_in_ref: Vec<String>,
    ) -> Self {
        let mut aggregates = BTreeMap::new();
        let columns: [(&str, &str, fn(&UtteranceRecord) -> Option<f64>); 3] = [
            ("mcd", "dB", |r| r.mcd),
            ("f0_rmse", "log Hz", |r| r.f0_rmse),
            ("cer", "rate", |r| r.cer),
        ];
        for (name, unit, getter) in columns {
            let values: Vec<f64> = utterances.iter().filter_map(getter).collect();
            if !values.is_empty() {
                aggregates.insert(
                    name.to_string(),
                    summarize(&values, unit).expect("nonempty values"),
                );
            }
        }
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            provenance,
            utterances,
            aggregates,
            corpus_cer,
            missing_in_gen,
            missing_in_ref,
        }
    }

    pub fn utterance_error_count(&self) -> usize {
        self.utterances
            .iter()
            .filter(|r| !r.errors.is_empty())
            .count()
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::from("# ttseval report\n\n");
        md.push_str("| Metric | Value | Count |\n|---|---|---|\n");
        if let Some(s) = self.aggregates.get("mcd") {
            md.push_str(&format!(
                "| MCD [dB] | {} | {} |\n",
                format_mean_std(s.mean, s.std, MCD_DECIMALS),
                s.count
            ));
        }
        if let Some(s) = self.aggregates.get("f0_rmse") {
            md.push_str(&format!(
                "| F0 RMSE [log Hz] | {} | {} |\n",
                format_mean_std(s.mean, s.std, F0_RMSE_DECIMALS),
                s.count
            ));
        }
        if let Some(pooled) = self.corpus_cer {
            let count = self
                .aggregates
                .get("cer")
                .map(|s| s.count)
                .unwrap_or_default();
            md.push_str(&format!(
                "| CER [%] | {} | {} |\n",
                format_cer_percent(pooled),
                count
            ));
        }

        md.push_str("\n## Utterances\n\n");
        md.push_str("| Utterance | MCD [dB] | F0 RMSE [log Hz] | CER [%] | Errors |\n");
        md.push_str("|---|---|---|---|---|\n");
        for r in &self.utterances {
            let cell = |v: Option<f64>, decimals: usize| match v {
                Some(x) => format!("{x:.decimals$}"),
                None => "N/A".to_string(),
            };
            let cer_cell = match r.cer {
                Some(rate) => format_cer_percent(rate),
                None => "N/A".to_string(),
            };
            md.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                r.id,
                cell(r.mcd, MCD_DECIMALS),
                cell(r.f0_rmse, F0_RMSE_DECIMALS),
                cer_cell,
                r.errors.join("; ")
            ));
        }

        if !self.missing_in_gen.is_empty() || !self.missing_in_ref.is_empty() {
            md.push_str("\n## Unpaired utterances\n\n");
            if !self.missing_in_gen.is_empty() {
                md.push_str(&format!(
                    "- missing in gen: {}\n",
                    self.missing_in_gen.join(", ")
                ));
            }
            if !self.missing_in_ref.is_empty() {
                md.push_str(&format!(
                    "- missing in ref: {}\n",
                    self.missing_in_ref.join(", ")
                ));
            }
        }
        md
    }
}

/// Per-system MOS results.
#[derive(Debug, Clone, Serialize)]
pub struct MosRecord {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<MosSummary>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MosReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub systems: Vec<MosRecord>,
}

impl MosReport {
    pub fn new(provenance: Provenance, systems: Vec<MosRecord>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            provenance,
            systems,
        }
    }

    pub fn system_error_count(&self) -> usize {
        self.systems.iter().filter(|r| !r.errors.is_empty()).count()
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::from("# ttseval MOS report\n\n");
        md.push_str("| System | MOS ± CI | n | Errors |\n|---|---|---|---|\n");
        for r in &self.systems {
            let (cell, n) = match &r.summary {
                Some(s) => (format_mos(s), s.n.to_string()),
                None => ("N/A".to_string(), "N/A".to_string()),
            };
            md.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                r.id,
                cell,
                n,
                r.errors.join("; ")
            ));
        }
        md
    }
}
