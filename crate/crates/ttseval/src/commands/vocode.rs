//! `ttseval vocode`: waveforms from feature dumps via mel inversion
//! and Griffin-Lim.

use std::path::Path;

use rayon::prelude::*;

use crate::audio_io::write_wav;
use crate::corpus::{load_manifest, EvalConfig, ManifestKind};
use crate::dump::load_dump;
use crate::griffin_lim::{griffin_lim, mel_to_linear};
use crate::report::{EvalReport, Provenance, UtteranceRecord};
use crate::spectral::{mel_filterbank, MelSpectrogram};

use super::{build_pool, checked_file_stem, write_report, CommandError, CommandOutcome};

pub fn run_vocode(
    dump_manifest: &Path,
    config: &EvalConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<CommandOutcome, CommandError> {
    let manifest = load_manifest(dump_manifest, ManifestKind::Audio)?;
    std::fs::create_dir_all(out_dir)?;

    let pool = build_pool(workers)?;
    let records: Vec<UtteranceRecord> = pool.install(|| {
        manifest
            .entries()
            .par_iter()
            .map(|(id, dump_path)| {
                let mut record = UtteranceRecord::empty(id);
                if let Err(message) = vocode_one(id, Path::new(dump_path), config, out_dir) {
                    record.errors.push(message);
                }
                record
            })
            .collect()
    });

    let report = EvalReport::assemble(Provenance::new(config), records, None, vec![], vec![]);
    let errors = report.utterance_error_count();
    let markdown = report.to_markdown();
    write_report(&report, markdown, out_dir, errors)
}

fn vocode_one(
    id: &str,
    dump_path: &Path,
    config: &EvalConfig,
    out_dir: &Path,
) -> Result<(), String> {
    let stem = checked_file_stem(id)?;
    let dump = load_dump(dump_path).map_err(|e| format!("load_dump: {e}"))?;
    let sr = dump.sample_rate_hz;

    // The dump's own analysis parameters drive the reconstruction.
    let fb = mel_filterbank(dump.n_mels, &dump.spectral, sr, dump.f_min, dump.f_max)
        .map_err(|e| format!("mel_filterbank: {e}"))?;
    let values = dump.log_mel.to_array().map_err(|e| format!("log_mel: {e}"))?;
    let mel = MelSpectrogram::from_values(values, dump.spectral, sr)
        .map_err(|e| format!("log_mel: {e}"))?;
    let mag = mel_to_linear(&mel, &fb).map_err(|e| format!("mel_to_linear: {e}"))?;
    let audio = griffin_lim(&mag, &dump.spectral, sr, &config.gl_config(None))
        .map_err(|e| format!("griffin_lim: {e}"))?;
    write_wav(&audio, &out_dir.join(format!("{stem}.wav"))).map_err(|e| format!("write_wav: {e}"))
}
