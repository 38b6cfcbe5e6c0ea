//! `ttseval feats`: per-utterance feature dumps (log-mel, mel
//! cepstrum, F0, energy).

use std::path::Path;

use rayon::prelude::*;

use crate::audio_io::read_wav;
use crate::corpus::{load_manifest, EvalConfig, ManifestKind};
use crate::dump::{save_dump, FeatureDump, FramedMatrix, DUMP_SCHEMA_VERSION};
use crate::pitch::extract_f0;
use crate::report::{EvalReport, Provenance, UtteranceRecord};
use crate::spectral::{
    frame_energy, log_mel_from_spectrogram, mel_cepstrum, mel_filterbank, stft,
};

use super::{build_pool, checked_file_stem, write_report, CommandError, CommandOutcome};

pub fn run_feats(
    audio_manifest: &Path,
    config: &EvalConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<CommandOutcome, CommandError> {
    let manifest = load_manifest(audio_manifest, ManifestKind::Audio)?;
    std::fs::create_dir_all(out_dir)?;

    let pool = build_pool(workers)?;
    let records: Vec<UtteranceRecord> = pool.install(|| {
        manifest
            .entries()
            .par_iter()
            .map(|(id, audio_path)| {
                let mut record = UtteranceRecord::empty(id);
                if let Err(message) = extract_one(id, Path::new(audio_path), config, out_dir) {
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

fn extract_one(
    id: &str,
    audio_path: &Path,
    config: &EvalConfig,
    out_dir: &Path,
) -> Result<(), String> {
    let stem = checked_file_stem(id)?;
    let audio = read_wav(audio_path).map_err(|e| format!("read_wav: {e}"))?;
    let sr = audio.sample_rate_hz();
    let params = &config.spectral;
    let f_max = config.effective_f_max(sr);
    let fb = mel_filterbank(config.n_mels, params, sr, config.f_min, f_max)
        .map_err(|e| format!("mel_filterbank: {e}"))?;

    let spec = stft(&audio, params).map_err(|e| format!("stft: {e}"))?;
    let mel = log_mel_from_spectrogram(&spec, &fb).map_err(|e| format!("log_mel: {e}"))?;
    let mcep =
        mel_cepstrum(&mel, config.cepstral_order).map_err(|e| format!("mel_cepstrum: {e}"))?;
    let energy = frame_energy(&spec);
    let track = extract_f0(&audio, params, &config.pitch).map_err(|e| format!("extract_f0: {e}"))?;

    let dump = FeatureDump {
        schema_version: DUMP_SCHEMA_VERSION,
        utterance_id: id.to_string(),
        sample_rate_hz: sr,
        spectral: *params,
        n_mels: config.n_mels,
        f_min: config.f_min,
        f_max,
        cepstral_order: config.cepstral_order,
        pitch: config.pitch,
        log_mel: FramedMatrix::from_array(mel.values()),
        mel_cepstrum: FramedMatrix::from_array(mcep.coeffs()),
        f0_hz: track.f0_hz().to_vec(),
        energy,
        attention: None,
    };
    save_dump(&dump, &out_dir.join(format!("{stem}.json"))).map_err(|e| format!("save_dump: {e}"))
}
