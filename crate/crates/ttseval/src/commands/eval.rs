//! `ttseval eval`: objective metrics between paired reference and
//! generated audio.

use std::path::Path;

use ndarray::{s, Array2};
use rayon::prelude::*;

use crate::audio_io::{read_wav, resample, AudioBuffer};
use crate::corpus::{load_manifest, pair_utterances, EvalConfig, EvalPair, ManifestKind, MetricKind};
use crate::metrics::{dtw_align, f0_rmse, mcd, MetricError};
use crate::pitch::extract_f0;
use crate::report::{EvalReport, Provenance, UtteranceRecord};
use crate::spectral::{log_mel_spectrogram, mel_cepstrum, mel_filterbank, MelCepstrum};

use super::{build_pool, write_report, CommandError, CommandOutcome};

pub fn run_eval(
    ref_manifest: &Path,
    gen_manifest: &Path,
    config: &EvalConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<CommandOutcome, CommandError> {
    let reference = load_manifest(ref_manifest, ManifestKind::Audio)?;
    let generated = load_manifest(gen_manifest, ManifestKind::Audio)?;
    let (pairs, missing_in_gen, missing_in_ref) = pair_utterances(&reference, &generated)?;

    let pool = build_pool(workers)?;
    let records: Vec<UtteranceRecord> =
        pool.install(|| pairs.par_iter().map(|p| score_pair(p, config)).collect());

    let report = EvalReport::assemble(
        Provenance::new(config),
        records,
        None,
        missing_in_gen,
        missing_in_ref,
    );
    let errors = report.utterance_error_count();
    let markdown = report.to_markdown();
    write_report(&report, markdown, out_dir, errors)
}

/// Cepstral rows without the energy coefficient, for alignment.
fn alignment_frames(mc: &MelCepstrum) -> Array2<f64> {
    mc.coeffs().slice(s![.., 1..]).to_owned()
}

fn score_pair(pair: &EvalPair, config: &EvalConfig) -> UtteranceRecord {
    let mut record = UtteranceRecord::empty(&pair.utterance_id);
    match score_pair_inner(pair, config, &mut record) {
        Ok(()) => {}
        Err(message) => record.errors.push(message),
    }
    record
}

fn score_pair_inner(
    pair: &EvalPair,
    config: &EvalConfig,
    record: &mut UtteranceRecord,
) -> Result<(), String> {
    let want_mcd = config.metric_enabled(MetricKind::Mcd);
    let want_f0 = config.metric_enabled(MetricKind::F0Rmse);
    if !want_mcd && !want_f0 {
        return Ok(());
    }

    let ref_audio =
        read_wav(Path::new(&pair.ref_payload)).map_err(|e| format!("ref read_wav: {e}"))?;
    let gen_audio =
        read_wav(Path::new(&pair.gen_payload)).map_err(|e| format!("gen read_wav: {e}"))?;
    // Mismatched rates: bring gen to the reference's analysis rate.
    let gen_audio: AudioBuffer = if gen_audio.sample_rate_hz() != ref_audio.sample_rate_hz() {
        resample(&gen_audio, ref_audio.sample_rate_hz())
            .map_err(|e| format!("gen resample: {e}"))?
    } else {
        gen_audio
    };

    let sr = ref_audio.sample_rate_hz();
    let params = &config.spectral;
    let fb = mel_filterbank(config.n_mels, params, sr, config.f_min, config.effective_f_max(sr))
        .map_err(|e| format!("mel_filterbank: {e}"))?;

    let cepstra = |audio: &AudioBuffer, side: &str| -> Result<MelCepstrum, String> {
        let mel = log_mel_spectrogram(audio, params, &fb)
            .map_err(|e| format!("{side} log_mel_spectrogram: {e}"))?;
        mel_cepstrum(&mel, config.cepstral_order).map_err(|e| format!("{side} mel_cepstrum: {e}"))
    };
    let ref_mc = cepstra(&ref_audio, "ref")?;
    let gen_mc = cepstra(&gen_audio, "gen")?;

    // One alignment per pair, on the mel cepstra, reused by both metrics.
    let (path, _) = dtw_align(
        alignment_frames(&ref_mc).view(),
        alignment_frames(&gen_mc).view(),
    )
    .map_err(|e| format!("dtw_align: {e}"))?;

    if want_mcd {
        record.mcd = Some(mcd(&ref_mc, &gen_mc, &path).map_err(|e| format!("mcd: {e}"))?);
    }

    if want_f0 {
        let ref_track = extract_f0(&ref_audio, params, &config.pitch)
            .map_err(|e| format!("ref extract_f0: {e}"))?;
        let gen_track = extract_f0(&gen_audio, params, &config.pitch)
            .map_err(|e| format!("gen extract_f0: {e}"))?;
        match f0_rmse(&ref_track, &gen_track, &path) {
            Ok(value) => record.f0_rmse = Some(value),
            // Reported per utterance, excluded from aggregates.
            Err(MetricError::NoVoicedOverlap) => {
                record.errors.push("f0_rmse: no voiced overlap".into())
            }
            Err(e) => return Err(format!("f0_rmse: {e}")),
        }
    }
    Ok(())
}
