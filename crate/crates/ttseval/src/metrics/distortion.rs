//! Mel-cepstral distortion and log-F0 RMSE over a DTW alignment.

use crate::pitch::PitchTrack;
use crate::spectral::MelCepstrum;

use super::{DtwPath, MetricError};

/// dB scaling shared by every MCD variant: `10 / ln(10)`.
const MCD_DB_FACTOR: f64 = 10.0 / std::f64::consts::LN_10;

/// Mel-cepstral distortion in dB, averaged over the path.
///
/// Per aligned pair: `(10 / ln 10) * sqrt(2 * sum_{d=1..D} (ref_d - gen_d)^2)`.
/// The energy coefficient `mc_0` is excluded.
pub fn mcd(
    ref_mc: &MelCepstrum,
    gen_mc: &MelCepstrum,
    path: &DtwPath,
) -> Result<f64, MetricError> {
    if ref_mc.order() != gen_mc.order() {
        return Err(MetricError::OrderMismatch {
            left: ref_mc.order(),
            right: gen_mc.order(),
        });
    }
    path.validate(ref_mc.num_frames(), gen_mc.num_frames())?;

    let total: f64 = path
        .pairs()
        .iter()
        .map(|&(i, j)| {
            let r = ref_mc.coeffs().row(i);
            let g = gen_mc.coeffs().row(j);
            let sq: f64 = r
                .iter()
                .zip(g.iter())
                .skip(1)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            MCD_DB_FACTOR * (2.0 * sq).sqrt()
        })
        .sum();
    Ok(total / path.len() as f64)
}

/// RMSE of natural-log F0 over path pairs voiced on both sides.
///
/// Fails with [`MetricError::NoVoicedOverlap`] when no aligned pair is
/// voiced in both tracks.
pub fn f0_rmse(
    ref_track: &PitchTrack,
    gen_track: &PitchTrack,
    path: &DtwPath,
) -> Result<f64, MetricError> {
    path.validate(ref_track.len(), gen_track.len())?;

    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for &(i, j) in path.pairs() {
        let (r, g) = (ref_track.f0_hz()[i], gen_track.f0_hz()[j]);
        if r > 0.0 && g > 0.0 {
            let d = r.ln() - g.ln();
            sum_sq += d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(MetricError::NoVoicedOverlap);
    }
    Ok((sum_sq / count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn cepstrum_from(coeff_rows: Vec<Vec<f64>>) -> MelCepstrum {
        let rows = coeff_rows.len();
        let cols = coeff_rows[0].len();
        let flat: Vec<f64> = coeff_rows.into_iter().flatten().collect();
        MelCepstrum::new(Array2::from_shape_vec((rows, cols), flat).unwrap())
    }

    fn single_pair_path() -> DtwPath {
        DtwPath::new(vec![(0, 0)], 1, 1).unwrap()
    }

    #[test]
    fn identical_cepstra_give_zero() {
        let mc = cepstrum_from(vec![vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 0.25]]);
        let path = DtwPath::new(vec![(0, 0), (1, 1)], 2, 2).unwrap();
        assert_eq!(mcd(&mc, &mc, &path).unwrap(), 0.0);
    }

    #[test]
    fn unit_difference_in_mc1() {
        // (10 / ln 10) * sqrt(2) with a single aligned pair.
        let r = cepstrum_from(vec![vec![0.0, 1.0, 0.0]]);
        let g = cepstrum_from(vec![vec![0.0, 0.0, 0.0]]);
        let value = mcd(&r, &g, &single_pair_path()).unwrap();
        assert!((value - 6.141851463713754).abs() < 1e-9);
    }

    #[test]
    fn mc0_difference_is_ignored() {
        let r = cepstrum_from(vec![vec![5.0, 1.0, -2.0]]);
        let g = cepstrum_from(vec![vec![-3.0, 1.0, -2.0]]);
        assert!(mcd(&r, &g, &single_pair_path()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn mcd_is_symmetric_under_transposed_path() {
        let r = cepstrum_from(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, -1.0]]);
        let g = cepstrum_from(vec![
            vec![0.5, 0.5, 1.5],
            vec![0.0, 0.25, 0.0],
            vec![1.0, -0.5, -1.0],
        ]);
        let path = DtwPath::new(vec![(0, 0), (0, 1), (1, 2)], 2, 3).unwrap();
        let a = mcd(&r, &g, &path).unwrap();
        let b = mcd(&g, &r, &path.transposed()).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(a >= 0.0);
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let r = cepstrum_from(vec![vec![0.0, 1.0]]);
        let g = cepstrum_from(vec![vec![0.0, 1.0, 2.0]]);
        assert!(matches!(
            mcd(&r, &g, &single_pair_path()),
            Err(MetricError::OrderMismatch { .. })
        ));
    }

    fn track(f0: Vec<f64>) -> PitchTrack {
        PitchTrack::new(f0, 256, 22050)
    }

    #[test]
    fn identical_tracks_give_zero_rmse() {
        let t = track(vec![200.0, 0.0, 210.0]);
        let path = DtwPath::new(vec![(0, 0), (1, 1), (2, 2)], 3, 3).unwrap();
        assert_eq!(f0_rmse(&t, &t, &path).unwrap(), 0.0);
    }

    #[test]
    fn constant_log_offset_is_exact() {
        let scale = 0.1f64.exp();
        let r = track(vec![150.0, 200.0, 0.0, 250.0]);
        let g = track(vec![150.0 * scale, 200.0 * scale, 0.0, 250.0 * scale]);
        let path = DtwPath::new(vec![(0, 0), (1, 1), (2, 2), (3, 3)], 4, 4).unwrap();
        let rmse = f0_rmse(&r, &g, &path).unwrap();
        assert!((rmse - 0.1).abs() < 1e-12);
    }

    #[test]
    fn fully_unvoiced_gen_has_no_overlap() {
        let r = track(vec![150.0, 200.0]);
        let g = track(vec![0.0, 0.0]);
        let path = DtwPath::new(vec![(0, 0), (1, 1)], 2, 2).unwrap();
        assert!(matches!(
            f0_rmse(&r, &g, &path),
            Err(MetricError::NoVoicedOverlap)
        ));
    }

    #[test]
    fn unvoiced_pairs_do_not_affect_the_value() {
        let r = track(vec![150.0, 999.0, 200.0]);
        let r2 = track(vec![150.0, 123.0, 200.0]);
        let g = track(vec![150.0, 0.0, 200.0]);
        let path = DtwPath::new(vec![(0, 0), (1, 1), (2, 2)], 3, 3).unwrap();
        assert_eq!(
            f0_rmse(&r, &g, &path).unwrap(),
            f0_rmse(&r2, &g, &path).unwrap()
        );
    }
}
