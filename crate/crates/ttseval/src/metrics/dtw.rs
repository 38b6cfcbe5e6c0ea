//! Exact dynamic time warping between two feature sequences.
//!
//! Plain O(T_ref * T_gen) dynamic programming with Euclidean local
//! distance and the step set {(1,0), (0,1), (1,1)}. Ties in the
//! backtrace prefer the diagonal step, then (0,1), then (1,0).

use ndarray::ArrayView2;

use super::MetricError;

/// Monotonic alignment between two frame sequences.
///
/// Pairs run from `(0, 0)` to `(T_ref - 1, T_gen - 1)` with both
/// indices non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtwPath {
    pairs: Vec<(usize, usize)>,
}

impl DtwPath {
    /// Wraps an explicit pair list after checking the path invariants.
    pub fn new(pairs: Vec<(usize, usize)>, t_ref: usize, t_gen: usize) -> Result<Self, MetricError> {
        let path = Self { pairs };
        path.validate(t_ref, t_gen)?;
        Ok(path)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The same alignment with ref and gen roles swapped.
    pub fn transposed(&self) -> DtwPath {
        DtwPath {
            pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// Checks endpoints, step set and bounds against the two lengths.
    pub fn validate(&self, t_ref: usize, t_gen: usize) -> Result<(), MetricError> {
        if t_ref == 0 || t_gen == 0 || self.pairs.is_empty() {
            return Err(MetricError::InvalidPath("empty path or sequence".into()));
        }
        if self.pairs[0] != (0, 0) {
            return Err(MetricError::InvalidPath(format!(
                "path starts at {:?}, expected (0, 0)",
                self.pairs[0]
            )));
        }
        let last = *self.pairs.last().unwrap();
        if last != (t_ref - 1, t_gen - 1) {
            return Err(MetricError::InvalidPath(format!(
                "path ends at {last:?}, expected ({}, {})",
                t_ref - 1,
                t_gen - 1
            )));
        }
        for w in self.pairs.windows(2) {
            let (di, dj) = (
                w[1].0 as i64 - w[0].0 as i64,
                w[1].1 as i64 - w[0].1 as i64,
            );
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(MetricError::InvalidPath(format!(
                    "illegal step {:?} -> {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

fn euclidean(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Minimum-cost monotonic alignment of two frame matrices.
///
/// Returns the path and the summed Euclidean distance along it.
pub fn dtw_align(
    ref_frames: ArrayView2<f64>,
    gen_frames: ArrayView2<f64>,
) -> Result<(DtwPath, f64), MetricError> {
    let t_ref = ref_frames.nrows();
    let t_gen = gen_frames.nrows();
    if t_ref == 0 || t_gen == 0 {
        return Err(MetricError::EmptySequence);
    }
    if ref_frames.ncols() != gen_frames.ncols() {
        return Err(MetricError::DimMismatch {
            left: ref_frames.ncols(),
            right: gen_frames.ncols(),
        });
    }

    let mut cost = vec![f64::INFINITY; t_ref * t_gen];
    let idx = |i: usize, j: usize| i * t_gen + j;
    for i in 0..t_ref {
        for j in 0..t_gen {
            let local = euclidean(ref_frames.row(i), gen_frames.row(j));
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cost[idx(0, j - 1)],
                (_, 0) => cost[idx(i - 1, 0)],
                _ => cost[idx(i - 1, j - 1)]
                    .min(cost[idx(i, j - 1)])
                    .min(cost[idx(i - 1, j)]),
            };
            cost[idx(i, j)] = local + best;
        }
    }

    // Backtrace; tie preference: diagonal, then (0,1), then (1,0).
    let mut pairs = Vec::with_capacity(t_ref + t_gen);
    let (mut i, mut j) = (t_ref - 1, t_gen - 1);
    pairs.push((i, j));
    while i > 0 || j > 0 {
        let (pi, pj) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = cost[idx(i - 1, j - 1)];
            let left = cost[idx(i, j - 1)];
            let up = cost[idx(i - 1, j)];
            let best = diag.min(left).min(up);
            if diag == best {
                (i - 1, j - 1)
            } else if left == best {
                (i, j - 1)
            } else {
                (i - 1, j)
            }
        };
        i = pi;
        j = pj;
        pairs.push((i, j));
    }
    pairs.reverse();

    let total = cost[idx(t_ref - 1, t_gen - 1)];
    Ok((DtwPath { pairs }, total))
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive monotonic-path search, independent of the DP.

    use ndarray::ArrayView2;

    pub(crate) fn brute_force_cost(r: ArrayView2<f64>, g: ArrayView2<f64>) -> f64 {
        fn dist(r: ArrayView2<f64>, g: ArrayView2<f64>, i: usize, j: usize) -> f64 {
            r.row(i)
                .iter()
                .zip(g.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        }
        fn walk(r: ArrayView2<f64>, g: ArrayView2<f64>, i: usize, j: usize) -> f64 {
            let here = dist(r, g, i, j);
            if i + 1 == r.nrows() && j + 1 == g.nrows() {
                return here;
            }
            let mut best = f64::INFINITY;
            if i + 1 < r.nrows() && j + 1 < g.nrows() {
                best = best.min(walk(r, g, i + 1, j + 1));
            }
            if j + 1 < g.nrows() {
                best = best.min(walk(r, g, i, j + 1));
            }
            if i + 1 < r.nrows() {
                best = best.min(walk(r, g, i + 1, j));
            }
            here + best
        }
        walk(r, g, 0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array2};
    use proptest::prelude::*;

    #[test]
    fn identical_sequences_align_on_the_diagonal() {
        let x = arr2(&[[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]);
        let (path, cost) = dtw_align(x.view(), x.view()).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(path.pairs(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn two_vs_three_frame_example() {
        // Hand enumeration of all monotonic paths gives optimal cost 1.
        let r = arr2(&[[0.0], [2.0]]);
        let g = arr2(&[[0.0], [1.0], [2.0]]);
        let (path, cost) = dtw_align(r.view(), g.view()).unwrap();
        assert_eq!(cost, 1.0);
        path.validate(2, 3).unwrap();
        assert_eq!(cost, oracle::brute_force_cost(r.view(), g.view()));
    }

    #[test]
    fn rejects_empty_and_mismatched_inputs() {
        let x = arr2(&[[0.0, 1.0]]);
        let empty = Array2::<f64>::zeros((0, 2));
        assert!(matches!(
            dtw_align(empty.view(), x.view()),
            Err(MetricError::EmptySequence)
        ));
        let y = arr2(&[[0.0, 1.0, 2.0]]);
        assert!(matches!(
            dtw_align(x.view(), y.view()),
            Err(MetricError::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn path_validation_catches_bad_paths() {
        assert!(DtwPath::new(vec![(0, 0), (1, 1)], 2, 2).is_ok());
        assert!(DtwPath::new(vec![(0, 1), (1, 1)], 2, 2).is_err());
        assert!(DtwPath::new(vec![(0, 0), (0, 0)], 1, 1).is_err());
        assert!(DtwPath::new(vec![(0, 0), (2, 1)], 3, 2).is_err());
        assert!(DtwPath::new(vec![(0, 0)], 1, 1).is_ok());
    }

    #[test]
    fn transposed_swaps_roles() {
        let p = DtwPath::new(vec![(0, 0), (0, 1), (1, 2)], 2, 3).unwrap();
        let t = p.transposed();
        t.validate(3, 2).unwrap();
        assert_eq!(t.pairs(), &[(0, 0), (1, 0), (2, 1)]);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(
            t_ref in 1usize..=6,
            t_gen in 1usize..=6,
            dim in 1usize..=3,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Integer-scaled entries keep tie comparisons exact.
            let r = Array2::from_shape_fn((t_ref, dim), |_| rng.random_range(0..8) as f64);
            let g = Array2::from_shape_fn((t_gen, dim), |_| rng.random_range(0..8) as f64);
            let (path, cost) = dtw_align(r.view(), g.view()).unwrap();
            path.validate(t_ref, t_gen).unwrap();
            let expected = oracle::brute_force_cost(r.view(), g.view());
            prop_assert!((cost - expected).abs() < 1e-9);
        }
    }
}
