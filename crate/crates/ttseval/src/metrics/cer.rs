//! Character error rate over normalized Unicode text.
//!
//! Normalization lowercases, strips punctuation, collapses whitespace
//! runs to a single space and trims; spaces that survive count as
//! characters. The error counts come from a full Levenshtein DP whose
//! backtrace prefers substitution, then deletion, then insertion among
//! minimal alignments.

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use super::MetricError;

/// Edit operation counts against a reference of `ref_len` characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CerCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
}

impl CerCounts {
    /// `(S + D + I) / N`; can exceed 1 when the hypothesis is much longer.
    pub fn rate(&self) -> f64 {
        (self.substitutions + self.deletions + self.insertions) as f64 / self.ref_len as f64
    }

    pub fn total_edits(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Lowercase, strip punctuation, collapse whitespace, trim.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if c.general_category_group() == GeneralCategoryGroup::Punctuation {
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        for lc in c.to_lowercase() {
            out.push(lc);
        }
    }
    out
}

/// Character error rate between a reference and a hypothesis.
///
/// Returns the edit counts and the rate `(S + D + I) / N` computed on
/// normalized text.
pub fn cer(ref_text: &str, hyp_text: &str) -> Result<(CerCounts, f64), MetricError> {
    let r: Vec<char> = normalize_text(ref_text).chars().collect();
    let h: Vec<char> = normalize_text(hyp_text).chars().collect();
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }

    let (n, m) = (r.len(), h.len());
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let mut dp = vec![0u32; (n + 1) * (m + 1)];
    for i in 0..=n {
        dp[idx(i, 0)] = i as u32;
    }
    for j in 0..=m {
        dp[idx(0, j)] = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = if r[i - 1] == h[j - 1] { 0 } else { 1 };
            dp[idx(i, j)] = (dp[idx(i - 1, j - 1)] + sub_cost)
                .min(dp[idx(i - 1, j)] + 1)
                .min(dp[idx(i, j - 1)] + 1);
        }
    }

    // Backtrace, preferring substitution, then deletion, then insertion.
    let mut counts = CerCounts {
        substitutions: 0,
        deletions: 0,
        insertions: 0,
        ref_len: n,
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[idx(i, j)];
        if i > 0 && j > 0 && r[i - 1] == h[j - 1] && here == dp[idx(i - 1, j - 1)] {
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && here == dp[idx(i - 1, j - 1)] + 1 {
            counts.substitutions += 1;
            i -= 1;
            j -= 1;
        } else if i > 0 && here == dp[idx(i - 1, j)] + 1 {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }

    let rate = counts.rate();
    Ok((counts, rate))
}
