use std::collections::HashMap;

use super::EvalPair;
use crate::{Error, Result};

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Smoothed sentence-level BLEU in `[0, 1]`.
///
/// Modified n-gram precisions for n = 1..=max_n, add-one smoothing on both
/// numerator and denominator for n >= 2, uniform geometric mean, and brevity
/// penalty `exp(1 - r/c)` when the hypothesis is shorter than the reference.
pub fn sentence_bleu(pair: &EvalPair, max_n: usize) -> f64 {
    let hyp = &pair.hypothesis;
    let reference = &pair.reference;
    if hyp.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        let matched: usize = h
            .iter()
            .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
            .sum();
        let total = hyp.len().saturating_sub(n - 1);
        let (num, den) = if n == 1 {
            (matched as f64, total as f64)
        } else {
            (matched as f64 + 1.0, total as f64 + 1.0)
        };
        if num == 0.0 {
            return 0.0;
        }
        log_sum += (num / den).ln();
    }
    let c = hyp.len() as f64;
    let r = reference.len() as f64;
    let bp = if c < r { 1.0 - r / c } else { 0.0 };
    (log_sum / max_n as f64 + bp).exp()
}

/// Mean sentence BLEU over `pairs`, as a percentage.
pub fn bleu(pairs: &[EvalPair], max_n: usize) -> Result<f64> {
    if !(1..=4).contains(&max_n) {
        return Err(Error::InvalidArgument(format!(
            "BLEU order {max_n} is outside 1..=4"
        )));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("BLEU needs at least one pair"));
    }
    let empty = pairs.iter().filter(|p| p.hypothesis.is_empty()).count();
    if empty > 0 {
        log::warn!("{empty} empty hypotheses scored as 0");
    }
    let sum: f64 = pairs.iter().map(|p| sentence_bleu(p, max_n)).sum();
    Ok(100.0 * sum / pairs.len() as f64)
}
