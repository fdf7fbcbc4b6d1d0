use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Candidate pool size per query: the correct snippet plus 999 distractors.
pub const DEFAULT_CANDIDATES: usize = 1000;

/// Rank of the correct snippet for one query; `None` when it was not
/// retrieved at all (contributes 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedQuery {
    pub qid: String,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    pub rank: Option<usize>,
}

fn default_candidates() -> usize {
    DEFAULT_CANDIDATES
}

/// Mean reciprocal rank in `[0, 1]`.
pub fn mrr(queries: &[RankedQuery]) -> Result<f64> {
    if queries.is_empty() {
        return Err(Error::EmptyInput("MRR needs at least one query"));
    }
    let mut sum = 0.0;
    for q in queries {
        if let Some(r) = q.rank {
            if r == 0 || r > q.candidates {
                return Err(Error::InvalidArgument(format!(
                    "query {}: rank {r} outside 1..={}",
                    q.qid, q.candidates
                )));
            }
            sum += 1.0 / r as f64;
        }
    }
    Ok(sum / queries.len() as f64)
}

/// Rank of `scores[0]` (the correct candidate) among all scores. Ties are
/// broken pessimistically: every distractor scoring at least as high is
/// ranked ahead.
pub fn rank_from_scores(scores: &[f64]) -> Result<usize> {
    let (&correct, rest) = scores
        .split_first()
        .ok_or(Error::EmptyInput("ranking needs the correct candidate's score"))?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    Ok(1 + rest.iter().filter(|&&s| s >= correct).count())
}
