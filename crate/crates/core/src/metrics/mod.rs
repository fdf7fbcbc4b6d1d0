//! Evaluation measures for code summarization and code search, plus the
//! significance test and performance-to-time ratio used to compare
//! fine-tuning setups.

mod bleu;
pub mod input;
mod meteor;
mod mrr;
mod mwu;
mod ptr;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu, sentence_bleu};
pub use meteor::{meteor, meteor_pair, MeteorConfig, SynonymMap};
pub use mrr::{mrr, rank_from_scores, RankedQuery, DEFAULT_CANDIDATES};
pub use mwu::{exact_permutation_p, mann_whitney_u, MannWhitney, EXACT_LIMIT};
pub use ptr::{ptr, PerfTimeRecord};

/// A generated token sequence and its reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPair {
    pub hypothesis: Vec<String>,
    pub reference: Vec<String>,
}

impl EvalPair {
    /// Splits both sides on whitespace.
    pub fn from_text(hypothesis: &str, reference: &str) -> Self {
        EvalPair {
            hypothesis: hypothesis.split_whitespace().map(str::to_owned).collect(),
            reference: reference.split_whitespace().map(str::to_owned).collect(),
        }
    }
}
