//! Readers for metric inputs: aligned hypothesis/reference text files,
//! `{hyp, ref}` JSONL, and ranking JSONL carrying either a rank or the raw
//! candidate scores.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{rank_from_scores, EvalPair, RankedQuery, DEFAULT_CANDIDATES};
use crate::{Error, Result};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn lines(path: &Path) -> Result<Vec<String>> {
    open(path)?
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))
}

fn split(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_owned).collect()
}

/// Pairs from two files with one whitespace-tokenized sentence per line.
pub fn read_aligned(hyp: &Path, reference: &Path) -> Result<Vec<EvalPair>> {
    let h = lines(hyp)?;
    let r = lines(reference)?;
    if h.len() != r.len() {
        return Err(Error::InvalidArgument(format!(
            "{} has {} lines but {} has {}",
            hyp.display(),
            h.len(),
            reference.display(),
            r.len()
        )));
    }
    Ok(h.iter()
        .zip(&r)
        .map(|(h, r)| EvalPair::from_text(h, r))
        .collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Side {
    Text(String),
    Tokens(Vec<String>),
}

impl Side {
    fn tokens(self) -> Vec<String> {
        match self {
            Side::Text(s) => split(&s),
            Side::Tokens(t) => t,
        }
    }
}

#[derive(Deserialize)]
struct PairLine {
    hyp: Side,
    #[serde(rename = "ref")]
    reference: Side,
}

fn jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, v));
    }
    Ok(out)
}

/// Pairs from JSONL lines `{"hyp": ..., "ref": ...}`; each side is either a
/// string (split on whitespace) or an array of tokens.
pub fn read_pairs_jsonl(path: &Path) -> Result<Vec<EvalPair>> {
    Ok(jsonl::<PairLine>(path)?
        .into_iter()
        .map(|(_, p)| EvalPair {
            hypothesis: p.hyp.tokens(),
            reference: p.reference.tokens(),
        })
        .collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Qid {
    Text(String),
    Number(i64),
}

#[derive(Deserialize)]
struct RankLine {
    qid: Qid,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    scores: Option<Vec<f64>>,
    #[serde(default)]
    candidates: Option<usize>,
}

/// Rankings from JSONL lines `{"qid", "rank"}` or `{"qid", "scores"}`, where
/// `scores[0]` belongs to the correct candidate.
pub fn read_rankings_jsonl(path: &Path) -> Result<Vec<RankedQuery>> {
    let mut out = Vec::new();
    for (line, r) in jsonl::<RankLine>(path)? {
        let qid = match r.qid {
            Qid::Text(s) => s,
            Qid::Number(n) => n.to_string(),
        };
        let bad = |message: String| Error::MalformedLine {
            path: path.to_path_buf(),
            line,
            message,
        };
        let (rank, candidates) = match (r.rank, r.scores) {
            (Some(_), Some(_)) => return Err(bad("both rank and scores given".into())),
            (rank, None) => (rank, r.candidates.unwrap_or(DEFAULT_CANDIDATES)),
            (None, Some(scores)) => {
                let rank = rank_from_scores(&scores).map_err(|e| bad(e.to_string()))?;
                (Some(rank), scores.len())
            }
        };
        out.push(RankedQuery {
            qid,
            candidates,
            rank,
        });
    }
    Ok(out)
}
