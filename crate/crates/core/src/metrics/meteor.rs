//! METEOR with staged unigram alignment: exact, then stem, then synonym.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use rust_stemmers::{Algorithm, Stemmer};

use super::EvalPair;
use crate::{Error, Result};

/// Symmetric word-to-synonym relation loaded from `word<TAB>synonym` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymMap {
    pairs: HashMap<String, HashSet<String>>,
}

impl SynonymMap {
    pub fn insert(&mut self, a: &str, b: &str) {
        let (a, b) = (a.to_lowercase(), b.to_lowercase());
        self.pairs.entry(a.clone()).or_default().insert(b.clone());
        self.pairs.entry(b).or_default().insert(a);
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.pairs.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn from_reader<R: BufRead>(r: R) -> Result<Self> {
        let mut map = SynonymMap::default();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<synonyms>", e))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidArgument(format!("synonym line {} has no tab", i + 1))
            })?;
            map.insert(a.trim(), b.trim());
        }
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(f))
    }
}

#[derive(Debug, Clone)]
pub struct MeteorConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lowercase: bool,
    pub stem: bool,
    pub synonyms: Option<SynonymMap>,
}

impl Default for MeteorConfig {
    fn default() -> Self {
        MeteorConfig {
            alpha: 0.9,
            beta: 3.0,
            gamma: 0.5,
            lowercase: true,
            stem: true,
            synonyms: None,
        }
    }
}

#[derive(Clone, Copy)]
enum Stage {
    Exact,
    Stem,
    Synonym,
}

/// Greedy staged alignment; returns `(hyp index, ref index)` pairs.
fn align(hyp: &[String], reference: &[String], cfg: &MeteorConfig) -> Vec<(usize, usize)> {
    let stemmer = Stemmer::create(Algorithm::English);
    let stems = |ws: &[String]| -> Vec<String> {
        ws.iter().map(|w| stemmer.stem(w).into_owned()).collect()
    };
    let (hs, rs) = if cfg.stem {
        (stems(hyp), stems(reference))
    } else {
        (Vec::new(), Vec::new())
    };
    let mut stages = vec![Stage::Exact];
    if cfg.stem {
        stages.push(Stage::Stem);
    }
    if cfg.synonyms.is_some() {
        stages.push(Stage::Synonym);
    }

    let mut hyp_used = vec![false; hyp.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut out = Vec::new();
    for stage in stages {
        for i in 0..hyp.len() {
            if hyp_used[i] {
                continue;
            }
            let hit = (0..reference.len()).find(|&j| {
                !ref_used[j]
                    && match stage {
                        Stage::Exact => hyp[i] == reference[j],
                        Stage::Stem => hs[i] == rs[j],
                        Stage::Synonym => cfg
                            .synonyms
                            .as_ref()
                            .is_some_and(|s| s.are_synonyms(&hyp[i], &reference[j])),
                    }
            });
            if let Some(j) = hit {
                hyp_used[i] = true;
                ref_used[j] = true;
                out.push((i, j));
            }
        }
    }
    out.sort_unstable();
    out
}

/// METEOR score of one pair in `[0, 1]`.
pub fn meteor_pair(pair: &EvalPair, cfg: &MeteorConfig) -> f64 {
    let norm = |ws: &[String]| -> Vec<String> {
        if cfg.lowercase {
            ws.iter().map(|w| w.to_lowercase()).collect()
        } else {
            ws.to_vec()
        }
    };
    let hyp = norm(&pair.hypothesis);
    let reference = norm(&pair.reference);
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let alignment = align(&hyp, &reference, cfg);
    let m = alignment.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let chunks = 1 + alignment
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let p = m / hyp.len() as f64;
    let r = m / reference.len() as f64;
    let f = p * r / (cfg.alpha * p + (1.0 - cfg.alpha) * r);
    let penalty = cfg.gamma * (chunks as f64 / m).powf(cfg.beta);
    f * (1.0 - penalty)
}

/// Mean METEOR over pairs.
pub fn meteor(pairs: &[EvalPair], cfg: &MeteorConfig) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("METEOR needs at least one pair"));
    }
    let sum: f64 = pairs.iter().map(|p| meteor_pair(p, cfg)).sum();
    Ok(sum / pairs.len() as f64)
}
