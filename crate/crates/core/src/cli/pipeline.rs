//! The end-to-end suitability run with a content-addressed cache.
//!
//! Cache entries live in `<out_dir>/cache/` and are named by a SHA-256 over
//! everything the entry depends on: corpus contents, tokenizer version and
//! the relevant parameters. A changed input simply produces a new key.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{load_language, RunConfig};
use crate::analyze::{emit_report, ReportFormat};
use crate::clone::{self, CloneCount, CloneParams};
use crate::corpus::{self, Corpus, LoadOptions};
use crate::embed::{self, EmbeddingModel};
use crate::select::{self, SuitabilityReport};
use crate::{Error, Result, TOKENIZER_VERSION};

pub const REPORT_JSON: &str = "suitability.json";
pub const REPORT_TEXT: &str = "suitability.txt";

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub source: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

trait Stage<T> {
    fn stage(self, name: &'static str) -> Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, name: &'static str) -> Result<T, StageError> {
        self.map_err(|source| StageError {
            stage: name,
            source,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
}

#[derive(Debug)]
pub struct SuitabilityOutcome {
    pub report: SuitabilityReport,
    pub json_path: PathBuf,
    pub text_path: PathBuf,
    /// The table in the configured stdout format.
    pub rendered: String,
    pub cache: CacheStats,
}

/// SHA-256 of a corpus's canonical JSONL serialization.
pub fn corpus_fingerprint(corpus: &Corpus) -> Result<String> {
    let mut buf = Vec::new();
    corpus::write_jsonl_to(corpus, &mut buf)?;
    Ok(hex::encode(Sha256::digest(&buf)))
}

fn key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

struct Cache {
    dir: Option<PathBuf>,
    stats: std::sync::Mutex<CacheStats>,
}

impl Cache {
    fn new(out_dir: &Path, enabled: bool) -> Result<Cache> {
        let dir = if enabled {
            let d = out_dir.join("cache");
            fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
            Some(d)
        } else {
            None
        };
        Ok(Cache {
            dir,
            stats: Default::default(),
        })
    }

    fn record(&self, hit: bool) {
        let mut s = self.stats.lock().expect("cache stats lock");
        if hit {
            s.hits += 1;
        } else {
            s.misses += 1;
        }
    }

    fn get_or<T, F, R, W>(&self, name: &str, read: R, write: W, compute: F) -> Result<T>
    where
        F: FnOnce() -> Result<T>,
        R: FnOnce(&[u8]) -> Result<T>,
        W: FnOnce(&T) -> Result<Vec<u8>>,
    {
        let Some(dir) = &self.dir else {
            self.record(false);
            return compute();
        };
        let path = dir.join(name);
        if let Ok(bytes) = fs::read(&path) {
            match read(&bytes) {
                Ok(v) => {
                    log::info!("cache hit {}", path.display());
                    self.record(true);
                    return Ok(v);
                }
                Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
        self.record(false);
        let v = compute()?;
        let tmp = dir.join(format!("{name}.tmp{}", std::process::id()));
        fs::write(&tmp, write(&v)?).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(v)
    }

    fn json<T, F>(&self, name: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        self.get_or(
            name,
            |b| Ok(serde_json::from_slice(b)?),
            |v| Ok(serde_json::to_vec(v)?),
            compute,
        )
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Loads the corpora, trains (or reuses) the embedding model, scores every
/// candidate against the target and writes `suitability.json` and
/// `suitability.txt` into the output directory.
pub fn cmd_suitability(cfg: &RunConfig) -> Result<SuitabilityOutcome, StageError> {
    cfg.validate().stage("config")?;
    let format: ReportFormat = cfg.format.parse().stage("config")?;
    let opts = LoadOptions {
        lenient: cfg.lenient,
    };

    let mut corpora: BTreeMap<&str, Corpus> = BTreeMap::new();
    for (lang, sources) in &cfg.corpora {
        let mut c = load_language(lang, sources, opts).stage("load")?;
        if cfg.bimodal_only {
            c = c.bimodal_only();
        }
        if c.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "language {lang:?} has no usable documents"
            )))
            .stage("load");
        }
        log::info!("{lang}: {} documents", c.len());
        corpora.insert(lang, c);
    }
    let mut fingerprints = BTreeMap::new();
    for (lang, c) in &corpora {
        fingerprints.insert(*lang, corpus_fingerprint(c).stage("load")?);
    }

    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::io(&cfg.out_dir, e))
        .stage("output")?;
    let cache = Cache::new(&cfg.out_dir, cfg.cache).stage("output")?;

    let embed_json = serde_json::to_string(&cfg.embed)
        .map_err(Error::from)
        .stage("config")?;
    let seed = cfg.seed.to_string();
    let mut model_parts = vec!["model", TOKENIZER_VERSION, &embed_json, &seed];
    for (lang, fp) in &fingerprints {
        model_parts.push(lang);
        model_parts.push(fp);
    }
    let model_key = key(&model_parts);
    let model: EmbeddingModel = cache
        .get_or(
            &format!("model-{model_key}.bin"),
            |b: &[u8]| embed::read_model(b),
            |m| {
                let mut buf = Vec::new();
                embed::write_model(m, &mut buf)?;
                Ok(buf)
            },
            || {
                let all: Vec<&Corpus> = corpora.values().collect();
                let combined = corpus::combine(&all)?;
                log::info!("training embeddings on {} documents", combined.len());
                embed::train(&combined, &cfg.embed, cfg.seed)
            },
        )
        .stage("train")?;

    let params = CloneParams::with_min_tokens(cfg.min_tokens);
    let params_json = serde_json::to_string(&params)
        .map_err(Error::from)
        .stage("config")?;
    let target = &corpora[cfg.target.as_str()];
    let target_fp = fingerprints[cfg.target.as_str()].as_str();
    let candidates: Vec<&str> = cfg.candidates().collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
        .stage("config")?;
    let scored: Vec<(f64, CloneCount)> = pool.install(|| {
        candidates
            .par_iter()
            .map(|&lang| {
                let cand = &corpora[lang];
                let fp = fingerprints[lang].as_str();
                let sem: f64 = cache
                    .json(
                        &format!("semsim-{}.json", key(&["semsim", &model_key, fp, target_fp])),
                        || embed::semantic_similarity(&model, cand, target),
                    )
                    .stage("semantic similarity")?;
                let text: CloneCount = cache
                    .json(
                        &format!(
                            "clones-{}.json",
                            key(&["clones", TOKENIZER_VERSION, &params_json, fp, target_fp])
                        ),
                        || clone::textual_similarity(cand, target, &params),
                    )
                    .stage("textual similarity")?;
                if text.truncated {
                    log::warn!("{lang}: clone count hit the cap and is a lower bound");
                }
                log::info!("{lang}: semantic {sem:.6}, clone pairs {}", text.count);
                Ok((sem, text))
            })
            .collect::<Result<Vec<_>, StageError>>()
    })?;

    let sem_raw: BTreeMap<String, f64> = candidates
        .iter()
        .zip(&scored)
        .map(|(l, s)| (l.to_string(), s.0))
        .collect();
    let text_raw: BTreeMap<String, u64> = candidates
        .iter()
        .zip(&scored)
        .map(|(l, s)| (l.to_string(), s.1.count))
        .collect();
    let sem = embed::normalize_scores(&sem_raw).stage("normalize")?;
    let text = clone::normalize_clone_counts(&text_raw).stage("normalize")?;
    let mut report = select::suitability(&sem.normalized, &text, cfg.theta).stage("suitability")?;
    report.target = cfg.target.clone();
    for row in &mut report.rows {
        row.sim_sem_raw = Some(sem_raw[&row.language]);
        row.sim_text_raw = Some(text_raw[&row.language]);
    }
    let p = &mut report.provenance;
    p.insert("tokenizer".into(), TOKENIZER_VERSION.into());
    p.insert("length_unit".into(), "plaintext tokens".into());
    p.insert("embed_config".into(), embed_json.clone());
    p.insert("seed".into(), seed.clone());
    p.insert("model".into(), model_key.clone());
    p.insert("clone_params".into(), params_json.clone());
    p.insert(
        "documents".into(),
        if cfg.bimodal_only { "bimodal only" } else { "all code" }.into(),
    );
    for (lang, fp) in &fingerprints {
        p.insert(format!("corpus.{lang}"), fp.clone());
    }

    let table = report.to_table();
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(Error::from)
        .stage("report")?;
    json.push('\n');
    let text_table = emit_report(&table, ReportFormat::Text).stage("report")?;
    let rendered = emit_report(&table, format).stage("report")?;
    let json_path = cfg.out_dir.join(REPORT_JSON);
    let text_path = cfg.out_dir.join(REPORT_TEXT);
    write_file(&json_path, &json).stage("report")?;
    write_file(&text_path, &text_table).stage("report")?;

    let cache = cache.stats.into_inner().expect("cache stats lock");
    Ok(SuitabilityOutcome {
        report,
        json_path,
        text_path,
        rendered,
        cache,
    })
}
