use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clone::DEFAULT_MIN_TOKENS;
use crate::corpus::{self, Corpus, LoadOptions, Split};
use crate::embed::EmbedConfig;
use crate::select::DEFAULT_THETA;
use crate::{Error, Result};

/// One input file. A bare path takes its split from the file name
/// (`*train*`, `*valid*`, `*test*`), falling back to unsplit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorpusSource {
    Path(PathBuf),
    Entry {
        path: PathBuf,
        #[serde(default)]
        split: Option<Split>,
    },
}

impl CorpusSource {
    pub fn path(&self) -> &Path {
        match self {
            CorpusSource::Path(p) | CorpusSource::Entry { path: p, .. } => p,
        }
    }

    pub fn split(&self) -> Split {
        match self {
            CorpusSource::Entry { split: Some(s), .. } => *s,
            _ => split_from_name(self.path()),
        }
    }

    fn resolved(&self, base: &Path) -> CorpusSource {
        let path = base.join(self.path());
        CorpusSource::Entry {
            path,
            split: Some(self.split()),
        }
    }
}

pub fn split_from_name(path: &Path) -> Split {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    if name.contains("train") {
        Split::Train
    } else if name.contains("valid") {
        Split::Valid
    } else if name.contains("test") {
        Split::Test
    } else {
        Split::Unsplit
    }
}

/// Everything `suitability` needs. Loaded from JSON; command-line flags
/// override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Input files per language tag.
    pub corpora: BTreeMap<String, Vec<CorpusSource>>,
    pub target: String,
    pub theta: f64,
    pub min_tokens: usize,
    pub embed: EmbedConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Format of the table printed to stdout: text, json or csv.
    pub format: String,
    /// Candidates scored in parallel.
    pub jobs: usize,
    pub lenient: bool,
    /// Score only documents that have a docstring.
    pub bimodal_only: bool,
    pub cache: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpora: BTreeMap::new(),
            target: String::new(),
            theta: DEFAULT_THETA,
            min_tokens: DEFAULT_MIN_TOKENS,
            embed: EmbedConfig::default(),
            seed: 0,
            out_dir: PathBuf::from("langsuit-out"),
            format: "text".into(),
            jobs: 1,
            lenient: false,
            bimodal_only: false,
            cache: true,
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative corpus paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for sources in cfg.corpora.values_mut() {
            for s in sources.iter_mut() {
                *s = s.resolved(base);
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target.is_empty() {
            return Err(Error::InvalidArgument("no target language given".into()));
        }
        if !self.corpora.contains_key(&self.target) {
            return Err(Error::InvalidArgument(format!(
                "target {:?} has no corpus",
                self.target
            )));
        }
        if self.corpora.len() < 2 {
            return Err(Error::InvalidArgument("need at least one candidate language".into()));
        }
        if let Some((lang, _)) = self.corpora.iter().find(|(_, s)| s.is_empty()) {
            return Err(Error::InvalidArgument(format!("language {lang:?} lists no files")));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidArgument(format!(
                "theta {} is outside [0, 1]",
                self.theta
            )));
        }
        if self.min_tokens == 0 {
            return Err(Error::InvalidArgument("min_tokens must be >= 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be >= 1".into()));
        }
        self.format.parse::<crate::analyze::ReportFormat>()?;
        self.embed.validate()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &str> {
        self.corpora
            .keys()
            .map(String::as_str)
            .filter(move |l| *l != self.target)
    }
}

/// Loads and concatenates every file of one language.
pub fn load_language(language: &str, sources: &[CorpusSource], opts: LoadOptions) -> Result<Corpus> {
    let parts = sources
        .iter()
        .map(|s| corpus::load_jsonl(s.path(), language, s.split(), opts))
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    let refs: Vec<&Corpus> = parts.iter().collect();
    let mut merged = corpus::combine(&refs)?;
    merged.language = language.to_owned();
    Ok(merged)
}
