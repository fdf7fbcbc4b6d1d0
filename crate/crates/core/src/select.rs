//! Suitability scoring and fine-tuning set assembly.
//!
//! A candidate language's suitability is the mean of its normalized
//! semantic and textual similarity to the target; it is selected when that
//! mean is at least the threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analyze::{Cell, Table};
use crate::corpus::{self, Corpus};
use crate::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityRow {
    pub language: String,
    pub sim_sem_raw: Option<f64>,
    pub sim_sem_norm: f64,
    pub sim_text_raw: Option<u64>,
    pub sim_text_norm: f64,
    pub suitability: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityReport {
    pub target: String,
    pub theta: f64,
    /// Sorted by language tag.
    pub rows: Vec<SuitabilityRow>,
    /// Settings the scores depend on (corpus hashes, tokenizer, model and
    /// clone parameters).
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

impl SuitabilityReport {
    pub fn selected(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.selected)
            .map(|r| r.language.as_str())
            .collect()
    }

    pub fn row(&self, language: &str) -> Option<&SuitabilityRow> {
        self.rows.iter().find(|r| r.language == language)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "language",
            "sim_sem_raw",
            "sim_sem_norm",
            "sim_text_raw",
            "sim_text_norm",
            "suitability",
            "selected",
        ]);
        for r in &self.rows {
            t.push_row(vec![
                r.language.as_str().into(),
                r.sim_sem_raw.map_or(Cell::Null, Cell::Number),
                r.sim_sem_norm.into(),
                r.sim_text_raw.map_or(Cell::Null, |c| Cell::Number(c as f64)),
                r.sim_text_norm.into(),
                r.suitability.into(),
                if r.selected { "yes" } else { "no" }.into(),
            ]);
        }
        t
    }

    /// Compares the computed selection with a selection claimed elsewhere
    /// (e.g. a published write-up).
    pub fn compare_selection<S: AsRef<str>>(&self, claimed: &[S]) -> SelectionDiscrepancy {
        let ours: BTreeSet<String> = self.selected().into_iter().map(str::to_owned).collect();
        let theirs: BTreeSet<String> = claimed.iter().map(|s| s.as_ref().to_owned()).collect();
        SelectionDiscrepancy {
            claimed_not_selected: theirs.difference(&ours).cloned().collect(),
            selected_not_claimed: ours.difference(&theirs).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionDiscrepancy {
    pub claimed_not_selected: Vec<String>,
    pub selected_not_claimed: Vec<String>,
}

impl SelectionDiscrepancy {
    pub fn is_consistent(&self) -> bool {
        self.claimed_not_selected.is_empty() && self.selected_not_claimed.is_empty()
    }
}

impl fmt::Display for SelectionDiscrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_consistent() {
            return f.write_str("selection matches");
        }
        write!(
            f,
            "claimed but below threshold: {:?}; above threshold but not claimed: {:?}",
            self.claimed_not_selected, self.selected_not_claimed
        )
    }
}

fn check_unit(name: &str, lang: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!(
            "{name} score {v} for {lang:?} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// Averages normalized semantic and textual scores per language and
/// selects those with `suitability >= theta`.
pub fn suitability(
    sem_norm: &BTreeMap<String, f64>,
    text_norm: &BTreeMap<String, f64>,
    theta: f64,
) -> Result<SuitabilityReport> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta {theta} is outside [0, 1]"
        )));
    }
    suitability_unchecked_theta(sem_norm, text_norm, theta)
}

/// [`suitability`] without the `theta ∈ [0, 1]` check, for sweeping
/// thresholds past the ends of the range.
pub fn suitability_unchecked_theta(
    sem_norm: &BTreeMap<String, f64>,
    text_norm: &BTreeMap<String, f64>,
    theta: f64,
) -> Result<SuitabilityReport> {
    if !sem_norm.keys().eq(text_norm.keys()) {
        let a: BTreeSet<_> = sem_norm.keys().collect();
        let b: BTreeSet<_> = text_norm.keys().collect();
        return Err(Error::KeyMismatch(format!(
            "semantic only: {:?}, textual only: {:?}",
            a.difference(&b).collect::<Vec<_>>(),
            b.difference(&a).collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::with_capacity(sem_norm.len());
    for ((lang, &sem), &text) in sem_norm.iter().zip(text_norm.values()) {
        check_unit("semantic", lang, sem)?;
        check_unit("textual", lang, text)?;
        let s = (sem + text) / 2.0;
        rows.push(SuitabilityRow {
            language: lang.clone(),
            sim_sem_raw: None,
            sim_sem_norm: sem,
            sim_text_raw: None,
            sim_text_norm: text,
            suitability: s,
            selected: s >= theta,
        });
    }
    Ok(SuitabilityReport {
        target: String::new(),
        theta,
        rows,
        provenance: BTreeMap::new(),
    })
}

/// The fine-tuning corpus: every selected corpus followed by the target.
pub fn build_finetune_set(target: &Corpus, selected: &[&Corpus]) -> Result<Corpus> {
    let mut langs = BTreeSet::new();
    for c in selected {
        if c.language == target.language {
            return Err(Error::InvalidArgument(format!(
                "target language {:?} is also in the selected list",
                target.language
            )));
        }
        if !langs.insert(c.language.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "language {:?} passed twice",
                c.language
            )));
        }
    }
    let mut all: Vec<&Corpus> = selected.to_vec();
    all.push(target);
    corpus::combine(&all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Summarization,
    Search,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "summarization" | "code-summarization" => Ok(Task::Summarization),
            "search" | "code-search" => Ok(Task::Search),
            _ => Err(Error::UnknownTask(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    /// Score candidates by semantic + textual similarity and fine-tune on
    /// the selected languages plus the target.
    SuitabilityPipeline,
    /// Fine-tune on every available language; no similarity computation.
    CombinedMultilingual,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::SuitabilityPipeline => f.write_str("suitability pipeline"),
            Strategy::CombinedMultilingual => f.write_str("combined multilingual"),
        }
    }
}

pub fn recommend_for_task(task: Task) -> Strategy {
    match task {
        Task::Summarization => Strategy::SuitabilityPipeline,
        Task::Search => Strategy::CombinedMultilingual,
    }
}
