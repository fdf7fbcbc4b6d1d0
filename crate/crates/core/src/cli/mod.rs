//! Command-line frontend. `langsuit suitability` runs the whole pipeline;
//! the other subcommands expose one step each.
//!
//! Exit codes: 0 success, 1 input or processing error, 2 when the
//! suitability run selects no language.

mod config;
mod pipeline;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analyze::{self, emit_report, Cell, ReportFormat, Table};
use crate::clone::{self, CloneParams};
use crate::corpus::{self, Corpus, LoadOptions, Split};
use crate::embed::{self, EmbedConfig};
use crate::metrics::{self, input, EvalPair, MeteorConfig, PerfTimeRecord, SynonymMap};
use crate::{Error, Result};

pub use config::{load_language, split_from_name, CorpusSource, RunConfig};
pub use pipeline::{
    cmd_suitability, corpus_fingerprint, CacheStats, StageError, SuitabilityOutcome, REPORT_JSON,
    REPORT_TEXT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NONE_SELECTED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "langsuit", version, about = "Choose fine-tuning source languages by corpus similarity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score candidate languages against a target and select the suitable ones.
    Suitability(SuitabilityArgs),
    /// Load JSONL files of one language and write them as one normalized JSONL file.
    Ingest(IngestArgs),
    /// Document counts and token-length summary of a corpus.
    Stats(StatsArgs),
    /// Train n-gram embeddings on the union of the given corpora.
    TrainEmbed(TrainEmbedArgs),
    /// Mean pairwise cosine between a candidate and the target corpus.
    Semsim(SemsimArgs),
    /// Count maximal cross-corpus token clones.
    Textsim(TextsimArgs),
    /// Smoothed sentence BLEU averaged over pairs (percent).
    EvalBleu(BleuArgs),
    /// METEOR averaged over pairs.
    EvalMeteor(MeteorArgs),
    /// Mean reciprocal rank.
    EvalMrr(MrrArgs),
    /// Two-sided Mann-Whitney U test.
    Utest(UtestArgs),
    /// Performance-to-time ratio per model.
    Ptr(PtrArgs),
    /// Quartile bins of code length.
    Bins(BinsArgs),
    /// Re-render a JSON table, optionally adding an improvement column.
    Report(ReportArgs),
}

/// `LANG=PATH`.
#[derive(Debug, Clone)]
pub struct LangPath {
    pub language: String,
    pub path: PathBuf,
}

fn parse_lang_path(s: &str) -> std::result::Result<LangPath, String> {
    let (l, p) = s
        .split_once('=')
        .ok_or_else(|| format!("expected LANG=PATH, got {s:?}"))?;
    if l.is_empty() || p.is_empty() {
        return Err(format!("expected LANG=PATH, got {s:?}"));
    }
    Ok(LangPath {
        language: l.to_owned(),
        path: PathBuf::from(p),
    })
}

#[derive(Args, Debug, Default)]
pub struct EmbedFlags {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    /// Embedding training threads; more than 1 is not reproducible.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub include_docstrings: bool,
}

impl EmbedFlags {
    fn apply(&self, c: &mut EmbedConfig) {
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.negatives {
            c.negatives = v;
        }
        if let Some(v) = self.lr {
            c.lr = v;
        }
        if let Some(v) = self.min_count {
            c.min_count = v;
        }
        if let Some(v) = self.max_tokens {
            c.max_tokens = v;
        }
        if let Some(v) = self.threads {
            c.threads = v;
        }
        if self.include_docstrings {
            c.include_docstrings = true;
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct SuitabilityArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus file for a language (repeatable). Replaces that language's
    /// files from the config.
    #[arg(long = "corpus", value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub corpora: Vec<LangPath>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[command(flatten)]
    pub embed: EmbedFlags,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// stdout table format: text, json or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// Candidates scored in parallel.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub lenient: bool,
    #[arg(long)]
    pub bimodal_only: bool,
    #[arg(long)]
    pub no_cache: bool,
}

impl SuitabilityArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut from_flags: BTreeMap<String, Vec<CorpusSource>> = BTreeMap::new();
        for lp in &self.corpora {
            from_flags
                .entry(lp.language.clone())
                .or_default()
                .push(CorpusSource::Path(lp.path.clone()));
        }
        cfg.corpora.extend(from_flags);
        if let Some(v) = &self.target {
            cfg.target = v.clone();
        }
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = self.min_tokens {
            cfg.min_tokens = v;
        }
        self.embed.apply(&mut cfg.embed);
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &self.format {
            cfg.format = v.clone();
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        cfg.lenient |= self.lenient;
        cfg.bimodal_only |= self.bimodal_only;
        if self.no_cache {
            cfg.cache = false;
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub language: String,
    /// Split for every input; inferred from each file name when absent.
    #[arg(long)]
    pub split: Option<Split>,
    #[arg(long)]
    pub lenient: bool,
    /// Output JSONL (gzip when it ends in .gz).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub language: String,
    #[arg(long)]
    pub split: Option<Split>,
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value = "text")]
    pub format: ReportFormat,
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainEmbedArgs {
    #[arg(long = "corpus", value_name = "LANG=PATH", value_parser = parse_lang_path, required = true)]
    pub corpora: Vec<LangPath>,
    #[command(flatten)]
    pub embed: EmbedFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub bimodal_only: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a `key v1 .. vd` text export.
    #[arg(long)]
    pub text_export: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SemsimArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub candidate: LangPath,
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub target: LangPath,
    #[arg(long)]
    pub bimodal_only: bool,
}

#[derive(Args, Debug)]
pub struct TextsimArgs {
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub candidate: LangPath,
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub target: LangPath,
    #[arg(long, default_value_t = clone::DEFAULT_MIN_TOKENS)]
    pub min_tokens: usize,
    /// Stop after this many pairs.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Write every clone pair as JSONL.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PairInput {
    /// Hypotheses, one whitespace-tokenized sentence per line.
    #[arg(long, requires = "reference", conflicts_with = "pairs")]
    pub hyp: Option<PathBuf>,
    /// References aligned with --hyp.
    #[arg(long = "ref", id = "reference", requires = "hyp")]
    pub reference: Option<PathBuf>,
    /// JSONL of {"hyp": ..., "ref": ...}.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
}

impl PairInput {
    fn load(&self) -> Result<Vec<EvalPair>> {
        match (&self.hyp, &self.reference, &self.pairs) {
            (Some(h), Some(r), None) => input::read_aligned(h, r),
            (None, None, Some(p)) => input::read_pairs_jsonl(p),
            _ => Err(Error::InvalidArgument(
                "give either --hyp and --ref, or --pairs".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
pub struct BleuArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
}

#[derive(Args, Debug)]
pub struct MeteorArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub no_stem: bool,
    #[arg(long)]
    pub case_sensitive: bool,
    /// `word<TAB>synonym` file enabling the synonym stage.
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MrrArgs {
    /// JSONL of {"qid", "rank"} or {"qid", "scores"}.
    #[arg(long)]
    pub rankings: PathBuf,
}

#[derive(Args, Debug)]
pub struct UtestArgs {
    /// One number per line.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Args, Debug)]
pub struct PtrArgs {
    /// JSON array or JSONL of {"model", "performance", "fine_tune_time"}.
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
}

#[derive(Args, Debug)]
pub struct BinsArgs {
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub test: LangPath,
    /// Take quartile boundaries from this corpus instead of the test set.
    #[arg(long, value_name = "LANG=PATH", value_parser = parse_lang_path)]
    pub reference: Option<LangPath>,
    /// Print the full id lists instead of a summary table.
    #[arg(long)]
    pub ids: bool,
    #[arg(long, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// JSON table as written by `--format json`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "text")]
    pub format: ReportFormat,
    /// Add `100 (VALUE - BASELINE) / BASELINE` as a column: VALUE,BASELINE,LABEL.
    #[arg(long, value_name = "VALUE,BASELINE,LABEL")]
    pub improvement: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli.command, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn load(lp: &LangPath, split: Option<Split>, lenient: bool) -> Result<Corpus> {
    corpus::load_jsonl(
        &lp.path,
        &lp.language,
        split.unwrap_or_else(|| split_from_name(&lp.path)),
        LoadOptions { lenient },
    )
}

fn load_files(language: &str, inputs: &[PathBuf], split: Option<Split>, lenient: bool) -> Result<Corpus> {
    let sources: Vec<CorpusSource> = inputs
        .iter()
        .map(|p| CorpusSource::Entry {
            path: p.clone(),
            split,
        })
        .collect();
    load_language(language, &sources, LoadOptions { lenient })
}

fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(t.parse().map_err(|_| Error::MalformedLine {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("not a number: {t:?}"),
        })?);
    }
    Ok(out)
}

fn read_records(path: &Path) -> Result<Vec<PerfTimeRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('[') {
        return Ok(serde_json::from_str(&text)?);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::MalformedLine {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn print_json<T: serde::Serialize, W: Write>(v: &T, out: &mut W) -> Result<()> {
    let s = serde_json::to_string_pretty(v)?;
    writeln!(out, "{s}").map_err(out_err)
}

/// Runs one parsed command, writing data to `out`. Returns the exit code.
pub fn execute<W: Write>(command: Command, out: &mut W) -> Result<i32> {
    match command {
        Command::Suitability(args) => {
            let cfg = args.to_config()?;
            let outcome = match cmd_suitability(&cfg) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_INPUT_ERROR);
                }
            };
            out.write_all(outcome.rendered.as_bytes()).map_err(out_err)?;
            let selected = outcome.report.selected();
            log::info!(
                "cache: {} hits, {} misses",
                outcome.cache.hits,
                outcome.cache.misses
            );
            if selected.is_empty() {
                eprintln!("no language reached theta = {}", cfg.theta);
                return Ok(EXIT_NONE_SELECTED);
            }
            eprintln!("selected: {}", selected.join(", "));
        }
        Command::Ingest(a) => {
            let c = load_files(&a.language, &a.inputs, a.split, a.lenient)?;
            corpus::write_jsonl(&c, &a.out)?;
            eprintln!("wrote {} documents to {}", c.len(), a.out.display());
        }
        Command::Stats(a) => {
            let c = load_files(&a.language, &a.inputs, a.split, a.lenient)?;
            let s = corpus::stats(&c);
            match a.format {
                ReportFormat::Json => print_json(&s, out)?,
                f => {
                    let mut t = Table::new(["field", "value"]);
                    let mut row = |k: &str, v: Cell| t.push_row(vec![k.into(), v]);
                    row("language", s.language.as_str().into());
                    row("total", (s.total as f64).into());
                    for (split, n) in &s.per_split {
                        row(&format!("split.{split}"), (*n as f64).into());
                    }
                    row("bimodal", (s.bimodal as f64).into());
                    row("unimodal", (s.unimodal as f64).into());
                    if let Some(l) = &s.token_length {
                        for (k, v) in [
                            ("tokens.min", l.min),
                            ("tokens.q1", l.q1),
                            ("tokens.median", l.median),
                            ("tokens.q3", l.q3),
                            ("tokens.max", l.max),
                            ("tokens.mean", l.mean),
                        ] {
                            row(k, v.into());
                        }
                    }
                    out.write_all(emit_report(&t, f)?.as_bytes()).map_err(out_err)?;
                }
            }
        }
        Command::TrainEmbed(a) => {
            let mut cfg = EmbedConfig::default();
            a.embed.apply(&mut cfg);
            let mut parts = Vec::new();
            for lp in &a.corpora {
                let c = load(lp, None, false)?;
                parts.push(if a.bimodal_only { c.bimodal_only() } else { c });
            }
            let refs: Vec<&Corpus> = parts.iter().collect();
            let model = embed::train(&corpus::combine(&refs)?, &cfg, a.seed)?;
            let f = File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
            embed::write_model(&model, std::io::BufWriter::new(f))?;
            if let Some(p) = &a.text_export {
                let f = File::create(p).map_err(|e| Error::io(p, e))?;
                embed::write_text_export(&model, std::io::BufWriter::new(f))?;
            }
            eprintln!("{} vocabulary entries, dim {}", model.vocab.len(), model.dim);
        }
        Command::Semsim(a) => {
            let f = File::open(&a.model).map_err(|e| Error::io(&a.model, e))?;
            let model = embed::read_model(BufReader::new(f))?;
            let mut cand = load(&a.candidate, None, false)?;
            let mut target = load(&a.target, None, false)?;
            if a.bimodal_only {
                cand = cand.bimodal_only();
                target = target.bimodal_only();
            }
            let s = embed::semantic_similarity(&model, &cand, &target)?;
            writeln!(out, "{s}").map_err(out_err)?;
        }
        Command::Textsim(a) => {
            let cand = load(&a.candidate, None, false)?;
            let target = load(&a.target, None, false)?;
            let params = CloneParams {
                cap: a.cap,
                ..CloneParams::with_min_tokens(a.min_tokens)
            };
            let count = match &a.pairs {
                Some(p) => {
                    let set = clone::detect_cross_clones(&cand, &target, &params)?;
                    let f = File::create(p).map_err(|e| Error::io(p, e))?;
                    set.write_jsonl(std::io::BufWriter::new(f))?;
                    clone::CloneCount {
                        count: set.pairs.len() as u64,
                        truncated: set.truncated,
                    }
                }
                None => clone::textual_similarity(&cand, &target, &params)?,
            };
            print_json(&count, out)?;
        }
        Command::EvalBleu(a) => {
            let score = metrics::bleu(&a.input.load()?, a.max_n)?;
            writeln!(out, "{score}").map_err(out_err)?;
        }
        Command::EvalMeteor(a) => {
            let cfg = MeteorConfig {
                stem: !a.no_stem,
                lowercase: !a.case_sensitive,
                synonyms: a.synonyms.as_deref().map(SynonymMap::load).transpose()?,
                ..Default::default()
            };
            let score = metrics::meteor(&a.input.load()?, &cfg)?;
            writeln!(out, "{score}").map_err(out_err)?;
        }
        Command::EvalMrr(a) => {
            let score = metrics::mrr(&input::read_rankings_jsonl(&a.rankings)?)?;
            writeln!(out, "{score}").map_err(out_err)?;
        }
        Command::Utest(a) => {
            let r = metrics::mann_whitney_u(&read_numbers(&a.a)?, &read_numbers(&a.b)?)?;
            print_json(&r, out)?;
        }
        Command::Ptr(a) => {
            let map = metrics::ptr(&read_records(&a.records)?)?;
            let t = Table::from_pairs("model", "ptr", map.iter().map(|(k, v)| (k.as_str(), *v)));
            out.write_all(emit_report(&t, a.format)?.as_bytes()).map_err(out_err)?;
        }
        Command::Bins(a) => {
            let test = load(&a.test, None, false)?;
            let bins = match &a.reference {
                Some(r) => analyze::quartile_bins_with_reference(&test, &load(r, None, false)?)?,
                None => analyze::quartile_bins(&test)?,
            };
            if a.ids {
                print_json(&bins, out)?;
            } else {
                let (q1, q2, q3) = bins.boundaries;
                let bounds = [
                    (f64::NEG_INFINITY, q1),
                    (q1, q2),
                    (q2, q3),
                    (q3, f64::INFINITY),
                ];
                let mut t = Table::new(["bin", "from", "to", "documents"]);
                for (i, ((lo, hi), n)) in bounds.iter().zip(bins.sizes()).enumerate() {
                    let edge = |x: f64| if x.is_finite() { Cell::from(x) } else { Cell::Null };
                    t.push_row(vec![
                        format!("Q{}", i + 1).into(),
                        edge(*lo),
                        edge(*hi),
                        (n as f64).into(),
                    ]);
                }
                out.write_all(emit_report(&t, a.format)?.as_bytes()).map_err(out_err)?;
            }
        }
        Command::Report(a) => {
            let text = std::fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
            let mut table = analyze::load_json_table(&text)?;
            if let Some(spec) = &a.improvement {
                let parts: Vec<&str> = spec.split(',').collect();
                let [value, baseline, label] = parts[..] else {
                    return Err(Error::InvalidArgument(format!(
                        "--improvement expects VALUE,BASELINE,LABEL, got {spec:?}"
                    )));
                };
                table.add_improvement(value, baseline, label)?;
            }
            let rendered = emit_report(&table, a.format)?;
            match &a.out {
                Some(p) => std::fs::write(p, rendered).map_err(|e| Error::io(p, e))?,
                None => out.write_all(rendered.as_bytes()).map_err(out_err)?,
            }
        }
    }
    Ok(EXIT_OK)
}
