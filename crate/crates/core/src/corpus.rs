//! CodeSearchNet-style corpora: JSONL ingestion, writing, combining and
//! summary statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use serde::{Deserialize, Serialize};

use crate::analyze::percentile;
use crate::token;
use crate::{Error, Result};

/// Language tag used for corpora that mix languages.
pub const COMBINED: &str = "combined";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
    Unsplit,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Valid, Split::Test, Split::Unsplit];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unsplit => "unsplit",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "valid" | "validation" | "dev" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            "unsplit" | "all" => Ok(Split::Unsplit),
            other => Err(Error::InvalidArgument(format!("unknown split {other:?}"))),
        }
    }
}

/// One function, optionally paired with its docstring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub id: String,
    pub language: String,
    pub split: Split,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub docstring: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub docstring_tokens: Option<Vec<String>>,
    /// 1-based line in the file this document was read from.
    #[serde(skip)]
    pub line: Option<usize>,
}

// `line` is diagnostic only and not part of document identity.
impl PartialEq for CorpusDocument {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.language == other.language
            && self.split == other.split
            && self.code == other.code
            && self.docstring == other.docstring
            && self.code_tokens == other.code_tokens
            && self.docstring_tokens == other.docstring_tokens
    }
}

impl Eq for CorpusDocument {}

impl CorpusDocument {
    pub fn new(
        id: impl Into<String>,
        language: impl Into<String>,
        split: Split,
        code: impl Into<String>,
    ) -> Self {
        CorpusDocument {
            id: id.into(),
            language: language.into(),
            split,
            code: code.into(),
            docstring: None,
            code_tokens: None,
            docstring_tokens: None,
            line: None,
        }
    }

    pub fn with_docstring(mut self, docstring: impl Into<String>) -> Self {
        self.docstring = Some(docstring.into());
        self
    }

    /// Code paired with a non-empty natural-language description.
    pub fn is_bimodal(&self) -> bool {
        self.docstring.as_deref().is_some_and(|d| !d.trim().is_empty())
    }
}

/// A language-tagged, ordered collection of documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub language: String,
    pub documents: Vec<CorpusDocument>,
    #[serde(default)]
    pub provenance: Vec<PathBuf>,
}

impl Corpus {
    /// Builds a corpus, checking id uniqueness and (for monolingual corpora)
    /// that every document carries the corpus language.
    pub fn new(language: impl Into<String>, documents: Vec<CorpusDocument>) -> Result<Self> {
        let language = language.into();
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
            if language != COMBINED && doc.language != language {
                return Err(Error::InvalidArgument(format!(
                    "document {:?} has language {:?} in a {:?} corpus",
                    doc.id, doc.language, language
                )));
            }
            if doc.code.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "document {:?} has empty code",
                    doc.id
                )));
            }
        }
        Ok(Corpus {
            language,
            documents,
            provenance: Vec::new(),
        })
    }

    pub fn empty(language: impl Into<String>) -> Self {
        Corpus {
            language: language.into(),
            documents: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn is_combined(&self) -> bool {
        self.language == COMBINED
    }

    /// Keeps only code paired with a docstring.
    pub fn bimodal_only(&self) -> Corpus {
        Corpus {
            language: self.language.clone(),
            documents: self
                .documents
                .iter()
                .filter(|d| d.is_bimodal())
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn split(&self, split: Split) -> Corpus {
        Corpus {
            language: self.language.clone(),
            documents: self
                .documents
                .iter()
                .filter(|d| d.split == split)
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip malformed lines with a warning instead of aborting.
    pub lenient: bool,
}

/// Fields of a CodeSearchNet record that we read. Everything else is ignored.
#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<serde_json::Value>,
    #[serde(default)]
    code: Option<String>,
    #[serde(default)]
    original_string: Option<String>,
    #[serde(default)]
    docstring: Option<String>,
    #[serde(default)]
    code_tokens: Option<Vec<String>>,
    #[serde(default)]
    docstring_tokens: Option<Vec<String>>,
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let inner: Box<dyn Read> = if is_gzip(path) {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufReader::new(inner)))
}

/// Loads one JSONL file (gzip-compressed when the name ends in `.gz`).
///
/// Every document gets `language` and `split` from the caller. Ids come from
/// an `id` field when present, else `<language>/<split>/<line>`.
pub fn load_jsonl(
    path: impl AsRef<Path>,
    language: &str,
    split: Split,
    opts: LoadOptions,
) -> Result<Corpus> {
    let path = path.as_ref();
    let reader = open_reader(path)?;
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    let mut skipped = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_line(&line, path, lineno, language, split);
        let doc = match parsed {
            Ok(doc) => doc,
            Err(err) if opts.lenient => {
                log::warn!("skipping: {err}");
                skipped += 1;
                continue;
            }
            Err(err) => return Err(err),
        };
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        documents.push(doc);
    }
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} malformed lines", path.display());
    }
    Ok(Corpus {
        language: language.to_owned(),
        documents,
        provenance: vec![path.to_path_buf()],
    })
}

fn parse_line(
    line: &str,
    path: &Path,
    lineno: usize,
    language: &str,
    split: Split,
) -> Result<CorpusDocument> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::MalformedLine {
        path: path.to_path_buf(),
        line: lineno,
        message: e.to_string(),
    })?;
    let code = raw
        .code
        .or(raw.original_string)
        .filter(|c| !c.is_empty())
        .ok_or_else(|| Error::MissingCode {
            path: path.to_path_buf(),
            line: lineno,
        })?;
    let id = match raw.id {
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => format!("{language}/{split}/{lineno}"),
    };
    Ok(CorpusDocument {
        id,
        language: language.to_owned(),
        split,
        code,
        docstring: raw.docstring,
        code_tokens: raw.code_tokens,
        docstring_tokens: raw.docstring_tokens,
        line: Some(lineno),
    })
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    language: &'a str,
    partition: Split,
    code: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    docstring: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    code_tokens: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    docstring_tokens: Option<&'a [String]>,
}

pub fn write_jsonl_to<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for doc in &corpus.documents {
        let rec = OutRecord {
            id: &doc.id,
            language: &doc.language,
            partition: doc.split,
            code: &doc.code,
            docstring: doc.docstring.as_deref(),
            code_tokens: doc.code_tokens.as_deref(),
            docstring_tokens: doc.docstring_tokens.as_deref(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

/// Writes the corpus as JSONL, gzip-compressed when `path` ends in `.gz`.
pub fn write_jsonl(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    if is_gzip(path) {
        let mut enc = GzEncoder::new(BufWriter::new(file), flate2::Compression::default());
        write_jsonl_to(corpus, &mut enc)?;
        enc.finish()
            .and_then(|mut w| w.flush())
            .map_err(|e| Error::io(path, e))
    } else {
        let mut w = BufWriter::new(file);
        write_jsonl_to(corpus, &mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Concatenates corpora in order into one `"combined"` corpus.
///
/// Ids that collide with an earlier document are re-prefixed with the
/// document's language.
pub fn combine(corpora: &[&Corpus]) -> Result<Corpus> {
    if corpora.is_empty() {
        return Err(Error::EmptyInput("combine needs at least one corpus"));
    }
    let total = corpora.iter().map(|c| c.len()).sum();
    let mut documents = Vec::with_capacity(total);
    let mut seen: HashSet<String> = HashSet::with_capacity(total);
    let mut provenance = Vec::new();
    for corpus in corpora {
        provenance.extend(corpus.provenance.iter().cloned());
        for doc in &corpus.documents {
            let mut doc = doc.clone();
            if seen.contains(&doc.id) {
                let base = format!("{}:{}", doc.language, doc.id);
                let mut candidate = base.clone();
                let mut n = 1;
                while seen.contains(&candidate) {
                    n += 1;
                    candidate = format!("{base}#{n}");
                }
                doc.id = candidate;
            }
            seen.insert(doc.id.clone());
            documents.push(doc);
        }
    }
    Ok(Corpus {
        language: COMBINED.to_owned(),
        documents,
        provenance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub language: String,
    pub total: usize,
    pub per_split: BTreeMap<Split, usize>,
    pub bimodal: usize,
    pub unimodal: usize,
    /// Quantiles of code length in plaintext tokens; `None` for an empty corpus.
    pub token_length: Option<LengthSummary>,
}

pub fn stats(corpus: &Corpus) -> CorpusStats {
    let mut per_split = BTreeMap::new();
    let mut bimodal = 0;
    let mut lengths = Vec::with_capacity(corpus.len());
    for doc in &corpus.documents {
        *per_split.entry(doc.split).or_insert(0) += 1;
        if doc.is_bimodal() {
            bimodal += 1;
        }
        lengths.push(token::length_of(doc) as f64);
    }
    lengths.sort_by(f64::total_cmp);
    let token_length = (!lengths.is_empty()).then(|| LengthSummary {
        min: lengths[0],
        q1: percentile(&lengths, 25.0),
        median: percentile(&lengths, 50.0),
        q3: percentile(&lengths, 75.0),
        max: lengths[lengths.len() - 1],
        mean: lengths.iter().sum::<f64>() / lengths.len() as f64,
    });
    CorpusStats {
        language: corpus.language.clone(),
        total: corpus.len(),
        per_split,
        bimodal,
        unimodal: corpus.len() - bimodal,
        token_length,
    }
}

/// Published CodeSearchNet sizes, used to sanity-check full-dataset loads.
pub mod codesearchnet {
    /// (language, bimodal, unimodal) counts of the pre-training data.
    pub const PRETRAIN: [(&str, usize, usize); 6] = [
        ("go", 317_832, 726_768),
        ("java", 500_754, 1_569_889),
        ("javascript", 143_252, 1_857_835),
        ("php", 662_907, 977_821),
        ("python", 458_219, 1_156_085),
        ("ruby", 52_905, 164_048),
    ];

    /// (language, train, valid, test) sizes of the cleaned summarization data.
    pub const SUMMARIZATION: [(&str, usize, usize, usize); 6] = [
        ("go", 317_832, 14_242, 14_291),
        ("java", 454_451, 15_328, 26_909),
        ("javascript", 123_889, 8_253, 6_483),
        ("php", 523_712, 26_015, 28_391),
        ("python", 412_178, 23_107, 22_176),
        ("ruby", 48_791, 2_209, 2_279),
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_file(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    const FIXTURE: &str = r#"{"repo":"r","code":"def a\n  1\nend","docstring":"Returns one.","code_tokens":["def","a","1","end"],"docstring_tokens":["Returns","one","."]}
{"original_string":"def b; end","docstring":""}
{"id":"custom-7","code":"puts \"x\"","url":"http://example.com","extra":{"nested":[1,2]}}
"#;

    #[test]
    fn load_three_line_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "ruby.jsonl", FIXTURE);
        let c = load_jsonl(&p, "ruby", Split::Train, LoadOptions::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.language, "ruby");
        let d = &c.documents;
        assert_eq!(d[0].id, "ruby/train/1");
        assert_eq!(d[0].code, "def a\n  1\nend");
        assert_eq!(d[0].docstring.as_deref(), Some("Returns one."));
        assert_eq!(
            d[0].code_tokens.as_deref().unwrap(),
            ["def", "a", "1", "end"]
        );
        assert_eq!(d[1].code, "def b; end");
        assert_eq!(d[1].docstring.as_deref(), Some(""));
        assert!(!d[1].is_bimodal());
        assert_eq!(d[2].id, "custom-7");
        assert_eq!(d[2].code, "puts \"x\"");
        assert_eq!(d[2].docstring, None);
        assert_eq!(d[2].line, Some(3));
        assert!(d.iter().all(|x| x.split == Split::Train && x.language == "ruby"));
    }

    #[test]
    fn empty_file_gives_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "e.jsonl", "");
        let c = load_jsonl(&p, "go", Split::Test, LoadOptions::default()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.provenance, vec![p]);
    }

    #[test]
    fn malformed_line_aborts_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.jsonl", "{\"code\":\"a\"}\n{not json\n");
        let err = load_jsonl(&p, "go", Split::Train, LoadOptions::default()).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lenient_skips_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "m.jsonl",
            "{\"code\":\"a\"}\n{not json\n{\"docstring\":\"no code\"}\n{\"code\":\"b\"}\n",
        );
        let c = load_jsonl(&p, "go", Split::Train, LoadOptions { lenient: true }).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents[1].code, "b");
        assert_eq!(c.documents[1].line, Some(4));
    }

    #[test]
    fn missing_code_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.jsonl", "{\"docstring\":\"x\"}\n");
        let err = load_jsonl(&p, "go", Split::Train, LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingCode { line: 1, .. }));
    }

    #[test]
    fn unreadable_file() {
        let err = load_jsonl(
            "/nonexistent/x.jsonl",
            "go",
            Split::Train,
            LoadOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "r.jsonl", FIXTURE);
        let c = load_jsonl(&p, "ruby", Split::Valid, LoadOptions::default()).unwrap();
        let gz = dir.path().join("r.jsonl.gz");
        write_jsonl(&c, &gz).unwrap();
        let back = load_jsonl(&gz, "ruby", Split::Valid, LoadOptions::default()).unwrap();
        assert_eq!(back.documents, c.documents);
    }

    fn doc(id: &str, lang: &str, code: &str) -> CorpusDocument {
        CorpusDocument::new(id, lang, Split::Train, code)
    }

    #[test]
    fn combine_singleton_only_changes_tag() {
        let c = Corpus::new("go", vec![doc("1", "go", "a"), doc("2", "go", "b")]).unwrap();
        let out = combine(&[&c]).unwrap();
        assert_eq!(out.language, COMBINED);
        assert_eq!(out.documents, c.documents);
    }

    #[test]
    fn combine_preserves_order_and_reprefixes() {
        let a = Corpus::new("go", vec![doc("1", "go", "a"), doc("2", "go", "b")]).unwrap();
        let b = Corpus::new("php", vec![doc("1", "php", "c"), doc("3", "php", "d")]).unwrap();
        let out = combine(&[&a, &b]).unwrap();
        let ids: Vec<_> = out.documents.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["1", "2", "php:1", "3"]);
        let codes: Vec<_> = out.documents.iter().map(|d| d.code.as_str()).collect();
        assert_eq!(codes, ["a", "b", "c", "d"]);
        // ids stay unique when the same corpus is combined twice
        let twice = combine(&[&a, &a]).unwrap();
        let ids: HashSet<_> = twice.documents.iter().map(|d| d.id.clone()).collect();
        assert_eq!(ids.len(), 4);
        assert!(Corpus::new(COMBINED, twice.documents).is_ok());
    }

    #[test]
    fn combine_empty_list_is_an_error() {
        assert!(matches!(combine(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn corpus_new_rejects_duplicates_and_foreign_language() {
        assert!(matches!(
            Corpus::new("go", vec![doc("1", "go", "a"), doc("1", "go", "b")]),
            Err(Error::DuplicateId(_))
        ));
        assert!(Corpus::new("go", vec![doc("1", "ruby", "a")]).is_err());
        assert!(Corpus::new(COMBINED, vec![doc("1", "ruby", "a"), doc("2", "go", "b")]).is_ok());
    }

    #[test]
    fn stats_counts_and_median() {
        let docs = (1..=5)
            .map(|n| {
                let code = vec!["x"; n].join(" ");
                let d = doc(&n.to_string(), "go", &code);
                if n % 2 == 0 {
                    d.with_docstring("doc")
                } else {
                    d
                }
            })
            .collect();
        let c = Corpus::new("go", docs).unwrap();
        let s = stats(&c);
        assert_eq!(s.total, 5);
        assert_eq!(s.bimodal, 2);
        assert_eq!(s.unimodal, 3);
        assert_eq!(s.per_split[&Split::Train], 5);
        let len = s.token_length.unwrap();
        assert_eq!(len.median, 3.0);
        assert_eq!(len.min, 1.0);
        assert_eq!(len.max, 5.0);
    }

    #[test]
    fn stats_on_empty_corpus() {
        let s = stats(&Corpus::empty("go"));
        assert_eq!((s.total, s.bimodal, s.unimodal), (0, 0, 0));
        assert!(s.per_split.is_empty());
        assert!(s.token_length.is_none());
    }

    #[test]
    fn published_table_sums() {
        let train: usize = codesearchnet::SUMMARIZATION.iter().map(|r| r.1).sum();
        assert_eq!(train, 1_880_853);
        let ruby = codesearchnet::PRETRAIN.iter().find(|r| r.0 == "ruby").unwrap();
        assert_eq!((ruby.1, ruby.2), (52_905, 164_048));
    }

    #[test]
    fn split_parsing() {
        assert_eq!("validation".parse::<Split>().unwrap(), Split::Valid);
        assert!("bogus".parse::<Split>().is_err());
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{{\"code\":\"x\"}}").unwrap();
        let c = load_jsonl(f.path(), "go", Split::Unsplit, LoadOptions::default()).unwrap();
        assert_eq!(c.documents[0].split, Split::Unsplit);
    }
}
