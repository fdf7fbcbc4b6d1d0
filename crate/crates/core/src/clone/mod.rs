//! Token-based cross-corpus clone detection in plaintext mode.
//!
//! All token streams of both corpora are concatenated with a unique sentinel
//! after every document, and a suffix array plus LCP array is built over the
//! result. A pair of positions `(i, j)` with `i` in corpus A and `j` in
//! corpus B is a maximal clone pair of length `L` when the suffixes at `i`
//! and `j` share exactly `L >= min_tokens` leading tokens and the tokens just
//! before them differ (or either starts a document).
//!
//! Pairs are found by visiting adjacent-suffix LCP values from largest to
//! smallest and joining the two neighbouring suffix groups each time: every
//! cross pair created by a join has an LCP of exactly that value. Groups keep
//! their positions bucketed by corpus side and preceding token, so counting is
//! O(1) per bucket and enumeration is output-sensitive.

mod suffix;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::token;
use crate::{Error, Result};

pub use suffix::{lcp_array, suffix_array};

/// Default minimum clone length in tokens.
pub const DEFAULT_MIN_TOKENS: usize = 30;
/// Pair count above which enumeration logs a warning.
pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneParams {
    pub min_tokens: usize,
    /// Stop once this many pairs are found; the result is marked truncated.
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(default = "default_budget")]
    pub pair_budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_PAIR_BUDGET
}

impl Default for CloneParams {
    fn default() -> Self {
        CloneParams {
            min_tokens: DEFAULT_MIN_TOKENS,
            cap: None,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl CloneParams {
    pub fn with_min_tokens(min_tokens: usize) -> Self {
        CloneParams {
            min_tokens,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_tokens == 0 {
            return Err(Error::InvalidArgument("min_tokens must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fragment {
    pub doc_id: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClonePair {
    pub a: Fragment,
    pub b: Fragment,
}

impl ClonePair {
    pub fn len(&self) -> usize {
        self.a.len
    }

    pub fn is_empty(&self) -> bool {
        self.a.len == 0
    }

    pub fn swapped(&self) -> ClonePair {
        ClonePair {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// JSONL export record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneRecord {
    pub a_doc: String,
    pub a_start: usize,
    pub len: usize,
    pub b_doc: String,
    pub b_start: usize,
}

impl From<&ClonePair> for CloneRecord {
    fn from(p: &ClonePair) -> Self {
        CloneRecord {
            a_doc: p.a.doc_id.clone(),
            a_start: p.a.start,
            len: p.a.len,
            b_doc: p.b.doc_id.clone(),
            b_start: p.b.start,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CloneSet {
    /// Sorted by (A document order, A offset, B document order, B offset).
    pub pairs: Vec<ClonePair>,
    pub truncated: bool,
}

impl CloneSet {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.pairs {
            serde_json::to_writer(&mut out, &CloneRecord::from(p))?;
            out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneCount {
    pub count: u64,
    /// `count` is a lower bound because the cap was reached.
    pub truncated: bool,
}

/// Token sequences of both corpora laid out for suffix sorting.
struct Layout {
    text: Vec<u32>,
    alphabet: usize,
    /// Start offset of each document in `text`; A documents first.
    doc_starts: Vec<u32>,
    /// Number of documents from corpus A.
    a_docs: usize,
    /// Side of each text position: 0 = A, 1 = B, `NO_SIDE` = sentinel.
    side: Vec<u8>,
}

const NO_SIDE: u8 = 2;

impl Layout {
    fn build(a: &[Vec<String>], b: &[Vec<String>]) -> Layout {
        let mut interner: HashMap<&str, u32> = HashMap::new();
        let total: usize = a.iter().chain(b).map(|d| d.len() + 1).sum();
        let mut ids: Vec<u32> = Vec::with_capacity(total);
        for doc in a.iter().chain(b) {
            for t in doc {
                let next = interner.len() as u32;
                ids.push(*interner.entry(t.as_str()).or_insert(next));
            }
        }
        let vocab = interner.len() as u32;
        let mut text = Vec::with_capacity(total);
        let mut side = Vec::with_capacity(total);
        let mut doc_starts = Vec::with_capacity(a.len() + b.len());
        let mut it = ids.into_iter();
        for (k, doc) in a.iter().chain(b).enumerate() {
            let s = if k < a.len() { 0 } else { 1 };
            doc_starts.push(text.len() as u32);
            for _ in 0..doc.len() {
                text.push(it.next().expect("interned token"));
                side.push(s);
            }
            text.push(vocab + k as u32);
            side.push(NO_SIDE);
        }
        Layout {
            text,
            alphabet: vocab as usize + a.len() + b.len(),
            doc_starts,
            a_docs: a.len(),
            side,
        }
    }

    /// Token preceding `pos`, or `None` at a document start.
    fn left(&self, pos: u32) -> Option<u32> {
        let p = pos as usize;
        if p == 0 || self.side[p - 1] == NO_SIDE {
            None
        } else {
            Some(self.text[p - 1])
        }
    }

    /// (document index, offset within the document).
    fn locate(&self, pos: u32) -> (usize, usize) {
        let doc = self.doc_starts.partition_point(|&s| s <= pos) - 1;
        (doc, (pos - self.doc_starts[doc]) as usize)
    }
}

/// Positions of one suffix group on one side, bucketed by preceding token.
#[derive(Default)]
struct SideBucket {
    by_left: BTreeMap<u32, Vec<u32>>,
    /// Positions at a document start; compatible with every other position.
    boundary: Vec<u32>,
    total: u64,
}

impl SideBucket {
    fn insert(&mut self, left: Option<u32>, pos: u32) {
        match left {
            Some(t) => self.by_left.entry(t).or_default().push(pos),
            None => self.boundary.push(pos),
        }
        self.total += 1;
    }

    fn count_left(&self, t: u32) -> u64 {
        self.by_left.get(&t).map_or(0, |v| v.len() as u64)
    }

    fn absorb(&mut self, other: SideBucket) {
        for (t, mut v) in other.by_left {
            self.by_left.entry(t).or_default().append(&mut v);
        }
        self.boundary.extend(other.boundary);
        self.total += other.total;
    }
}

#[derive(Default)]
struct Group {
    sides: [SideBucket; 2],
}

impl Group {
    fn size(&self) -> u64 {
        self.sides[0].total + self.sides[1].total
    }

    /// Cross pairs between `self` and `other` with differing left context.
    fn count_pairs(&self, other: &Group) -> u64 {
        let mut n = 0;
        for s in 0..2 {
            let mine = &self.sides[s];
            let theirs = &other.sides[1 - s];
            if theirs.total == 0 {
                continue;
            }
            n += mine.boundary.len() as u64 * theirs.total;
            for (t, v) in &mine.by_left {
                n += v.len() as u64 * (theirs.total - theirs.count_left(*t));
            }
        }
        n
    }

    /// Calls `emit(a_pos, b_pos)` for every cross pair; stops when `emit`
    /// returns false.
    fn for_each_pair(&self, other: &Group, emit: &mut impl FnMut(u32, u32) -> bool) -> bool {
        for s in 0..2 {
            let mine = &self.sides[s];
            let theirs = &other.sides[1 - s];
            if theirs.total == 0 || mine.total == 0 {
                continue;
            }
            let mut visit = |p: u32, left: Option<u32>| -> bool {
                let mut call = |q: u32| if s == 0 { emit(p, q) } else { emit(q, p) };
                for &q in &theirs.boundary {
                    if !call(q) {
                        return false;
                    }
                }
                for (t, qs) in &theirs.by_left {
                    if Some(*t) == left {
                        continue;
                    }
                    for &q in qs {
                        if !call(q) {
                            return false;
                        }
                    }
                }
                true
            };
            for &p in &mine.boundary {
                if !visit(p, None) {
                    return false;
                }
            }
            for (t, ps) in &mine.by_left {
                for &p in ps {
                    if !visit(p, Some(*t)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn absorb(&mut self, other: Group) {
        let [a, b] = other.sides;
        self.sides[0].absorb(a);
        self.sides[1].absorb(b);
    }
}

/// Union-find over suffix-array ranks with lazily created groups.
struct Merger<'a> {
    layout: &'a Layout,
    sa: Vec<u32>,
    parent: Vec<u32>,
    groups: HashMap<u32, Group>,
}

impl<'a> Merger<'a> {
    fn new(layout: &'a Layout, sa: Vec<u32>) -> Self {
        let n = sa.len();
        Merger {
            layout,
            sa,
            parent: (0..n as u32).collect(),
            groups: HashMap::new(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn take_group(&mut self, root: u32) -> Group {
        if let Some(g) = self.groups.remove(&root) {
            return g;
        }
        // untouched singleton
        let pos = self.sa[root as usize];
        let mut g = Group::default();
        let s = self.layout.side[pos as usize];
        if s != NO_SIDE {
            g.sides[s as usize].insert(self.layout.left(pos), pos);
        }
        g
    }

    /// Ranks `r-1` and `r` are joined; returns the two groups (larger first)
    /// and the root the merged group must be stored under.
    fn split_join(&mut self, r: u32) -> (Group, Group, u32) {
        let x = self.find(r - 1);
        let y = self.find(r);
        let gx = self.take_group(x);
        let gy = self.take_group(y);
        let (big, small, root, child) = if gx.size() >= gy.size() {
            (gx, gy, x, y)
        } else {
            (gy, gx, y, x)
        };
        self.parent[child as usize] = root;
        (big, small, root)
    }

    fn store(&mut self, root: u32, mut big: Group, small: Group) {
        big.absorb(small);
        self.groups.insert(root, big);
    }
}

/// Adjacent ranks whose LCP is at least `min_tokens`, largest LCP first.
fn join_order(lcp: &[u32], min_tokens: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (1..lcp.len() as u32)
        .filter(|&r| lcp[r as usize] as usize >= min_tokens)
        .collect();
    order.sort_by(|&x, &y| lcp[y as usize].cmp(&lcp[x as usize]).then(x.cmp(&y)));
    order
}

fn tokenize_all(corpus: &Corpus) -> Vec<Vec<String>> {
    corpus
        .documents
        .iter()
        .map(|d| token::normalize_plaintext(&d.code))
        .collect()
}

struct Prepared {
    layout: Layout,
    sa: Vec<u32>,
    lcp: Vec<u32>,
}

fn prepare(a: &[Vec<String>], b: &[Vec<String>]) -> Prepared {
    let layout = Layout::build(a, b);
    let sa = suffix_array(&layout.text, layout.alphabet);
    let lcp = lcp_array(&layout.text, &sa);
    Prepared { layout, sa, lcp }
}

/// A clone pair addressed by document index rather than id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexedPair {
    pub a_doc: usize,
    pub a_start: usize,
    pub b_doc: usize,
    pub b_start: usize,
    pub len: usize,
}

/// Maximal clone pairs between two pre-tokenized document lists.
pub fn detect_in_streams(
    a: &[Vec<String>],
    b: &[Vec<String>],
    params: &CloneParams,
) -> Result<Vec<IndexedPair>> {
    params.validate()?;
    let Prepared { layout, sa, lcp } = prepare(a, b);
    let order = join_order(&lcp, params.min_tokens);
    let mut merger = Merger::new(&layout, sa);
    let mut raw: Vec<(u32, u32, u32)> = Vec::new();
    let cap = params.cap.unwrap_or(u64::MAX);
    'outer: for r in order {
        let len = lcp[r as usize];
        let (big, small, root) = merger.split_join(r);
        let complete = small.for_each_pair(&big, &mut |pa, pb| {
            if raw.len() as u64 >= cap {
                return false;
            }
            raw.push((pa, pb, len));
            true
        });
        merger.store(root, big, small);
        if !complete {
            break 'outer;
        }
    }
    if raw.len() as u64 > params.pair_budget {
        log::warn!(
            "{} clone pairs exceed the pair budget of {}",
            raw.len(),
            params.pair_budget
        );
    }
    let mut out: Vec<_> = raw
        .into_iter()
        .map(|(pa, pb, len)| {
            let (da, oa) = layout.locate(pa);
            let (db, ob) = layout.locate(pb);
            IndexedPair {
                a_doc: da,
                a_start: oa,
                b_doc: db - layout.a_docs,
                b_start: ob,
                len: len as usize,
            }
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Every maximal cross-corpus clone pair of at least `params.min_tokens`
/// tokens, with one fragment in `a` and one in `b`.
pub fn detect_cross_clones(a: &Corpus, b: &Corpus, params: &CloneParams) -> Result<CloneSet> {
    let ta = tokenize_all(a);
    let tb = tokenize_all(b);
    let raw = detect_in_streams(&ta, &tb, params)?;
    let truncated = params.cap.is_some_and(|c| raw.len() as u64 >= c);
    let pairs = raw
        .into_iter()
        .map(|p| ClonePair {
            a: Fragment {
                doc_id: a.documents[p.a_doc].id.clone(),
                start: p.a_start,
                len: p.len,
            },
            b: Fragment {
                doc_id: b.documents[p.b_doc].id.clone(),
                start: p.b_start,
                len: p.len,
            },
        })
        .collect();
    Ok(CloneSet { pairs, truncated })
}

/// Number of maximal clone pairs between two pre-tokenized document lists,
/// without materializing them.
pub fn count_in_streams(
    a: &[Vec<String>],
    b: &[Vec<String>],
    params: &CloneParams,
) -> Result<CloneCount> {
    params.validate()?;
    let Prepared { layout, sa, lcp } = prepare(a, b);
    let order = join_order(&lcp, params.min_tokens);
    let mut merger = Merger::new(&layout, sa);
    let cap = params.cap.unwrap_or(u64::MAX);
    let mut count = 0u64;
    for r in order {
        let (big, small, root) = merger.split_join(r);
        count += small.count_pairs(&big);
        merger.store(root, big, small);
        if count >= cap {
            return Ok(CloneCount {
                count,
                truncated: true,
            });
        }
    }
    Ok(CloneCount {
        count,
        truncated: false,
    })
}

/// Textual similarity: the number of maximal cross-corpus clone pairs.
pub fn textual_similarity(a: &Corpus, target: &Corpus, params: &CloneParams) -> Result<CloneCount> {
    count_in_streams(&tokenize_all(a), &tokenize_all(target), params)
}

/// Divides every count by the largest one.
pub fn normalize_clone_counts<K: Ord + Clone>(raw: &BTreeMap<K, u64>) -> Result<BTreeMap<K, f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput("no clone counts to normalize"));
    }
    let max = *raw.values().max().expect("non-empty");
    if max == 0 {
        return Err(Error::NoTextualSignal);
    }
    Ok(raw
        .iter()
        .map(|(k, &v)| (k.clone(), if v == max { 1.0 } else { v as f64 / max as f64 }))
        .collect())
}
