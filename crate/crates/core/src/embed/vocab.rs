use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// A unigram, bigram or trigram of tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NgramKey(pub Vec<String>);

impl NgramKey {
    /// Parses a space-separated key. Tokens never contain whitespace, so the
    /// rendering is unambiguous.
    pub fn parse(s: &str) -> NgramKey {
        NgramKey(s.split_whitespace().map(str::to_owned).collect())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NgramKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

const NONE: u32 = u32::MAX;

/// One in-vocabulary n-gram occurrence inside a token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feature {
    pub index: u32,
    pub start: u32,
    pub len: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    keys: Vec<NgramKey>,
    words: HashMap<String, u32>,
    ngrams: HashMap<[u32; 3], u32>,
}

impl Vocab {
    /// Builds a vocabulary from keys in index order. Every word of a bigram
    /// or trigram key must also be present as a unigram key.
    pub fn from_keys(keys: impl IntoIterator<Item = NgramKey>) -> Result<Vocab> {
        let keys: Vec<NgramKey> = keys.into_iter().collect();
        let mut words = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if k.order() == 1 && words.insert(k.0[0].clone(), i as u32).is_some() {
                return Err(Error::ModelFormat(format!("duplicate vocabulary key {k}")));
            }
        }
        let mut ngrams = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            match k.order() {
                1 => {}
                2 | 3 => {
                    let mut ids = [NONE; 3];
                    for (slot, w) in ids.iter_mut().zip(&k.0) {
                        *slot = *words.get(w).ok_or_else(|| {
                            Error::ModelFormat(format!("n-gram {k} uses unknown word {w}"))
                        })?;
                    }
                    if ngrams.insert(ids, i as u32).is_some() {
                        return Err(Error::ModelFormat(format!("duplicate vocabulary key {k}")));
                    }
                }
                n => {
                    return Err(Error::ModelFormat(format!(
                        "key {k:?} has {n} tokens (expected 1 to 3)"
                    )))
                }
            }
        }
        Ok(Vocab {
            keys,
            words,
            ngrams,
        })
    }

    /// Counts unigrams, then bigrams/trigrams of frequent unigrams, over
    /// `sentences`. Returns the vocabulary (words first, most frequent first)
    /// and the count of each word.
    pub fn build<'a, I, S>(sentences: I, min_count: u64, max_ngrams: usize) -> (Vocab, Vec<u64>)
    where
        I: Clone + IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut word_counts: HashMap<&str, u64> = HashMap::new();
        for s in sentences.clone() {
            for t in s {
                *word_counts.entry(t.as_ref()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = word_counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count.max(1))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let words: HashMap<String, u32> = kept
            .iter()
            .enumerate()
            .map(|(i, (w, _))| ((*w).to_owned(), i as u32))
            .collect();
        let counts: Vec<u64> = kept.iter().map(|x| x.1).collect();

        let mut ngram_counts: HashMap<[u32; 3], u64> = HashMap::new();
        let mut ids = Vec::new();
        for s in sentences {
            ids.clear();
            ids.extend(s.iter().map(|t| words.get(t.as_ref()).copied().unwrap_or(NONE)));
            for i in 0..ids.len() {
                if ids[i] == NONE {
                    continue;
                }
                if i + 1 < ids.len() && ids[i + 1] != NONE {
                    *ngram_counts.entry([ids[i], ids[i + 1], NONE]).or_default() += 1;
                    if i + 2 < ids.len() && ids[i + 2] != NONE {
                        *ngram_counts
                            .entry([ids[i], ids[i + 1], ids[i + 2]])
                            .or_default() += 1;
                    }
                }
            }
        }
        let mut grams: Vec<([u32; 3], u64)> = ngram_counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count.max(1))
            .collect();
        grams.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        grams.truncate(max_ngrams);

        let mut keys: Vec<NgramKey> = kept
            .iter()
            .map(|(w, _)| NgramKey(vec![(*w).to_owned()]))
            .collect();
        let mut ngrams = HashMap::with_capacity(grams.len());
        for (g, _) in grams {
            let key = NgramKey(
                g.iter()
                    .take_while(|&&id| id != NONE)
                    .map(|&id| keys[id as usize].0[0].clone())
                    .collect(),
            );
            ngrams.insert(g, keys.len() as u32);
            keys.push(key);
        }
        (
            Vocab {
                keys,
                words,
                ngrams,
            },
            counts,
        )
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[NgramKey] {
        &self.keys
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn word_index(&self, word: &str) -> Option<u32> {
        self.words.get(word).copied()
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        let key = NgramKey::parse(key);
        match key.order() {
            1 => self.word_index(&key.0[0]).map(|i| i as usize),
            2 | 3 => {
                let mut ids = [NONE; 3];
                for (slot, w) in ids.iter_mut().zip(&key.0) {
                    *slot = self.word_index(w)?;
                }
                self.ngrams.get(&ids).map(|&i| i as usize)
            }
            _ => None,
        }
    }

    /// All in-vocabulary unigrams, bigrams and trigrams of `tokens`.
    pub fn features<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Feature> {
        let ids: Vec<u32> = tokens
            .iter()
            .map(|t| self.word_index(t.as_ref()).unwrap_or(NONE))
            .collect();
        self.features_of_ids(&ids)
    }

    pub(crate) fn features_of_ids(&self, ids: &[u32]) -> Vec<Feature> {
        let mut out = Vec::with_capacity(ids.len() * 3);
        for i in 0..ids.len() {
            if ids[i] == NONE {
                continue;
            }
            out.push(Feature {
                index: ids[i],
                start: i as u32,
                len: 1,
            });
            if self.ngrams.is_empty() || i + 1 >= ids.len() || ids[i + 1] == NONE {
                continue;
            }
            if let Some(&g) = self.ngrams.get(&[ids[i], ids[i + 1], NONE]) {
                out.push(Feature {
                    index: g,
                    start: i as u32,
                    len: 2,
                });
            }
            if i + 2 < ids.len() && ids[i + 2] != NONE {
                if let Some(&g) = self.ngrams.get(&[ids[i], ids[i + 1], ids[i + 2]]) {
                    out.push(Feature {
                        index: g,
                        start: i as u32,
                        len: 3,
                    });
                }
            }
        }
        out
    }

    pub(crate) fn word_ids<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .map(|t| self.word_index(t.as_ref()).unwrap_or(NONE))
            .collect()
    }

    pub(crate) const OOV: u32 = NONE;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn build_from_repeated_sentence() {
        let s = sent("def f ( x )");
        let sentences = [s.clone(), s.clone()];
        let (v, counts) = Vocab::build(sentences.iter().map(Vec::as_slice), 2, 100);
        assert_eq!(v.word_count(), 5);
        assert_eq!(counts, [2; 5]);
        // 5 unigrams, 4 bigrams, 3 trigrams
        assert_eq!(v.len(), 12);
        for key in ["def", "f (", "( x )", "def f ("] {
            assert!(v.index_of(key).is_some(), "{key}");
        }
        assert!(v.index_of("x ) def").is_none());
        let (v1, _) = Vocab::build(sentences.iter().map(Vec::as_slice), 3, 100);
        assert!(v1.is_empty());
    }

    #[test]
    fn ngram_cap_keeps_most_frequent() {
        let sentences = [sent("a b a b a b c")];
        let (v, _) = Vocab::build(sentences.iter().map(Vec::as_slice), 1, 1);
        assert_eq!(v.len(), 3 + 1);
        // "a b" (3) beats "b a" (2)
        assert!(v.index_of("a b").is_some());
        assert!(v.index_of("b a").is_none());
    }

    #[test]
    fn features_skip_oov() {
        let sentences = [sent("a b c"), sent("a b c")];
        let (v, _) = Vocab::build(sentences.iter().map(Vec::as_slice), 1, 100);
        let f = v.features(&sent("a b zz c"));
        let keys: Vec<String> = f.iter().map(|f| v.keys()[f.index as usize].to_string()).collect();
        assert_eq!(keys, ["a", "a b", "b", "c"]);
    }

    #[test]
    fn from_keys_validates() {
        let ok = Vocab::from_keys(["a", "b", "a b"].map(NgramKey::parse)).unwrap();
        assert_eq!(ok.index_of("a b"), Some(2));
        assert!(Vocab::from_keys(["a", "a c"].map(NgramKey::parse)).is_err());
        assert!(Vocab::from_keys(["a", "a"].map(NgramKey::parse)).is_err());
        assert!(Vocab::from_keys(["a b c d"].map(NgramKey::parse)).is_err());
    }
}
