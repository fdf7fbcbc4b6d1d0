//! Plaintext tokenization shared by the embedding and clone stages.
//!
//! Rules: whitespace (including line breaks) separates tokens, a maximal run
//! of `[A-Za-z0-9_]` is one token, and any other character is a token on its
//! own. No language grammar is consulted, so string literals and comments are
//! tokenized like everything else.

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusDocument;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn from_document(doc: &CorpusDocument) -> Self {
        TokenStream {
            doc_id: doc.id.clone(),
            tokens: normalize_plaintext(&doc.code),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[inline]
fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `code` into plaintext tokens, borrowing from the input.
pub fn tokens(code: &str) -> impl Iterator<Item = &str> + '_ {
    let mut rest = code;
    std::iter::from_fn(move || {
        rest = rest.trim_start();
        let first = rest.chars().next()?;
        let end = if is_ident_char(first) {
            rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len())
        } else {
            first.len_utf8()
        };
        let (tok, tail) = rest.split_at(end);
        rest = tail;
        Some(tok)
    })
}

pub fn normalize_plaintext(code: &str) -> Vec<String> {
    tokens(code).map(str::to_owned).collect()
}

/// Number of plaintext tokens in `code`.
pub fn token_count(code: &str) -> usize {
    tokens(code).count()
}

/// Code length in normalized tokens; the unit used for length quartiles.
pub fn length_of(doc: &CorpusDocument) -> usize {
    token_count(&doc.code)
}
