//! Text preprocessing: tokenization, vocabulary construction, tf-idf weighting.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default document-frequency floor for vocabulary construction.
pub const DEFAULT_MIN_DF: usize = 2;
/// Default cap on vocabulary size.
pub const DEFAULT_MAX_TERMS: usize = 50_000;

/// Lowercases and splits on every non-alphanumeric codepoint, dropping empties.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
        .collect()
}

/// Term index built from a corpus; indices are assigned in lexicographic term order.
#[derive(Debug, Clone, Serialize)]
pub struct Vocabulary {
    term_to_index: BTreeMap<String, usize>,
    index_to_term: Vec<String>,
    /// Number of documents containing each term, indexed by term index.
    document_frequency: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    /// Builds a vocabulary from tokenized documents.
    ///
    /// Terms with document frequency below `min_df` are dropped. If more than
    /// `max_terms` terms survive, the `max_terms` highest-df terms are kept,
    /// ties broken by lexicographically smaller term.
    pub fn build<D: AsRef<[String]>>(docs: &[D], min_df: usize, max_terms: usize) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyInput("vocabulary corpus"));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(|s| s.as_str()).collect();
            seen.sort_unstable();
            seen.dedup();
            for term in seen {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let mut survivors: Vec<(&str, usize)> =
            df.into_iter().filter(|&(_, c)| c >= min_df).collect();
        if survivors.len() > max_terms {
            // Highest df first, lexicographic within equal df; keep the head.
            survivors.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            survivors.truncate(max_terms);
            survivors.sort_by(|a, b| a.0.cmp(b.0));
        }
        if survivors.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let index_to_term: Vec<String> = survivors.iter().map(|&(t, _)| t.to_string()).collect();
        let document_frequency: Vec<usize> = survivors.iter().map(|&(_, c)| c).collect();
        let term_to_index = index_to_term
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            term_to_index,
            index_to_term,
            document_frequency,
            n_docs: docs.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.index_to_term.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_term.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.index_to_term[index]
    }

    pub fn document_frequency(&self, index: usize) -> usize {
        self.document_frequency[index]
    }

    /// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1.
    pub fn idf(&self, index: usize) -> f64 {
        let n = self.n_docs as f64;
        let df = self.document_frequency[index] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Maps tokens to term indices, silently dropping out-of-vocabulary tokens.
    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens
            .iter()
            .filter_map(|t| self.term_to_index.get(t.as_str()).copied())
            .collect()
    }
}

/// Row-major sparse matrix; each row holds (column, value) pairs with strictly
/// increasing columns and no explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in &rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0), "columns must strictly increase");
            debug_assert!(row.iter().all(|&(c, v)| c < n_cols && v.is_finite() && v != 0.0));
        }
        SparseMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn value(&self, r: usize, c: usize) -> f64 {
        match self.rows[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => self.rows[r][i].1,
            Err(_) => 0.0,
        }
    }

    pub fn row_l2_norm(&self, r: usize) -> f64 {
        self.rows[r].iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Builds the tf-idf matrix of `docs` against `vocab`.
///
/// Entry (d, t) is raw count of t in d times idf(t); every nonzero row is then
/// L2-normalized. Out-of-vocabulary tokens are ignored and rows without any
/// in-vocabulary token stay all-zero.
pub fn tfidf<D: AsRef<[String]>>(docs: &[D], vocab: &Vocabulary) -> SparseMatrix {
    let mut rows = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for token in doc.as_ref() {
            if let Some(idx) = vocab.index_of(token) {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
        let mut row: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(t, tf)| (t, tf as f64 * vocab.idf(t)))
            .collect();
        let norm = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for entry in &mut row {
                entry.1 /= norm;
            }
        }
        rows.push(row);
    }
    SparseMatrix::new(vocab.len(), rows)
}
