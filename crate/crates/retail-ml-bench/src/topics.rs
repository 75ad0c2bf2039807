//! Latent Dirichlet Allocation by collapsed Gibbs sampling.
//!
//! Sampling order is part of the determinism contract: documents in index
//! order, tokens in position order, one stream seeded from the config.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mlcore::DenseMatrix;
use crate::rng::Prng;

#[derive(Debug, Clone, Serialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Defaults: alpha = 50/k, beta = 0.01, 200 iterations.
    pub fn new(k: usize, seed: u64) -> Self {
        LdaConfig {
            k,
            alpha: 50.0 / k as f64,
            beta: 0.01,
            iterations: 200,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidConfig("alpha and beta must be > 0".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LdaModel {
    /// k x V, row-stochastic, smoothed by beta.
    pub topic_term: DenseMatrix,
    /// D x k, row-stochastic, smoothed by alpha.
    pub doc_topic: DenseMatrix,
    /// Corpus token log-likelihood after each sweep.
    pub log_likelihood_trace: Vec<f64>,
    /// Final topic assignment of every token position.
    pub assignments: Vec<Vec<usize>>,
}

struct Counts {
    doc_topic: Vec<Vec<usize>>,
    topic_term: Vec<Vec<usize>>,
    topic_total: Vec<usize>,
}

impl Counts {
    #[cfg(debug_assertions)]
    fn check_conservation(&self, docs: &[Vec<usize>]) {
        for (d, doc) in docs.iter().enumerate() {
            let sum: usize = self.doc_topic[d].iter().sum();
            debug_assert_eq!(sum, doc.len(), "doc {d} topic counts drifted");
        }
        for (t, row) in self.topic_term.iter().enumerate() {
            let term_sum: usize = row.iter().sum();
            debug_assert_eq!(term_sum, self.topic_total[t], "topic {t} counts drifted");
        }
    }
}

/// Collapsed Gibbs sampling with symmetric priors.
///
/// Matrices are point estimates from the final sweep's counts:
/// doc_topic[d][t] = (n_dt + alpha) / (n_d + k alpha),
/// topic_term[t][w] = (n_tw + beta) / (n_t + V beta).
pub fn lda_fit(docs: &[Vec<usize>], vocab_size: usize, cfg: &LdaConfig) -> Result<LdaModel> {
    cfg.validate()?;
    if docs.iter().all(|d| d.is_empty()) {
        return Err(Error::EmptyInput("corpus"));
    }
    for doc in docs {
        for &w in doc {
            if w >= vocab_size {
                return Err(Error::TokenOutOfRange {
                    index: w,
                    vocab_size,
                });
            }
        }
    }
    let k = cfg.k;
    let mut rng = Prng::seed_from_u64(cfg.seed);
    let mut counts = Counts {
        doc_topic: docs.iter().map(|_| vec![0usize; k]).collect(),
        topic_term: vec![vec![0usize; vocab_size]; k],
        topic_total: vec![0usize; k],
    };

    let mut assignments: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.iter().map(|_| 0usize).collect())
        .collect();
    for (d, doc) in docs.iter().enumerate() {
        for (pos, &w) in doc.iter().enumerate() {
            let t = rng.gen_range(0..k);
            assignments[d][pos] = t;
            counts.doc_topic[d][t] += 1;
            counts.topic_term[t][w] += 1;
            counts.topic_total[t] += 1;
        }
    }

    let v_beta = vocab_size as f64 * cfg.beta;
    let mut weights = vec![0.0; k];
    let mut trace = Vec::with_capacity(cfg.iterations);

    for _sweep in 0..cfg.iterations {
        for (d, doc) in docs.iter().enumerate() {
            for (pos, &w) in doc.iter().enumerate() {
                let old = assignments[d][pos];
                counts.doc_topic[d][old] -= 1;
                counts.topic_term[old][w] -= 1;
                counts.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (counts.doc_topic[d][t] as f64 + cfg.alpha)
                        * (counts.topic_term[t][w] as f64 + cfg.beta)
                        / (counts.topic_total[t] as f64 + v_beta);
                    weights[t] = p;
                    total += p;
                }
                let mut target = rng.gen::<f64>() * total;
                let mut new = k - 1;
                for (t, &p) in weights.iter().enumerate() {
                    if target < p {
                        new = t;
                        break;
                    }
                    target -= p;
                }

                assignments[d][pos] = new;
                counts.doc_topic[d][new] += 1;
                counts.topic_term[new][w] += 1;
                counts.topic_total[new] += 1;
            }
        }
        #[cfg(debug_assertions)]
        counts.check_conservation(docs);
        trace.push(corpus_log_likelihood(docs, &counts, cfg, vocab_size));
    }

    let mut doc_topic = DenseMatrix::zeros(docs.len(), k);
    for (d, doc) in docs.iter().enumerate() {
        let denom = doc.len() as f64 + k as f64 * cfg.alpha;
        let row = doc_topic.row_mut(d);
        for t in 0..k {
            row[t] = (counts.doc_topic[d][t] as f64 + cfg.alpha) / denom;
        }
    }
    let mut topic_term = DenseMatrix::zeros(k, vocab_size);
    for t in 0..k {
        let denom = counts.topic_total[t] as f64 + v_beta;
        let row = topic_term.row_mut(t);
        for w in 0..vocab_size {
            row[w] = (counts.topic_term[t][w] as f64 + cfg.beta) / denom;
        }
    }

    Ok(LdaModel {
        topic_term,
        doc_topic,
        log_likelihood_trace: trace,
        assignments,
    })
}

fn corpus_log_likelihood(
    docs: &[Vec<usize>],
    counts: &Counts,
    cfg: &LdaConfig,
    vocab_size: usize,
) -> f64 {
    let k = cfg.k;
    let v_beta = vocab_size as f64 * cfg.beta;
    let mut ll = 0.0;
    for (d, doc) in docs.iter().enumerate() {
        let doc_denom = doc.len() as f64 + k as f64 * cfg.alpha;
        for &w in doc {
            let mut p = 0.0;
            for t in 0..k {
                let theta = (counts.doc_topic[d][t] as f64 + cfg.alpha) / doc_denom;
                let phi = (counts.topic_term[t][w] as f64 + cfg.beta)
                    / (counts.topic_total[t] as f64 + v_beta);
                p += theta * phi;
            }
            ll += p.ln();
        }
    }
    ll
}

/// exp(-mean token log-likelihood) of `docs` under the model's stored
/// per-document topic mixtures. `docs` must be the training corpus.
pub fn lda_perplexity(model: &LdaModel, docs: &[Vec<usize>]) -> Result<f64> {
    if docs.len() != model.doc_topic.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: model.doc_topic.n_rows(),
            actual: docs.len(),
        });
    }
    let v = model.topic_term.n_cols();
    let k = model.topic_term.n_rows();
    let mut total_tokens = 0usize;
    let mut ll = 0.0;
    for (d, doc) in docs.iter().enumerate() {
        for &w in doc {
            if w >= v {
                return Err(Error::TokenOutOfRange {
                    index: w,
                    vocab_size: v,
                });
            }
            let mut p = 0.0;
            for t in 0..k {
                p += model.doc_topic.get(d, t) * model.topic_term.get(t, w);
            }
            ll += p.ln();
            total_tokens += 1;
        }
    }
    if total_tokens == 0 {
        return Err(Error::EmptyInput("perplexity corpus"));
    }
    Ok((-ll / total_tokens as f64).exp())
}

/// Per topic, the `n` highest-probability terms; ties take the lower index.
pub fn lda_top_terms(model: &LdaModel, n: usize) -> Vec<Vec<usize>> {
    let v = model.topic_term.n_cols();
    let n = n.min(v);
    (0..model.topic_term.n_rows())
        .map(|t| {
            let mut order: Vec<usize> = (0..v).collect();
            order.sort_by(|&a, &b| {
                model
                    .topic_term
                    .get(t, b)
                    .total_cmp(&model.topic_term.get(t, a))
                    .then(a.cmp(&b))
            });
            order.truncate(n);
            order
        })
        .collect()
}
