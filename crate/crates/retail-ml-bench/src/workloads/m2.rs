//! M2: topic modeling over review text with LDA, k = 3 topics standing for
//! the three sentiments. Quality combines training perplexity with a check of
//! how well the topics recover the generator's planted sentiment word pools.

use std::collections::BTreeSet;

use crate::datagen::{word_pools, RetailDataset, Sentiment};
use crate::error::{Error, Result};
use crate::textkit::{tokenize, Vocabulary, DEFAULT_MAX_TERMS, DEFAULT_MIN_DF};
use crate::topics::{lda_fit, lda_perplexity, lda_top_terms, LdaConfig};

use super::{Algorithm, ArtifactSummary, MetricRecord, StageTimer, WorkloadOutput, WorkloadSpec};

/// Terms compared against each pool when scoring topic recovery.
const MATCH_TOP_TERMS: usize = 10;

struct PoolMatch {
    matched_pools: Vec<String>,
    overlaps: Vec<usize>,
}

/// Matches each topic to a sentiment pool by top-term overlap. With exactly
/// three topics the assignment is the best bijection over the three pools;
/// otherwise each topic independently takes its best pool.
fn match_topics_to_pools(top_terms: &[Vec<String>], seed: u64) -> PoolMatch {
    let pools = word_pools(seed);
    let pool_sets: Vec<(String, BTreeSet<&str>)> = Sentiment::ALL
        .iter()
        .map(|&s| {
            (
                s.name().to_string(),
                pools.pool(s).iter().map(|w| w.as_str()).collect(),
            )
        })
        .collect();
    let overlap = |topic: &[String], pool: &BTreeSet<&str>| {
        topic.iter().filter(|w| pool.contains(w.as_str())).count()
    };
    let k = top_terms.len();

    if k == pool_sets.len() {
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut perm: Vec<usize> = (0..k).collect();
        permute(&mut perm, 0, &mut |p| {
            let per_topic: Vec<usize> = (0..k)
                .map(|t| overlap(&top_terms[t], &pool_sets[p[t]].1))
                .collect();
            let total: usize = per_topic.iter().sum();
            if best.as_ref().map_or(true, |(b, _)| total > *b) {
                best = Some((total, p.to_vec()));
            }
        });
        let (_, assignment) = best.expect("at least one permutation");
        let overlaps: Vec<usize> = (0..k)
            .map(|t| overlap(&top_terms[t], &pool_sets[assignment[t]].1))
            .collect();
        let matched_pools = assignment
            .iter()
            .map(|&p| pool_sets[p].0.clone())
            .collect();
        return PoolMatch {
            matched_pools,
            overlaps,
        };
    }

    let mut matched_pools = Vec::with_capacity(k);
    let mut overlaps = Vec::with_capacity(k);
    for topic in top_terms {
        let (name, count) = pool_sets
            .iter()
            .map(|(name, set)| (name.clone(), overlap(topic, set)))
            .max_by_key(|&(_, c)| c)
            .expect("three pools");
        matched_pools.push(name);
        overlaps.push(count);
    }
    PoolMatch {
        matched_pools,
        overlaps,
    }
}

fn permute(items: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}

pub(super) fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    if spec.algorithm != Algorithm::Lda {
        return Err(Error::InvalidSpec(format!(
            "m2 cannot run algorithm {}",
            spec.algorithm
        )));
    }
    let mut timer = StageTimer::start();
    if ds.reviews.is_empty() {
        return Err(Error::EmptyInput("review corpus"));
    }
    let token_docs: Vec<Vec<String>> = ds.reviews.iter().map(|r| tokenize(&r.text)).collect();
    let min_df = spec.params.get_usize("min_df", DEFAULT_MIN_DF)?;
    let max_terms = spec.params.get_usize("max_terms", DEFAULT_MAX_TERMS)?;
    let vocab = Vocabulary::build(&token_docs, min_df, max_terms)?;
    let docs: Vec<Vec<usize>> = token_docs.iter().map(|d| vocab.encode(d)).collect();
    let prep_seconds = timer.lap();

    let k = spec.params.get_usize("k", 3)?;
    let defaults = LdaConfig::new(k, spec.seed);
    // The pipeline default is a tighter document prior than the library's
    // 50/k: reviews are short, and a flat prior lets the smallest sentiment
    // pool be absorbed into a split of a larger one.
    let alpha = spec.params.get_f64("alpha", 0.1)?;
    let restarts = spec.params.get_usize("restarts", 4)?.max(1);

    // Gibbs chains are multimodal on this corpus; keep the chain with the
    // best final corpus log-likelihood.
    let mut model = None;
    for restart in 0..restarts {
        let cfg = LdaConfig {
            k,
            alpha,
            beta: spec.params.get_f64("beta", defaults.beta)?,
            iterations: spec.params.get_usize("iterations", defaults.iterations)?,
            seed: crate::rng::mix64(spec.seed.wrapping_add(restart as u64)),
        };
        let candidate = lda_fit(&docs, vocab.len(), &cfg)?;
        let ll = candidate
            .log_likelihood_trace
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY);
        if model
            .as_ref()
            .map_or(true, |(best_ll, _): &(f64, _)| ll > *best_ll)
        {
            model = Some((ll, candidate));
        }
    }
    let (_, model) = model.expect("at least one chain");
    let perplexity = lda_perplexity(&model, &docs)?;

    let top20: Vec<Vec<String>> = lda_top_terms(&model, 20)
        .into_iter()
        .map(|terms| terms.into_iter().map(|t| vocab.term(t).to_string()).collect())
        .collect();

    let mut quality = MetricRecord::new();
    quality.insert("perplexity".into(), perplexity);
    quality.insert("vocabulary_terms".into(), vocab.len() as f64);

    let matched_pools = match &ds.manifest {
        Some(manifest) => {
            let top10: Vec<Vec<String>> = top20
                .iter()
                .map(|terms| terms.iter().take(MATCH_TOP_TERMS).cloned().collect())
                .collect();
            let matched = match_topics_to_pools(&top10, manifest.seed);
            let min = matched.overlaps.iter().copied().min().unwrap_or(0);
            let mean = matched.overlaps.iter().sum::<usize>() as f64
                / (matched.overlaps.len().max(1) * MATCH_TOP_TERMS) as f64;
            quality.insert(
                "pool_match_min_overlap".into(),
                min as f64 / MATCH_TOP_TERMS as f64,
            );
            quality.insert("pool_match_mean_overlap".into(), mean);
            matched.matched_pools
        }
        None => Vec::new(),
    };
    let ml_seconds = timer.lap();

    Ok(WorkloadOutput {
        prep_seconds,
        ml_seconds,
        quality,
        artifact: ArtifactSummary::Topics {
            top_terms: top20,
            matched_pools,
        },
    })
}
