//! Corpus quality measures and the sliding-window baseline sampler.
//!
//! Entropy is the Shannon entropy, in nats, of the relative frequencies of
//! distinct ordered `(center, context)` pairs after self-pairs are dropped.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{Hin, NodeId};
use crate::rng::{self, domain};
use crate::sampler::step_walk;

pub type Pair = (NodeId, NodeId);

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusStats {
    pub pair_count: usize,
    /// Distinct pairs, self-pairs included.
    pub distinct_pair_count: usize,
    pub self_pair_fraction: f64,
    pub entropy_nats: f64,
}

impl CorpusStats {
    pub fn from_pairs(pairs: &[Pair]) -> Result<Self> {
        let counts = count_pairs(pairs);
        Ok(CorpusStats {
            pair_count: pairs.len(),
            distinct_pair_count: counts.len(),
            self_pair_fraction: self_pair_fraction(pairs)?,
            entropy_nats: entropy_of_counts(&counts)?,
        })
    }
}

fn count_pairs(pairs: &[Pair]) -> HashMap<Pair, u64> {
    let mut counts = HashMap::new();
    for &p in pairs {
        *counts.entry(p).or_insert(0u64) += 1;
    }
    counts
}

/// Share of pairs whose center equals the context.
pub fn self_pair_fraction(pairs: &[Pair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput(
            "self-pair fraction of an empty corpus is undefined".into(),
        ));
    }
    let selfs = pairs.iter().filter(|(a, b)| a == b).count();
    Ok(selfs as f64 / pairs.len() as f64)
}

fn entropy_of_counts(counts: &HashMap<Pair, u64>) -> Result<f64> {
    let mut kept: Vec<u64> = counts
        .iter()
        .filter(|((a, b), _)| a != b)
        .map(|(_, &c)| c)
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidInput(
            "entropy is undefined: the corpus has no non-self pairs".into(),
        ));
    }
    // Fixed summation order keeps the value independent of hash order.
    kept.sort_unstable();
    let total: u64 = kept.iter().sum();
    let total = total as f64;
    let h = -kept
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Entropy in nats of the non-self pair frequencies.
pub fn sample_entropy(pairs: &[Pair]) -> Result<f64> {
    entropy_of_counts(&count_pairs(pairs))
}

/// Pairs every position of `walk` with every other position at most `window`
/// steps away. Self-pairs are kept.
pub fn window_pairs(walk: &[NodeId], window: usize, out: &mut Vec<Pair>) {
    for (i, &center) in walk.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(walk.len() - 1);
        for (j, &context) in walk.iter().enumerate().take(hi + 1).skip(lo) {
            if j != i {
                out.push((center, context));
            }
        }
    }
}

/// Settings of the sliding-window baseline: fixed-length type-guided walks
/// cut into pairs with a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowBaseline {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
}

impl Default for WindowBaseline {
    fn default() -> Self {
        WindowBaseline {
            walks_per_node: 20,
            walk_length: 10,
            window: 5,
        }
    }
}

impl WindowBaseline {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 {
            return Err(Error::Config("walks_per_node must be at least 1".into()));
        }
        if self.walk_length < 2 {
            return Err(Error::Config("walk_length must be at least 2".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        Ok(())
    }

    /// `walks_per_node` walks of `walk_length` nodes start at every
    /// non-isolated node; each position is paired with every position within
    /// `window`.
    pub fn sample(&self, hin: &Hin, seed: u64) -> Result<Vec<Pair>> {
        self.validate()?;
        let per_node: Vec<Vec<Pair>> = hin
            .nodes()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&v| {
                let mut out = Vec::new();
                if hin.degree(v) == 0 {
                    return out;
                }
                let mut rng = rng::stream(seed, &[domain::WINDOW, v.0 as u64]);
                let mut walk = Vec::with_capacity(self.walk_length);
                for _ in 0..self.walks_per_node {
                    walk.clear();
                    walk.push(v);
                    while walk.len() < self.walk_length {
                        let next = step_walk(hin, *walk.last().unwrap(), &mut rng)
                            .expect("undirected walk never strands");
                        walk.push(next);
                    }
                    window_pairs(&walk, self.window, &mut out);
                }
                out
            })
            .collect();
        Ok(per_node.into_iter().flatten().collect())
    }
}

/// Compares a walk corpus against the window baseline on the same graph.
/// Both corpora are subsampled to the smaller size so the pair budgets match.
/// Rows are named `coarsas` and `window_baseline`.
pub fn matched_comparison(
    hin: &Hin,
    corpus: &[Pair],
    baseline: &WindowBaseline,
    seed: u64,
) -> Result<ComparisonReport> {
    let window = baseline.sample(hin, seed)?;
    let n = corpus.len().min(window.len());
    let a = subsample(corpus, n, rng::derive_seed(seed, &[1]));
    let b = subsample(&window, n, rng::derive_seed(seed, &[2]));
    compare_corpora("coarsas", &a, "window_baseline", &b)
}

/// A seeded uniform subsample of `n` pairs (all of them when `n >= len`).
pub fn subsample(pairs: &[Pair], n: usize, seed: u64) -> Vec<Pair> {
    if n >= pairs.len() {
        return pairs.to_vec();
    }
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    let mut rng = rng::stream(seed, &[domain::SUBSAMPLE]);
    let (chosen, _) = idx.partial_shuffle(&mut rng, n);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| pairs[i]).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<(String, CorpusStats)>,
}

impl ComparisonReport {
    /// Second row minus first row: `(pairs, distinct, self-pair fraction, entropy)`.
    pub fn deltas(&self) -> (i64, i64, f64, f64) {
        let (a, b) = (&self.rows[0].1, &self.rows[1].1);
        (
            b.pair_count as i64 - a.pair_count as i64,
            b.distinct_pair_count as i64 - a.distinct_pair_count as i64,
            b.self_pair_fraction - a.self_pair_fraction,
            b.entropy_nats - a.entropy_nats,
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,pairs,distinct,self_pair_fraction,entropy_nats\n");
        for (name, s) in &self.rows {
            let _ = writeln!(
                out,
                "{name},{},{},{},{}",
                s.pair_count, s.distinct_pair_count, s.self_pair_fraction, s.entropy_nats
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<18} {:>12} {:>12} {:>12} {:>10}\n",
            "method", "pairs", "distinct", "P(self)", "H(S)"
        );
        for (name, s) in &self.rows {
            let _ = writeln!(
                out,
                "{:<18} {:>12} {:>12} {:>12.6} {:>10.4}",
                name, s.pair_count, s.distinct_pair_count, s.self_pair_fraction, s.entropy_nats
            );
        }
        let (dp, dd, ds, dh) = self.deltas();
        let _ = writeln!(out, "{:<18} {dp:>12} {dd:>12} {ds:>12.6} {dh:>10.4}", "delta");
        out
    }
}

pub fn compare_corpora(
    name_a: &str,
    a: &[Pair],
    name_b: &str,
    b: &[Pair],
) -> Result<ComparisonReport> {
    Ok(ComparisonReport {
        rows: vec![
            (name_a.to_owned(), CorpusStats::from_pairs(a)?),
            (name_b.to_owned(), CorpusStats::from_pairs(b)?),
        ],
    })
}
