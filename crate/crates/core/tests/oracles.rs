//! Library outputs checked against values computed independently here.

use hin_embed::diagnostics::{sample_entropy, Pair};
use hin_embed::embedder::{sample_negatives, NegativeTable};
use hin_embed::eval::{kmeans, nmi};
use hin_embed::hin::{HinBuilder, NodeId};
use hin_embed::rng;
use hin_embed::sampler::{PairSample, SampleSet};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn negatives_follow_smoothed_unigram_law() {
    let h = HinBuilder::new()
        .node("p", "P")
        .node("a0", "A")
        .node("a1", "A")
        .node("a2", "A")
        .node("a3", "A")
        .edge("p", "a0")
        .build();
    let id = |n: &str| h.node_id(n).unwrap();
    // Context counts: a0 x7, a1 x2, a2 x0, a3 x1.
    let mut pairs = Vec::new();
    for (name, n) in [("a0", 7), ("a1", 2), ("a3", 1)] {
        pairs.extend((0..n).map(|_| PairSample::new(id("p"), id(name))));
    }
    let corpus = SampleSet { pairs, ..Default::default() };
    let table = NegativeTable::from_corpus(&h, &corpus, 0.75);

    let weights: Vec<f64> = [7.0f64, 2.0, 0.0, 1.0].iter().map(|c| (c + 1.0).powf(0.75)).collect();
    let total: f64 = weights.iter().sum();
    let draws = 200_000;
    let mut rng = rng::stream(11, &[]);
    let a = h.type_id("A").unwrap();
    // Excluding a node of another type leaves the distribution untouched.
    let got = sample_negatives(&table, a, draws, &mut rng, id("p")).unwrap();
    let mut counts = [0usize; 4];
    for v in got {
        counts[["a0", "a1", "a2", "a3"].iter().position(|n| id(n) == v).unwrap()] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(&weights)
        .map(|(&c, w)| {
            let e = draws as f64 * w / total;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let p = 1.0 - ChiSquared::new(3.0).unwrap().cdf(stat);
    assert!(p > 0.001, "chi2 {stat}, p {p}, counts {counts:?}");

    let without_a0 = sample_negatives(&table, a, 1000, &mut rng, id("a0")).unwrap();
    assert!(without_a0.iter().all(|&v| v != id("a0")));
}

#[test]
fn entropy_of_uniform_pairs_is_log_count() {
    let n = |i: u32| NodeId(i);
    let pairs: Vec<Pair> = vec![(n(0), n(1)), (n(1), n(0)), (n(2), n(3)), (n(3), n(2)), (n(4), n(4))];
    let h = sample_entropy(&pairs).unwrap();
    assert!((h - 4f64.ln()).abs() < 1e-12);

    // Counts 3:1 over two pairs.
    let skew = vec![(n(0), n(1)); 3].into_iter().chain([(n(1), n(2))]).collect::<Vec<_>>();
    let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
    assert!((sample_entropy(&skew).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn nmi_extremes() {
    assert!((nmi(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap() - 1.0).abs() < 1e-12);
    // Independent partitions share no information.
    assert!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().abs() < 1e-12);
}

#[test]
fn kmeans_recovers_separated_groups() {
    let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
    let mut x = Vec::new();
    let mut truth = Vec::new();
    for i in 0..60 {
        let c = i % 3;
        let jitter = (i as f64 * 0.37).sin() * 0.5;
        x.extend([centers[c].0 + jitter, centers[c].1 - jitter]);
        truth.push(c);
    }
    let clustering = kmeans(&x, 2, 3, 5);
    assert!((nmi(&clustering.assignment, &truth).unwrap() - 1.0).abs() < 1e-12);
}
