use std::collections::BTreeSet;

use hin_embed::coarsener::{removable_types, run_pipeline, CoarsenConfig};
use hin_embed::diagnostics::{sample_entropy, self_pair_fraction, Pair};
use hin_embed::eval::{f1_scores, nmi};
use hin_embed::hin::{load_hin, save_hin, Hin, HinBuilder, NodeId};
use hin_embed::sampler::compute_budget;
use proptest::prelude::*;
use tempfile::TempDir;

const TYPE_NAMES: [&str; 3] = ["P", "A", "S"];

fn graph_strategy() -> impl Strategy<Value = Hin> {
    (2usize..25)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..3, n),
                proptest::collection::vec((0..n, 0..n), 1..60),
            )
        })
        .prop_map(|(types, edges)| {
            let mut b = HinBuilder::new();
            for (i, t) in types.iter().enumerate() {
                b.add_node(&format!("n{i}"), TYPE_NAMES[*t]).unwrap();
            }
            for (u, v) in edges {
                b.add_edge_ids(NodeId(u as u32), NodeId(v as u32));
            }
            b.build()
        })
}

fn named_edges(h: &Hin) -> BTreeSet<(String, String)> {
    h.edges()
        .map(|(u, v)| {
            let (a, b) = (h.node_name(u).to_owned(), h.node_name(v).to_owned());
            if a < b { (a, b) } else { (b, a) }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degrees_sum_to_twice_edges(h in graph_strategy()) {
        let total: usize = h.nodes().map(|v| h.degree(v)).sum();
        prop_assert_eq!(total, 2 * h.edge_count());
    }

    #[test]
    fn adjacency_is_symmetric_and_loop_free(h in graph_strategy()) {
        for v in h.nodes() {
            for &u in h.neighbors(v) {
                prop_assert!(u != v);
                prop_assert!(h.has_edge(u, v));
            }
        }
    }

    #[test]
    fn type_buckets_partition_neighbors(h in graph_strategy()) {
        for v in h.nodes() {
            let per_type: usize = h.neighbor_types(v).map(|t| h.neighbors_of_type(v, t).len()).sum();
            prop_assert_eq!(per_type, h.degree(v));
            for t in h.neighbor_types(v) {
                prop_assert!(h.neighbors_of_type(v, t).iter().all(|&u| h.node_type(u) == t));
            }
        }
    }

    #[test]
    fn files_round_trip(h in graph_strategy()) {
        let dir = TempDir::new().unwrap();
        let (e, t) = (dir.path().join("e.tsv"), dir.path().join("t.tsv"));
        save_hin(&h, &e, &t).unwrap();
        let (back, _) = load_hin(&e, &t).unwrap();
        prop_assert_eq!(back.node_count(), h.node_count());
        prop_assert_eq!(named_edges(&back), named_edges(&h));
        for v in h.nodes() {
            let w = back.node_id(h.node_name(v)).unwrap();
            prop_assert_eq!(back.type_name(back.node_type(w)), h.type_name(h.node_type(v)));
        }
    }

    #[test]
    fn corpus_never_contains_self_pairs(h in graph_strategy(), seed in any::<u64>()) {
        let names: Vec<String> = TYPE_NAMES.iter()
            .filter(|t| h.type_id(t).is_some())
            .map(|t| t.to_string())
            .collect();
        let cfg = CoarsenConfig {
            cutoff: 0.3,
            rounds: 2,
            removable_types: removable_types(&h, &names).unwrap(),
            attenuation: 0.5,
        };
        let run = run_pipeline(&h, &cfg, 20.0 * h.node_count() as f64, 5, seed).unwrap();
        let corpus = run.into_corpus();
        prop_assert!(corpus.pairs.iter().all(|p| p.center != p.context));
        if !corpus.is_empty() {
            prop_assert_eq!(self_pair_fraction(&corpus.pair_ids()).unwrap(), 0.0);
        }
    }

    #[test]
    fn budget_rounds_to_nearest(h in graph_strategy(), q in 1.0f64..5000.0) {
        let b = compute_budget(&h, q);
        let two_e = 2.0 * h.edge_count() as f64;
        for v in h.nodes() {
            let exact = q * h.degree(v) as f64 / two_e;
            prop_assert!((b.per_node[v.index()] as f64 - exact).abs() <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn entropy_is_bounded_and_order_free(
        raw in proptest::collection::vec((0u32..6, 0u32..6), 1..80),
        shift in 0usize..80,
    ) {
        let pairs: Vec<Pair> = raw.iter().map(|&(a, b)| (NodeId(a), NodeId(b))).collect();
        let kept: Vec<Pair> = pairs.iter().copied().filter(|(a, b)| a != b).collect();
        prop_assume!(!kept.is_empty());
        let h = sample_entropy(&pairs).unwrap();
        let distinct: BTreeSet<Pair> = kept.iter().copied().collect();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (distinct.len() as f64).ln() + 1e-12);
        let mut rotated = pairs.clone();
        rotated.rotate_left(shift % pairs.len());
        prop_assert!((sample_entropy(&rotated).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn nmi_is_symmetric_bounded_and_label_free(
        a in proptest::collection::vec(0usize..4, 2..60),
        seed in proptest::collection::vec(0usize..4, 60),
    ) {
        let b: Vec<usize> = seed[..a.len()].to_vec();
        let ab = nmi(&a, &b).unwrap();
        let ba = nmi(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        let relabeled: Vec<usize> = a.iter().map(|&x| 3 - x).collect();
        prop_assert!((nmi(&relabeled, &b).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn f1_scores_are_bounded(
        truth in proptest::collection::vec(0usize..4, 1..60),
        noise in proptest::collection::vec(0usize..4, 60),
    ) {
        let pred = &noise[..truth.len()];
        let (ma, mi) = f1_scores(&truth, pred, 4);
        prop_assert!((0.0..=1.0).contains(&ma));
        prop_assert!((0.0..=1.0).contains(&mi));
        let (ma, mi) = f1_scores(&truth, &truth, 4);
        prop_assert_eq!((ma, mi), (1.0, 1.0));
    }
}
