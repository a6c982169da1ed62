//! Network coarsening between sampling rounds.
//!
//! After each round the most frequent context nodes of the removable types
//! are taken out of the graph. Each removed node's former neighbors are
//! rewired among themselves, so local communities survive and walks on the
//! coarsened graph reach further. Removed nodes keep being sampled as centers,
//! but on the original graph.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{Hin, NodeId, TypeId};
use crate::rng::{self, domain};
use crate::sampler::{compute_budget, sample_graph, SampleSet, SamplingBudget};

/// The graph for sampling round `round`, plus everything removed so far.
#[derive(Clone, Debug)]
pub struct CoarsenedView {
    pub graph: Hin,
    removed: Vec<bool>,
    removed_count: usize,
    pub round: usize,
    pub budget_total: f64,
}

impl CoarsenedView {
    /// Round 0: the original graph with nothing removed.
    pub fn initial(hin: &Hin, budget_total: f64) -> Self {
        CoarsenedView {
            graph: hin.clone(),
            removed: vec![false; hin.node_count()],
            removed_count: 0,
            round: 0,
            budget_total,
        }
    }

    #[inline]
    pub fn is_removed(&self, v: NodeId) -> bool {
        self.removed[v.index()]
    }

    pub fn removed(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.removed
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| NodeId(i as u32))
    }

    pub fn removed_count(&self) -> usize {
        self.removed_count
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarsenConfig {
    /// Fraction `a` of ranked context nodes removed per round, in `[0, 1)`.
    pub cutoff: f64,
    /// Number of coarsening rounds `b`.
    pub rounds: usize,
    /// Node types eligible for removal.
    pub removable_types: BTreeSet<TypeId>,
    /// Budget attenuation `p` per round, in `(0, 1]`.
    pub attenuation: f64,
}

impl CoarsenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.cutoff) {
            return Err(Error::Config(format!(
                "cutoff must be in [0, 1), got {}",
                self.cutoff
            )));
        }
        if !(self.attenuation > 0.0 && self.attenuation <= 1.0) {
            return Err(Error::Config(format!(
                "attenuation must be in (0, 1], got {}",
                self.attenuation
            )));
        }
        if self.rounds > 0 && self.removable_types.is_empty() {
            return Err(Error::Config(
                "removable types must be non-empty when coarsening rounds > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Counts context appearances of nodes whose type is removable. Sorted by
/// count descending, ties by ascending id.
pub fn rank_contexts(
    hin: &Hin,
    samples: &SampleSet,
    removable_types: &BTreeSet<TypeId>,
) -> Vec<(NodeId, u64)> {
    let Some(max_id) = samples.pairs.iter().map(|p| p.context.index()).max() else {
        return Vec::new();
    };
    let mut removable = Vec::new();
    for t in removable_types {
        let i = t.0 as usize;
        if removable.len() <= i {
            removable.resize(i + 1, false);
        }
        removable[i] = true;
    }
    let mut counts = vec![0u64; max_id + 1];
    for p in &samples.pairs {
        if removable.get(p.context_type(hin).index()) == Some(&true) {
            counts[p.context.index()] += 1;
        }
    }
    let mut ranked: Vec<(NodeId, u64)> = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (NodeId(i as u32), c))
        .collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// The first `ceil(a * |ranked|)` nodes of the ranking.
pub fn select_removal(ranked: &[(NodeId, u64)], cutoff: f64) -> Vec<NodeId> {
    assert!((0.0..1.0).contains(&cutoff), "cutoff must be in [0, 1)");
    let k = (cutoff * ranked.len() as f64).ceil() as usize;
    ranked.iter().take(k).map(|&(v, _)| v).collect()
}

/// What removing one node did to the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewiring {
    pub removed: NodeId,
    /// Neighbors of the node at the moment it was removed.
    pub neighborhood: Vec<NodeId>,
    /// Edges that did not exist before and were added among the neighborhood.
    pub added: Vec<(NodeId, NodeId)>,
}

fn insert_sorted(list: &mut Vec<NodeId>, v: NodeId) -> bool {
    match list.binary_search(&v) {
        Ok(_) => false,
        Err(pos) => {
            list.insert(pos, v);
            true
        }
    }
}

fn remove_sorted(list: &mut Vec<NodeId>, v: NodeId) {
    if let Ok(pos) = list.binary_search(&v) {
        list.remove(pos);
    }
}

/// Removes `remove` from the view's graph and rewires, returning the next
/// view and a log of every rewiring.
///
/// Nodes are processed in ascending id order, each seeing the graph as left
/// by the previous removals. For a removed node with neighborhood `N`, every
/// `u` in `N` (when `|N| >= 2`) is linked to a partner drawn uniformly from
/// `N \ {u}`; links that already exist are skipped.
pub fn coarsen_with_log<R: Rng + ?Sized>(
    view: &CoarsenedView,
    remove: &[NodeId],
    rng: &mut R,
) -> (CoarsenedView, Vec<Rewiring>) {
    let mut order: Vec<NodeId> = remove.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut adjacency = view.graph.adjacency_lists();
    let mut removed = view.removed.clone();
    let mut log = Vec::with_capacity(order.len());

    for &v in &order {
        assert!(
            !view.removed[v.index()],
            "node {v} was removed in an earlier round"
        );
        let neighborhood = std::mem::take(&mut adjacency[v.index()]);
        for &u in &neighborhood {
            remove_sorted(&mut adjacency[u.index()], v);
        }
        let mut added = Vec::new();
        if neighborhood.len() >= 2 {
            for (i, &u) in neighborhood.iter().enumerate() {
                let mut j = rng.random_range(0..neighborhood.len() - 1);
                if j >= i {
                    j += 1;
                }
                let w = neighborhood[j];
                if insert_sorted(&mut adjacency[u.index()], w) {
                    insert_sorted(&mut adjacency[w.index()], u);
                    added.push((u.min(w), u.max(w)));
                }
            }
        }
        removed[v.index()] = true;
        log.push(Rewiring {
            removed: v,
            neighborhood,
            added,
        });
    }

    let graph = Hin::from_adjacency(
        view.graph.shared_symbols(),
        view.graph.shared_node_types(),
        adjacency,
    );
    let next = CoarsenedView {
        graph,
        removed_count: view.removed_count + order.len(),
        removed,
        round: view.round + 1,
        budget_total: view.budget_total,
    };
    (next, log)
}

/// [`coarsen_with_log`] followed by budget attenuation.
pub fn coarsen<R: Rng + ?Sized>(
    view: &CoarsenedView,
    remove: &[NodeId],
    attenuation: f64,
    rng: &mut R,
) -> CoarsenedView {
    let (mut next, _) = coarsen_with_log(view, remove, rng);
    next.budget_total = view.budget_total * attenuation;
    next
}

/// One round of the pipeline.
#[derive(Clone, Debug)]
pub struct RoundRecord {
    /// The view that was sampled in this round.
    pub view: CoarsenedView,
    pub budget: SamplingBudget,
    pub samples: SampleSet,
    /// Nodes removed after this round (empty for the last round).
    pub removed_next: Vec<NodeId>,
    pub rewiring: Vec<Rewiring>,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub rounds: Vec<RoundRecord>,
}

impl PipelineRun {
    /// The union of all rounds' pairs, in round order.
    pub fn corpus(&self) -> SampleSet {
        let mut out = SampleSet::default();
        for r in &self.rounds {
            out.merge(r.samples.clone());
        }
        out
    }

    pub fn into_corpus(self) -> SampleSet {
        let mut out = SampleSet::default();
        for r in self.rounds {
            out.merge(r.samples);
        }
        out
    }
}

/// Samples `rounds + 1` times, coarsening and attenuating the budget between
/// rounds. Per-node walk counts always use original-graph degrees.
pub fn run_pipeline(
    hin: &Hin,
    cfg: &CoarsenConfig,
    q0: f64,
    l: usize,
    seed: u64,
) -> Result<PipelineRun> {
    cfg.validate()?;
    if l == 0 {
        return Err(Error::Config("pairs per walk must be at least 1".into()));
    }
    if !(q0.is_finite() && q0 > 0.0) {
        return Err(Error::Config(format!("sampling budget must be positive, got {q0}")));
    }
    let mut view = CoarsenedView::initial(hin, q0);
    let mut rounds = Vec::with_capacity(cfg.rounds + 1);
    for i in 0..=cfg.rounds {
        let budget = compute_budget(hin, view.budget_total);
        let samples = sample_graph(hin, &view, &budget, l, seed);
        if i == cfg.rounds {
            rounds.push(RoundRecord {
                view,
                budget,
                samples,
                removed_next: Vec::new(),
                rewiring: Vec::new(),
            });
            break;
        }
        let ranked: Vec<(NodeId, u64)> = rank_contexts(hin, &samples, &cfg.removable_types)
            .into_iter()
            .filter(|&(v, _)| !view.is_removed(v))
            .collect();
        let remove = select_removal(&ranked, cfg.cutoff);
        let mut rng = rng::stream(seed, &[domain::COARSEN, i as u64]);
        let (mut next, rewiring) = coarsen_with_log(&view, &remove, &mut rng);
        next.budget_total = view.budget_total * cfg.attenuation;
        log::debug!(
            "round {i}: {} pairs, removed {} node(s), {} edge(s) remain",
            samples.len(),
            remove.len(),
            next.graph.edge_count()
        );
        rounds.push(RoundRecord {
            view: std::mem::replace(&mut view, next),
            budget,
            samples,
            removed_next: remove,
            rewiring,
        });
    }
    Ok(PipelineRun { rounds })
}

/// Removable-type set from type names.
pub fn removable_types(hin: &Hin, names: &[String]) -> Result<BTreeSet<TypeId>> {
    names
        .iter()
        .map(|n| {
            hin.type_id(n)
                .ok_or_else(|| Error::Config(format!("removable type `{n}` is not a node type")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::HinBuilder;
    use crate::sampler::PairSample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star_with_leaves(n: usize) -> Hin {
        let mut b = HinBuilder::new();
        b.add_node("h", "S").unwrap();
        for i in 1..=n {
            b.add_node(&format!("n{i}"), "P").unwrap();
            b.add_edge("h", &format!("n{i}")).unwrap();
        }
        b.build()
    }

    fn set_of(hin: &Hin, pairs: &[(&str, &str)]) -> SampleSet {
        SampleSet {
            pairs: pairs
                .iter()
                .map(|(a, b)| PairSample::new(hin.node_id(a).unwrap(), hin.node_id(b).unwrap()))
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn ranking_counts_removable_contexts() {
        let h = HinBuilder::new()
            .node("x", "P")
            .node("h", "S")
            .node("n", "S")
            .node("y", "A")
            .edge("x", "h")
            .build();
        let s = set_of(&h, &[("x", "h"), ("x", "h"), ("x", "n"), ("x", "y")]);
        let tr: BTreeSet<TypeId> = [h.type_id("S").unwrap()].into();
        let ranked = rank_contexts(&h, &s, &tr);
        assert_eq!(
            ranked,
            vec![(h.node_id("h").unwrap(), 2), (h.node_id("n").unwrap(), 1)]
        );
        let none: BTreeSet<TypeId> = [h.type_id("P").unwrap()].into();
        assert!(rank_contexts(&h, &s, &none).is_empty());
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let h = HinBuilder::new()
            .node("x", "P")
            .node("b", "S")
            .node("a", "S")
            .edge("x", "a")
            .build();
        let s = set_of(&h, &[("x", "a"), ("x", "b")]);
        let tr: BTreeSet<TypeId> = [h.type_id("S").unwrap()].into();
        let ranked = rank_contexts(&h, &s, &tr);
        assert_eq!(ranked[0].0, h.node_id("b").unwrap());
        assert!(ranked[0].0 < ranked[1].0);
    }

    #[test]
    fn removal_count_is_ceiling() {
        let ranked: Vec<(NodeId, u64)> = (0..10).map(|i| (NodeId(i), 10 - i as u64)).collect();
        assert_eq!(select_removal(&ranked, 0.3), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert!(select_removal(&ranked, 0.0).is_empty());
        assert_eq!(select_removal(&ranked[..5], 0.2).len(), 1);
        assert_eq!(select_removal(&ranked[..5], 0.21).len(), 2);
    }

    #[test]
    fn removing_a_hub_rewires_its_leaves() {
        let h = star_with_leaves(3);
        let hub = h.node_id("h").unwrap();
        let view = CoarsenedView::initial(&h, 200.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (next, log) = coarsen_with_log(&view, &[hub], &mut rng);
            assert_eq!(next.graph.degree(hub), 0);
            assert!(next.is_removed(hub));
            for leaf in ["n1", "n2", "n3"] {
                assert!(next.graph.degree(h.node_id(leaf).unwrap()) >= 1);
            }
            for (u, v) in next.graph.edges() {
                assert!(u != hub && v != hub);
            }
            assert_eq!(log[0].neighborhood.len(), 3);
            assert_eq!(next.round, 1);
        }
    }

    #[test]
    fn single_neighbor_gains_nothing() {
        let h = HinBuilder::new()
            .node("h", "S")
            .node("n", "P")
            .node("m", "P")
            .node("k", "A")
            .edge("h", "n")
            .edge("m", "k")
            .build();
        let view = CoarsenedView::initial(&h, 10.0);
        let (next, log) =
            coarsen_with_log(&view, &[h.node_id("h").unwrap()], &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(next.graph.degree(h.node_id("n").unwrap()), 0);
        assert!(log[0].added.is_empty());
        assert_eq!(next.graph.edge_count(), 1);
    }

    #[test]
    fn budget_halves() {
        let h = star_with_leaves(4);
        let view = CoarsenedView::initial(&h, 200.0 * h.node_count() as f64);
        let next = coarsen(&view, &[], 0.5, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(next.budget_total, 100.0 * h.node_count() as f64);
    }

    #[test]
    fn config_validation() {
        let mut cfg = CoarsenConfig {
            cutoff: 0.3,
            rounds: 3,
            removable_types: [TypeId(0)].into(),
            attenuation: 0.5,
        };
        assert!(cfg.validate().is_ok());
        cfg.cutoff = 1.0;
        assert!(cfg.validate().is_err());
        cfg.cutoff = 0.3;
        cfg.attenuation = 0.0;
        assert!(cfg.validate().is_err());
        cfg.attenuation = 0.5;
        cfg.removable_types.clear();
        assert!(cfg.validate().is_err());
        cfg.rounds = 0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn pipeline_budgets_attenuate() {
        let h = star_with_leaves(8);
        let cfg = CoarsenConfig {
            cutoff: 0.5,
            rounds: 3,
            removable_types: [h.type_id("P").unwrap()].into(),
            attenuation: 0.5,
        };
        let run = run_pipeline(&h, &cfg, 160.0, 3, 9).unwrap();
        let totals: Vec<f64> = run.rounds.iter().map(|r| r.view.budget_total).collect();
        assert_eq!(totals, vec![160.0, 80.0, 40.0, 20.0]);
        assert!(run.rounds.last().unwrap().removed_next.is_empty());
    }
}
