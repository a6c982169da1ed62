use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::hin::{Hin, NodeId, TypeId};
use crate::sampler::SampleSet;

#[derive(Debug, Clone)]
struct TypeTable {
    nodes: Vec<NodeId>,
    probabilities: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
}

/// Per-type negative distributions over `(count + 1)^exponent`, where `count`
/// is the number of times a node appears as a context in the corpus.
///
/// The `+ 1` keeps every node of a type in the support.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    tables: Vec<Option<TypeTable>>,
    type_names: Vec<String>,
}

impl NegativeTable {
    pub fn from_corpus(hin: &Hin, corpus: &SampleSet, exponent: f64) -> Self {
        let mut counts = vec![0u64; hin.node_count()];
        for p in &corpus.pairs {
            counts[p.context.index()] += 1;
        }
        let weights: Vec<f64> = counts
            .iter()
            .map(|&c| ((c + 1) as f64).powf(exponent))
            .collect();
        Self::from_weights(hin, &weights)
    }

    /// Builds tables from arbitrary positive per-node weights.
    pub fn from_weights(hin: &Hin, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), hin.node_count());
        let tables = (0..hin.type_count() as u32)
            .map(TypeId)
            .map(|t| {
                let nodes: Vec<NodeId> = hin.nodes_of_type(t).collect();
                if nodes.len() < 2 {
                    return None;
                }
                let w: Vec<f64> = nodes.iter().map(|v| weights[v.index()]).collect();
                let total: f64 = w.iter().sum();
                let probabilities = w.iter().map(|x| x / total).collect();
                let alias = WeightedAliasIndex::new(w).expect("positive finite weights");
                Some(TypeTable {
                    nodes,
                    probabilities,
                    alias,
                })
            })
            .collect();
        let type_names = (0..hin.type_count() as u32)
            .map(|t| hin.type_name(TypeId(t)).to_owned())
            .collect();
        NegativeTable { tables, type_names }
    }

    fn table(&self, t: TypeId) -> Result<&TypeTable> {
        self.tables[t.index()]
            .as_ref()
            .ok_or_else(|| Error::SingletonType(self.type_names[t.index()].clone()))
    }

    /// Support and probabilities of one type's distribution.
    pub fn distribution(&self, t: TypeId) -> Result<(&[NodeId], &[f64])> {
        let table = self.table(t)?;
        Ok((&table.nodes, &table.probabilities))
    }

    /// Checks that every type in `types` can supply negatives.
    pub fn check_types(&self, types: impl IntoIterator<Item = TypeId>) -> Result<()> {
        for t in types {
            self.table(t)?;
        }
        Ok(())
    }

    pub(crate) fn draw_into<R: Rng + ?Sized>(
        &self,
        t: TypeId,
        k: usize,
        exclude: NodeId,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<()> {
        let table = self.table(t)?;
        for _ in 0..k {
            loop {
                let v = table.nodes[table.alias.sample(rng)];
                if v != exclude {
                    out.push(v);
                    break;
                }
            }
        }
        Ok(())
    }
}

/// Draws `k` negatives of `context_type`, never returning `exclude`.
pub fn sample_negatives<R: Rng + ?Sized>(
    table: &NegativeTable,
    context_type: TypeId,
    k: usize,
    rng: &mut R,
    exclude: NodeId,
) -> Result<Vec<NodeId>> {
    let mut out = Vec::with_capacity(k);
    table.draw_into(context_type, k, exclude, rng, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::HinBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph() -> Hin {
        HinBuilder::new()
            .node("p1", "P")
            .node("p2", "P")
            .node("a1", "A")
            .node("a2", "A")
            .node("a3", "A")
            .node("s", "S")
            .edge("p1", "a1")
            .edge("p2", "a2")
            .edge("p2", "a3")
            .edge("p1", "s")
            .build()
    }

    #[test]
    fn negatives_have_the_requested_type_and_skip_exclude() {
        let h = graph();
        let table = NegativeTable::from_weights(&h, &[1.0; 6]);
        let ta = h.type_id("A").unwrap();
        let a1 = h.node_id("a1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = sample_negatives(&table, ta, 5000, &mut rng, a1).unwrap();
        assert_eq!(draws.len(), 5000);
        assert!(draws.iter().all(|&v| h.node_type(v) == ta && v != a1));
    }

    #[test]
    fn singleton_type_is_rejected() {
        let h = graph();
        let table = NegativeTable::from_weights(&h, &[1.0; 6]);
        let ts = h.type_id("S").unwrap();
        let err = sample_negatives(&table, ts, 1, &mut ChaCha8Rng::seed_from_u64(0), NodeId(0))
            .unwrap_err();
        assert!(matches!(err, Error::SingletonType(ref n) if n == "S"));
        assert!(err.to_string().contains("merge"));
    }

    #[test]
    fn probabilities_sum_to_one_over_the_type() {
        let h = graph();
        let table = NegativeTable::from_weights(&h, &[1.0, 3.0, 1.0, 2.0, 5.0, 1.0]);
        let (nodes, probs) = table.distribution(h.type_id("A").unwrap()).unwrap();
        assert_eq!(nodes.len(), 3);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((probs[2] - 5.0 / 8.0).abs() < 1e-12);
    }
}
