//! Planted-partition heterogeneous graphs with known communities.
//!
//! Nodes of every type are split round-robin into `communities` groups. Each
//! target node links to a fixed number of nodes of every other type; a link
//! stays inside the target's community with probability `intra`. Within a
//! community, partners are drawn with Zipf weights `1 / rank^hub_skew`, so a
//! large `hub_skew` concentrates links on a few hubs and makes the graph
//! star-heavy. Target nodes are labeled with their community.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{save_hin, save_labels, Hin, HinBuilder, LabelSet, NodeId};
use crate::rng::{self, domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerType {
    pub name: String,
    pub count: usize,
    /// Links from each target node to nodes of this type.
    pub links_per_target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub communities: usize,
    pub target_type: String,
    pub target_count: usize,
    pub partners: Vec<PartnerType>,
    /// Probability that a link stays inside the target's community.
    pub intra: f64,
    /// Zipf exponent of partner popularity inside a community; 0 is uniform.
    pub hub_skew: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// About 1,500 nodes of three types in three communities, 4:1 intra bias.
    fn default() -> Self {
        SynthConfig {
            communities: 3,
            target_type: "P".into(),
            target_count: 600,
            partners: vec![
                PartnerType {
                    name: "A".into(),
                    count: 600,
                    links_per_target: 5,
                },
                PartnerType {
                    name: "S".into(),
                    count: 300,
                    links_per_target: 3,
                },
            ],
            intra: 0.8,
            hub_skew: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// About 2,000 nodes where a handful of partner nodes carry most links.
    pub fn star_heavy(seed: u64) -> Self {
        SynthConfig {
            target_count: 1000,
            partners: vec![
                PartnerType {
                    name: "A".into(),
                    count: 700,
                    links_per_target: 3,
                },
                PartnerType {
                    name: "S".into(),
                    count: 300,
                    links_per_target: 2,
                },
            ],
            hub_skew: 1.5,
            seed,
            ..SynthConfig::default()
        }
    }

    /// Scales every node count by `factor`, keeping mean degree fixed.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |n: usize| ((n as f64 * factor).round() as usize).max(self.communities);
        SynthConfig {
            target_count: scale(self.target_count),
            partners: self
                .partners
                .iter()
                .map(|p| PartnerType {
                    count: scale(p.count),
                    ..p.clone()
                })
                .collect(),
            ..self.clone()
        }
    }

    pub fn node_count(&self) -> usize {
        self.target_count + self.partners.iter().map(|p| p.count).sum::<usize>()
    }

    pub fn validate(&self) -> Result<()> {
        if self.communities < 1 {
            return Err(Error::Config("communities must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.intra) {
            return Err(Error::Config(format!("intra must be in [0, 1], got {}", self.intra)));
        }
        if !(self.hub_skew.is_finite() && self.hub_skew >= 0.0) {
            return Err(Error::Config(format!(
                "hub_skew must be a non-negative number, got {}",
                self.hub_skew
            )));
        }
        if self.partners.is_empty() {
            return Err(Error::Config("at least one partner type is required".into()));
        }
        let mut names: HashSet<&str> = HashSet::from([self.target_type.as_str()]);
        for p in &self.partners {
            if !names.insert(&p.name) {
                return Err(Error::Config(format!("type `{}` listed twice", p.name)));
            }
            if p.count < self.communities {
                return Err(Error::Config(format!(
                    "type `{}` needs at least one node per community",
                    p.name
                )));
            }
        }
        if self.target_count < self.communities {
            return Err(Error::Config("target type needs at least one node per community".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SynthGraph {
    pub hin: Hin,
    pub labels: LabelSet,
}

impl SynthGraph {
    /// Writes `edges.tsv`, `types.tsv` and `labels.tsv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        save_hin(&self.hin, &dir.join("edges.tsv"), &dir.join("types.tsv"))?;
        save_labels(&self.hin, &self.labels, &dir.join("labels.tsv"))
    }
}

/// Zipf-weighted node pool of one type inside one community.
struct Pool {
    nodes: Vec<NodeId>,
    alias: WeightedAliasIndex<f64>,
}

impl Pool {
    fn new(nodes: Vec<NodeId>, skew: f64) -> Self {
        let weights = (1..=nodes.len())
            .map(|r| (r as f64).powf(-skew))
            .collect();
        let alias = WeightedAliasIndex::new(weights).expect("positive weights");
        Pool { nodes, alias }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        self.nodes[self.alias.sample(rng)]
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthGraph> {
    cfg.validate()?;
    let k = cfg.communities;
    let mut rng = rng::stream(cfg.seed, &[domain::SYNTH]);
    let mut b = HinBuilder::new();
    b.add_type(&cfg.target_type);
    let targets: Vec<NodeId> = (0..cfg.target_count)
        .map(|i| b.add_node(&format!("{}{i}", cfg.target_type), &cfg.target_type))
        .collect::<Result<_>>()?;
    let mut edges: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut ordered_edges = Vec::new();
    for p in &cfg.partners {
        let ids: Vec<NodeId> = (0..p.count)
            .map(|i| b.add_node(&format!("{}{i}", p.name), &p.name))
            .collect::<Result<_>>()?;
        let pools: Vec<Pool> = (0..k)
            .map(|c| Pool::new(ids.iter().copied().skip(c).step_by(k).collect(), cfg.hub_skew))
            .collect();
        let mut linked = vec![false; p.count];
        for (i, &t) in targets.iter().enumerate() {
            let home = i % k;
            for _ in 0..p.links_per_target {
                let c = if k == 1 || rng.random::<f64>() < cfg.intra {
                    home
                } else {
                    let other = rng.random_range(0..k - 1);
                    if other >= home {
                        other + 1
                    } else {
                        other
                    }
                };
                let u = pools[c].draw(&mut rng);
                if edges.insert((t, u)) {
                    ordered_edges.push((t, u));
                    linked[u.index() - ids[0].index()] = true;
                }
            }
        }
        // Keep the graph free of isolated nodes.
        for (j, &u) in ids.iter().enumerate() {
            if !linked[j] {
                let c = j % k;
                let in_community = (cfg.target_count - c).div_ceil(k);
                let t = targets[c + k * rng.random_range(0..in_community)];
                edges.insert((t, u));
                ordered_edges.push((t, u));
            }
        }
    }
    for (t, u) in ordered_edges {
        b.add_edge_ids(t, u);
    }
    let hin = b.build();
    let target_type = hin
        .type_id(&cfg.target_type)
        .expect("target type registered");
    let labels: BTreeMap<NodeId, usize> = targets.iter().enumerate().map(|(i, &t)| (t, i % k)).collect();
    let names = (0..k).map(|c| format!("c{c}")).collect();
    let labels = LabelSet::new(&hin, target_type, labels, names)?;
    Ok(SynthGraph { hin, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_graph_shape() {
        let g = generate(&SynthConfig::default()).unwrap();
        assert_eq!(g.hin.node_count(), 1500);
        assert_eq!(g.hin.type_count(), 3);
        assert!(g.hin.nodes().all(|v| g.hin.degree(v) > 0));
        assert_eq!(g.labels.len(), 600);
        assert_eq!(g.labels.class_count(), 3);
    }

    #[test]
    fn intra_bias_is_planted() {
        let cfg = SynthConfig::default();
        let g = generate(&cfg).unwrap();
        let community = |v: NodeId| {
            let name = g.hin.node_name(v);
            let idx: usize = name[1..].parse().unwrap();
            idx % cfg.communities
        };
        let (mut intra, mut inter) = (0usize, 0usize);
        for (u, v) in g.hin.edges() {
            if community(u) == community(v) {
                intra += 1;
            } else {
                inter += 1;
            }
        }
        assert!(intra as f64 >= 3.5 * inter as f64, "{intra} vs {inter}");
    }

    #[test]
    fn skew_concentrates_degree() {
        let flat = generate(&SynthConfig::default()).unwrap();
        let star = generate(&SynthConfig {
            hub_skew: 1.5,
            ..SynthConfig::default()
        })
        .unwrap();
        let max_deg = |h: &Hin| h.nodes().map(|v| h.degree(v)).max().unwrap();
        assert!(max_deg(&star.hin) > 5 * max_deg(&flat.hin));
    }

    #[test]
    fn same_seed_same_graph() {
        let a = generate(&SynthConfig::star_heavy(4)).unwrap();
        let b = generate(&SynthConfig::star_heavy(4)).unwrap();
        assert_eq!(a.hin, b.hin);
        let c = generate(&SynthConfig::star_heavy(5)).unwrap();
        assert_ne!(a.hin, c.hin);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = SynthConfig {
            intra: 1.5,
            ..SynthConfig::default()
        };
        assert!(generate(&bad).is_err());
    }
}
