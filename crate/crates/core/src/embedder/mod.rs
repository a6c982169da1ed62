//! Typed skip-gram with negative sampling.
//!
//! Every node has a center vector `v` and a context vector `c`. A pair-type
//! tensor `W` holds one `d`-vector per `(context type, center type)` pair and
//! reweights the context vector element-wise before the dot product:
//!
//! ```text
//! score(v, c) = sum_j W[type(c)][type(v)][j] * c[j] * v[j]
//! loss        = -log σ(score(v, c)) - Σ_k log σ(-score(v, c'_k))
//! ```
//!
//! Negatives `c'_k` are drawn from nodes of the context's type. `W` starts at
//! all-ones, so an untrained model scores exactly like plain SGNS.

mod adam;
mod io;
mod loss;
mod negatives;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{Hin, NodeId, TypeId};
use crate::rng::{self, domain};

pub use adam::AdamState;
pub use io::{export_embeddings, import_embeddings, write_embeddings, Embeddings};
pub use loss::{loss_and_grad, log_sigmoid, Gradients, SparseRows, TrainingPair};
pub use negatives::{sample_negatives, NegativeTable};
pub use train::{fit, train, TrainReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    /// Negatives drawn per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub batch_size: usize,
    /// Exponent applied to node frequencies in the negative distribution.
    pub negative_exponent: f64,
    /// When false, `W` stays at its initial all-ones value.
    pub train_pair_type: bool,
    /// Worker threads for gradient computation. `1` is the reference mode.
    pub workers: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            negatives: 5,
            epochs: 50,
            learning_rate: 0.005,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            batch_size: 1024,
            negative_exponent: 0.75,
            train_pair_type: true,
            workers: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_owned()));
        if self.dim == 0 {
            return fail("embedding dimension must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives per positive must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1");
        }
        if self.workers == 0 {
            return fail("workers must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return fail("Adam betas must be in [0, 1)");
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return fail("Adam epsilon must be positive");
        }
        if !self.negative_exponent.is_finite() {
            return fail("negative exponent must be finite");
        }
        Ok(())
    }
}

/// Center vectors, context vectors, pair-type tensor and optimizer state.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    type_count: usize,
    node_types: Vec<TypeId>,
    /// Row-major `|V| x d`.
    pub(crate) center: Vec<f64>,
    /// Row-major `|V| x d`.
    pub(crate) context: Vec<f64>,
    /// Row `ctx_type * |T| + center_type`, each of length `d`.
    pub(crate) pair_type: Vec<f64>,
    pub(crate) adam: AdamState,
}

/// Uniform `[-0.5/d, 0.5/d]` vectors, all-ones `W`, zeroed Adam moments.
pub fn init_model(hin: &Hin, cfg: &TrainConfig) -> Result<EmbeddingModel> {
    cfg.validate()?;
    Ok(EmbeddingModel::new(
        hin.node_types().to_vec(),
        hin.type_count(),
        cfg.dim,
        cfg.seed,
    ))
}

impl EmbeddingModel {
    pub fn new(node_types: Vec<TypeId>, type_count: usize, dim: usize, seed: u64) -> Self {
        let n = node_types.len();
        let bound = 0.5 / dim as f64;
        let mut rng = rng::stream(seed, &[domain::INIT]);
        let mut fill = |len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| rng.random_range(-bound..=bound))
                .collect()
        };
        let center = fill(n * dim);
        let context = fill(n * dim);
        let pair_type = vec![1.0; type_count * type_count * dim];
        let adam = AdamState::new(n * dim, n * dim, pair_type.len());
        EmbeddingModel {
            dim,
            type_count,
            node_types,
            center,
            context,
            pair_type,
            adam,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    #[inline]
    pub fn node_type(&self, v: NodeId) -> TypeId {
        self.node_types[v.index()]
    }

    #[inline]
    pub fn center_vec(&self, v: NodeId) -> &[f64] {
        &self.center[v.index() * self.dim..(v.index() + 1) * self.dim]
    }

    #[inline]
    pub fn context_vec(&self, c: NodeId) -> &[f64] {
        &self.context[c.index() * self.dim..(c.index() + 1) * self.dim]
    }

    #[inline]
    pub(crate) fn pair_type_row(&self, context_type: TypeId, center_type: TypeId) -> usize {
        context_type.index() * self.type_count + center_type.index()
    }

    /// `W[context_type][center_type]`.
    #[inline]
    pub fn pair_type_vec(&self, context_type: TypeId, center_type: TypeId) -> &[f64] {
        let r = self.pair_type_row(context_type, center_type);
        &self.pair_type[r * self.dim..(r + 1) * self.dim]
    }

    pub fn center_vec_mut(&mut self, v: NodeId) -> &mut [f64] {
        let d = self.dim;
        &mut self.center[v.index() * d..(v.index() + 1) * d]
    }

    pub fn context_vec_mut(&mut self, c: NodeId) -> &mut [f64] {
        let d = self.dim;
        &mut self.context[c.index() * d..(c.index() + 1) * d]
    }

    pub fn pair_type_vec_mut(&mut self, context_type: TypeId, center_type: TypeId) -> &mut [f64] {
        let d = self.dim;
        let r = self.pair_type_row(context_type, center_type);
        &mut self.pair_type[r * d..(r + 1) * d]
    }

    /// `(W[type(c)][type(v)] ⊙ c) · v`.
    #[inline]
    pub fn pair_score(&self, v: NodeId, c: NodeId) -> f64 {
        let w = self.pair_type_vec(self.node_type(c), self.node_type(v));
        let cv = self.context_vec(c);
        let vv = self.center_vec(v);
        w.iter()
            .zip(cv)
            .zip(vv)
            .map(|((w, c), v)| w * c * v)
            .sum()
    }

    /// The full center matrix, row-major.
    pub fn center_matrix(&self) -> &[f64] {
        &self.center
    }

    pub fn is_finite(&self) -> bool {
        self.center
            .iter()
            .chain(&self.context)
            .chain(&self.pair_type)
            .all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::HinBuilder;

    fn toy() -> Hin {
        HinBuilder::new()
            .node("p", "P")
            .node("a", "A")
            .node("s", "S")
            .edge("p", "a")
            .edge("p", "s")
            .build()
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let h = toy();
        let cfg = TrainConfig {
            dim: 128,
            seed: 4,
            ..Default::default()
        };
        let a = init_model(&h, &cfg).unwrap();
        let b = init_model(&h, &cfg).unwrap();
        assert_eq!(a, b);
        let bound = 0.5 * (128f64).sqrt() / 128.0;
        for v in h.nodes() {
            let norm: f64 = a.center_vec(v).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= bound);
        }
        assert!(a.pair_type.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn unit_ones_score_is_plain_dot() {
        let h = toy();
        let mut m = init_model(&h, &TrainConfig { dim: 3, ..Default::default() }).unwrap();
        let (p, a) = (h.node_id("p").unwrap(), h.node_id("a").unwrap());
        m.center_vec_mut(p).copy_from_slice(&[1.0, 0.0, 0.0]);
        m.context_vec_mut(a).copy_from_slice(&[1.0, 0.0, 0.0]);
        assert_eq!(m.pair_score(p, a), 1.0);
        let (ta, tp) = (h.type_id("A").unwrap(), h.type_id("P").unwrap());
        m.pair_type_vec_mut(ta, tp).fill(0.0);
        assert_eq!(m.pair_score(p, a), 0.0);
    }

    #[test]
    fn score_matches_summation_oracle() {
        let h = toy();
        let mut m = init_model(&h, &TrainConfig { dim: 3, ..Default::default() }).unwrap();
        let (p, s) = (h.node_id("p").unwrap(), h.node_id("s").unwrap());
        let (ts, tp) = (h.type_id("S").unwrap(), h.type_id("P").unwrap());
        let v = [0.3, -1.2, 2.5];
        let c = [-0.7, 0.4, 1.1];
        let w = [1.5, -0.25, 0.8];
        m.center_vec_mut(p).copy_from_slice(&v);
        m.context_vec_mut(s).copy_from_slice(&c);
        m.pair_type_vec_mut(ts, tp).copy_from_slice(&w);
        // 1.5*-0.7*0.3 + -0.25*0.4*-1.2 + 0.8*1.1*2.5
        let expected = -0.315 + 0.12 + 2.2;
        assert!((m.pair_score(p, s) - expected).abs() < 1e-12);
    }

    #[test]
    fn scaling_w_scales_score() {
        let h = toy();
        let mut m = init_model(&h, &TrainConfig { dim: 8, seed: 2, ..Default::default() }).unwrap();
        let (p, a) = (h.node_id("p").unwrap(), h.node_id("a").unwrap());
        let (ta, tp) = (h.type_id("A").unwrap(), h.type_id("P").unwrap());
        let before = m.pair_score(p, a);
        m.pair_type_vec_mut(ta, tp).iter_mut().for_each(|w| *w *= 2.5);
        assert!((m.pair_score(p, a) - 2.5 * before).abs() <= 1e-15 * before.abs().max(1.0));
    }

    #[test]
    fn config_rejects_zero_epochs() {
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(TrainConfig::default().validate().is_ok());
    }
}
