use crate::embedder::EmbeddingModel;
use crate::hin::NodeId;
use crate::sampler::PairSample;

/// `log σ(x)`, computed as `-softplus(-x)` without overflow.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// `(σ(x), log σ(x), log σ(-x))` from a single exponential.
#[inline]
fn sigmoid_terms(x: f64) -> (f64, f64, f64) {
    let e = (-x.abs()).exp();
    let l = e.ln_1p();
    if x >= 0.0 {
        (1.0 / (1.0 + e), -l, -x - l)
    } else {
        (e / (1.0 + e), x - l, -l)
    }
}

/// Dot product of `a * b * c` with four partial sums.
#[inline]
fn triple_dot(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let n = a.len();
    let (b, c) = (&b[..n], &c[..n]);
    let mut acc = [0.0f64; 4];
    let mut j = 0;
    while j + 4 <= n {
        for k in 0..4 {
            acc[k] += a[j + k] * b[j + k] * c[j + k];
        }
        j += 4;
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    while j < n {
        s += a[j] * b[j] * c[j];
        j += 1;
    }
    s
}

/// Row-sparse accumulator over a dense `rows x dim` tensor. Only rows touched
/// since the last `clear` hold storage.
#[derive(Clone, Debug)]
pub struct SparseRows {
    dim: usize,
    slot: Vec<u32>,
    rows: Vec<u32>,
    data: Vec<f64>,
}

const EMPTY: u32 = u32::MAX;

impl SparseRows {
    pub fn new(row_count: usize, dim: usize) -> Self {
        SparseRows {
            dim,
            slot: vec![EMPTY; row_count],
            rows: Vec::new(),
            data: Vec::new(),
        }
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let s = match self.slot[r] {
            EMPTY => {
                let s = self.rows.len() as u32;
                self.slot[r] = s;
                self.rows.push(r as u32);
                self.data.resize(self.data.len() + self.dim, 0.0);
                s
            }
            s => s,
        } as usize;
        &mut self.data[s * self.dim..(s + 1) * self.dim]
    }

    pub fn get(&self, r: usize) -> Option<&[f64]> {
        match self.slot[r] {
            EMPTY => None,
            s => Some(&self.data[s as usize * self.dim..(s as usize + 1) * self.dim]),
        }
    }

    /// Touched rows in first-touch order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.rows
            .iter()
            .zip(self.data.chunks_exact(self.dim.max(1)))
            .map(|(&r, g)| (r as usize, g))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn clear(&mut self) {
        for &r in &self.rows {
            self.slot[r as usize] = EMPTY;
        }
        self.rows.clear();
        self.data.clear();
    }

    pub fn add_from(&mut self, other: &SparseRows) {
        for (r, g) in other.iter() {
            for (a, b) in self.row_mut(r).iter_mut().zip(g) {
                *a += b;
            }
        }
    }
}

/// Gradients of the summed batch loss.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub center: SparseRows,
    pub context: SparseRows,
    /// Rows indexed `context_type * |T| + center_type`.
    pub pair_type: SparseRows,
}

impl Gradients {
    pub fn for_model(model: &EmbeddingModel) -> Self {
        let (n, t, d) = (model.node_count(), model.type_count(), model.dim());
        Gradients {
            center: SparseRows::new(n, d),
            context: SparseRows::new(n, d),
            pair_type: SparseRows::new(t * t, d),
        }
    }

    pub fn clear(&mut self) {
        self.center.clear();
        self.context.clear();
        self.pair_type.clear();
    }

    pub fn add_from(&mut self, other: &Gradients) {
        self.center.add_from(&other.center);
        self.context.add_from(&other.context);
        self.pair_type.add_from(&other.pair_type);
    }
}

/// A positive pair with its drawn negatives.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPair {
    pub pair: PairSample,
    pub negatives: Vec<NodeId>,
}

/// Adds the loss terms of one positive pair and its negatives to `grads`,
/// returning the loss. `scratch` must have length `dim`.
pub(crate) fn accumulate_pair(
    model: &EmbeddingModel,
    center: NodeId,
    context: NodeId,
    negatives: &[NodeId],
    grads: &mut Gradients,
    scratch: &mut [f64],
) -> f64 {
    let center_type = model.node_type(center);
    let v = model.center_vec(center);
    scratch.fill(0.0);
    let mut loss = 0.0;

    let mut term = |target: NodeId, positive: bool, scratch: &mut [f64]| {
        let row = model.pair_type_row(model.node_type(target), center_type);
        let w = model.pair_type_vec(model.node_type(target), center_type);
        let c = model.context_vec(target);
        let s = triple_dot(w, c, v);
        let (sig, log_pos, log_neg) = sigmoid_terms(s);
        // d(-log σ(s))/ds = σ(s) - 1 ; d(-log σ(-s))/ds = σ(s)
        let g = if positive {
            loss -= log_pos;
            sig - 1.0
        } else {
            loss -= log_neg;
            sig
        };
        let gc = grads.context.row_mut(target.index());
        for (((sc, gc), (&w, &c)), &v) in scratch.iter_mut().zip(gc).zip(w.iter().zip(c)).zip(v) {
            *sc += g * w * c;
            *gc += g * w * v;
        }
        let gw = grads.pair_type.row_mut(row);
        for ((gw, &c), &v) in gw.iter_mut().zip(c).zip(v) {
            *gw += g * c * v;
        }
    };

    term(context, true, scratch);
    for &n in negatives {
        term(n, false, scratch);
    }
    let gv = grads.center.row_mut(center.index());
    for (a, b) in gv.iter_mut().zip(scratch.iter()) {
        *a += b;
    }
    loss
}

/// Summed loss over the batch and its gradients with respect to center
/// vectors, context vectors (positives and negatives) and the touched `W`
/// rows.
pub fn loss_and_grad(model: &EmbeddingModel, batch: &[TrainingPair]) -> (f64, Gradients) {
    let mut grads = Gradients::for_model(model);
    let mut scratch = vec![0.0; model.dim()];
    let loss = batch
        .iter()
        .map(|tp| {
            accumulate_pair(
                model,
                tp.pair.center,
                tp.pair.context,
                &tp.negatives,
                &mut grads,
                &mut scratch,
            )
        })
        .sum();
    (loss, grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedder::{init_model, TrainConfig};
    use crate::hin::{Hin, HinBuilder};

    fn toy() -> Hin {
        HinBuilder::new()
            .node("p1", "P")
            .node("p2", "P")
            .node("a1", "A")
            .node("a2", "A")
            .edge("p1", "a1")
            .edge("p2", "a2")
            .build()
    }

    #[test]
    fn triple_dot_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.3 - 1.0).collect();
        let b: Vec<f64> = (0..11).map(|i| (i as f64).sin()).collect();
        let c: Vec<f64> = (0..11).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = (0..11).map(|i| a[i] * b[i] * c[i]).sum();
        assert!((triple_dot(&a, &b, &c) - naive).abs() < 1e-14);
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!((log_sigmoid(0.0) + std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(log_sigmoid(800.0), 0.0);
        assert!((log_sigmoid(-800.0) + 800.0).abs() < 1e-9);
        assert!(sigmoid_terms(-800.0).0.abs() < 1e-300);
        assert_eq!(sigmoid_terms(800.0).0, 1.0);
        for x in [-30.0, -2.5, -1e-3, 0.0, 0.7, 12.0] {
            let (sig, lp, ln) = sigmoid_terms(x);
            assert!((sig - 1.0 / (1.0 + (-x).exp())).abs() < 1e-15);
            assert!((lp - log_sigmoid(x)).abs() < 1e-14);
            assert!((ln - log_sigmoid(-x)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_scores_give_log2_per_term() {
        let h = toy();
        let mut m = init_model(&h, &TrainConfig { dim: 4, ..Default::default() }).unwrap();
        m.center.fill(0.0);
        let ids = |n: &str| h.node_id(n).unwrap();
        let batch: Vec<TrainingPair> = [("p1", "a1"), ("p2", "a2"), ("a1", "p1")]
            .iter()
            .map(|(v, c)| TrainingPair {
                pair: PairSample::new(ids(v), ids(c)),
                negatives: vec![ids(c); 2],
            })
            .collect();
        let (loss, _) = loss_and_grad(&m, &batch);
        let expected = 3.0 * 3.0 * std::f64::consts::LN_2;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn sparse_rows_accumulate_and_clear() {
        let mut s = SparseRows::new(5, 2);
        s.row_mut(3)[0] += 1.0;
        s.row_mut(1)[1] += 2.0;
        s.row_mut(3)[1] += 4.0;
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(3), Some(&[1.0, 4.0][..]));
        let mut t = SparseRows::new(5, 2);
        t.row_mut(1)[1] = 1.0;
        t.add_from(&s);
        assert_eq!(t.get(1), Some(&[0.0, 3.0][..]));
        s.clear();
        assert!(s.get(3).is_none() && s.is_empty());
    }
}
