use crate::embedder::loss::{Gradients, SparseRows};
use crate::embedder::{EmbeddingModel, TrainConfig};

/// First and second moment estimates for every parameter, plus the global
/// step count used for bias correction.
///
/// Updates are lazy: a row's moments only move on steps where the row has a
/// gradient, the usual treatment for sparse embedding lookups.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    m_center: Vec<f64>,
    v_center: Vec<f64>,
    m_context: Vec<f64>,
    v_context: Vec<f64>,
    m_pair_type: Vec<f64>,
    v_pair_type: Vec<f64>,
    step: u64,
}

struct Hyper {
    lr_t: f64,
    beta1: f64,
    beta2: f64,
    eps_t: f64,
}

impl AdamState {
    pub fn new(center: usize, context: usize, pair_type: usize) -> Self {
        AdamState {
            m_center: vec![0.0; center],
            v_center: vec![0.0; center],
            m_context: vec![0.0; context],
            v_context: vec![0.0; context],
            m_pair_type: vec![0.0; pair_type],
            v_pair_type: vec![0.0; pair_type],
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// Returns whether every updated parameter is finite.
fn update_rows(params: &mut [f64], m: &mut [f64], v: &mut [f64], grads: &SparseRows, h: &Hyper) -> bool {
    let mut finite = true;
    for (row, g) in grads.iter() {
        let d = g.len();
        let range = row * d..(row + 1) * d;
        let (p, m, v) = (&mut params[range.clone()], &mut m[range.clone()], &mut v[range]);
        for (((p, m), v), &g) in p.iter_mut().zip(m.iter_mut()).zip(v.iter_mut()).zip(g) {
            *m = h.beta1 * *m + (1.0 - h.beta1) * g;
            *v = h.beta2 * *v + (1.0 - h.beta2) * g * g;
            *p -= h.lr_t * *m / (v.sqrt() + h.eps_t);
            finite &= p.is_finite();
        }
    }
    finite
}

/// Applies one Adam step to every row touched in `grads`. Returns whether
/// the updated parameters are all finite.
pub(crate) fn apply(model: &mut EmbeddingModel, grads: &Gradients, cfg: &TrainConfig) -> bool {
    let adam = &mut model.adam;
    adam.step += 1;
    let t = adam.step as i32;
    let bc1 = 1.0 - cfg.adam_beta1.powi(t);
    let bc2 = 1.0 - cfg.adam_beta2.powi(t);
    // lr * m̂ / (sqrt(v̂) + eps) rewritten on the raw moments.
    let h = Hyper {
        lr_t: cfg.learning_rate * bc2.sqrt() / bc1,
        beta1: cfg.adam_beta1,
        beta2: cfg.adam_beta2,
        eps_t: cfg.adam_epsilon * bc2.sqrt(),
    };
    let mut finite = update_rows(
        &mut model.center,
        &mut adam.m_center,
        &mut adam.v_center,
        &grads.center,
        &h,
    );
    finite &= update_rows(
        &mut model.context,
        &mut adam.m_context,
        &mut adam.v_context,
        &grads.context,
        &h,
    );
    if cfg.train_pair_type {
        finite &= update_rows(
            &mut model.pair_type,
            &mut adam.m_pair_type,
            &mut adam.v_pair_type,
            &grads.pair_type,
            &h,
        );
    }
    finite
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        // With bias correction the first Adam step is lr * sign(g) (up to eps).
        let mut params = vec![1.0, 1.0, 1.0, 1.0];
        let mut m = vec![0.0; 4];
        let mut v = vec![0.0; 4];
        let mut g = SparseRows::new(2, 2);
        g.row_mut(1).copy_from_slice(&[0.5, -3.0]);
        let (b1, b2, lr, eps) = (0.9f64, 0.999f64, 0.01, 1e-8);
        let h = Hyper {
            lr_t: lr * (1.0 - b2).sqrt() / (1.0 - b1),
            beta1: b1,
            beta2: b2,
            eps_t: eps * (1.0 - b2).sqrt(),
        };
        update_rows(&mut params, &mut m, &mut v, &g, &h);
        assert_eq!(&params[..2], &[1.0, 1.0]);
        assert!((params[2] - (1.0 - lr)).abs() < 1e-9);
        assert!((params[3] - (1.0 + lr)).abs() < 1e-9);
    }
}
