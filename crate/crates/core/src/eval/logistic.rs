//! One-vs-rest L2-regularized logistic regression fitted by full-batch
//! gradient descent with backtracking line search. Features are standardized
//! with training-set statistics.

use crate::embedder::log_sigmoid;

pub const L2_PENALTY: f64 = 1e-4;
pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;

#[derive(Clone, Debug)]
pub struct OneVsRest {
    dim: usize,
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// One `(weights, bias)` per class.
    models: Vec<(Vec<f64>, f64)>,
}

fn objective(x: &[f64], y: &[bool], dim: usize, w: &[f64], b: f64) -> f64 {
    let n = y.len() as f64;
    let data: f64 = x
        .chunks_exact(dim)
        .zip(y)
        .map(|(row, &pos)| {
            let z = dot(row, w) + b;
            if pos {
                -log_sigmoid(z)
            } else {
                -log_sigmoid(-z)
            }
        })
        .sum();
    data / n + 0.5 * L2_PENALTY * dot(w, w)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    log_sigmoid(z).exp()
}

fn fit_binary(x: &[f64], y: &[bool], dim: usize) -> (Vec<f64>, f64) {
    let n = y.len() as f64;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut loss = objective(x, y, dim, &w, b);
    let mut step = 1.0;
    let mut gw = vec![0.0; dim];
    for _ in 0..MAX_ITERATIONS {
        gw.iter_mut().zip(&w).for_each(|(g, w)| *g = L2_PENALTY * w);
        let mut gb = 0.0;
        for (row, &pos) in x.chunks_exact(dim).zip(y) {
            let r = (sigmoid(dot(row, &w) + b) - if pos { 1.0 } else { 0.0 }) / n;
            gb += r;
            gw.iter_mut().zip(row).for_each(|(g, xi)| *g += r * xi);
        }
        let gnorm2 = dot(&gw, &gw) + gb * gb;
        if gnorm2.sqrt() < TOLERANCE {
            break;
        }
        // Armijo backtracking.
        let mut accepted = None;
        for _ in 0..50 {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(w, g)| w - step * g).collect();
            let cand_b = b - step * gb;
            let cand_loss = objective(x, y, dim, &cand_w, cand_b);
            if cand_loss <= loss - 0.5 * step * gnorm2 {
                accepted = Some((cand_w, cand_b, cand_loss));
                break;
            }
            step *= 0.5;
        }
        let Some((nw, nb, nl)) = accepted else { break };
        let improvement = loss - nl;
        w = nw;
        b = nb;
        loss = nl;
        step *= 2.0;
        if improvement < TOLERANCE {
            break;
        }
    }
    (w, b)
}

impl OneVsRest {
    /// `x` is row-major `y.len() x dim`; classes are `0..class_count`.
    pub fn fit(x: &[f64], y: &[usize], dim: usize, class_count: usize) -> Self {
        let n = y.len();
        assert_eq!(x.len(), n * dim);
        let mut mean = vec![0.0; dim];
        for row in x.chunks_exact(dim) {
            mean.iter_mut().zip(row).for_each(|(m, v)| *m += v / n as f64);
        }
        let mut scale = vec![0.0; dim];
        for row in x.chunks_exact(dim) {
            scale
                .iter_mut()
                .zip(row.iter().zip(&mean))
                .for_each(|(s, (v, m))| *s += (v - m) * (v - m) / n as f64);
        }
        scale.iter_mut().for_each(|s| {
            *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
        });
        let z = standardize(x, dim, &mean, &scale);
        let models = (0..class_count)
            .map(|c| {
                let target: Vec<bool> = y.iter().map(|&k| k == c).collect();
                fit_binary(&z, &target, dim)
            })
            .collect();
        OneVsRest {
            dim,
            mean,
            scale,
            models,
        }
    }

    /// Most probable class per row.
    pub fn predict(&self, x: &[f64]) -> Vec<usize> {
        let z = standardize(x, self.dim, &self.mean, &self.scale);
        z.chunks_exact(self.dim)
            .map(|row| {
                self.models
                    .iter()
                    .map(|(w, b)| dot(row, w) + b)
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (c, s)| {
                        if s > best.1 {
                            (c, s)
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect()
    }
}

fn standardize(x: &[f64], dim: usize, mean: &[f64], scale: &[f64]) -> Vec<f64> {
    let mut z = x.to_vec();
    for row in z.chunks_exact_mut(dim) {
        for j in 0..dim {
            row[j] = (row[j] - mean[j]) / scale[j];
        }
    }
    z
}
