use rand::Rng;

use crate::rng::{self, domain};

pub const RESTARTS: usize = 10;
pub const MAX_ITERATIONS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    centroids
        .chunks_exact(dim)
        .map(|c| sq_dist(point, c))
        .enumerate()
        .fold((0, f64::INFINITY), |best, (k, d)| if d < best.1 { (k, d) } else { best })
}

/// k-means++ seeding: the first centroid uniformly, the rest with probability
/// proportional to squared distance to the nearest chosen centroid.
fn seed_centroids<R: Rng + ?Sized>(x: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = x.len() / dim;
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(&x[first * dim..(first + 1) * dim]);
    let mut d2: Vec<f64> = x
        .chunks_exact(dim)
        .map(|p| sq_dist(p, &centroids[..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let start = centroids.len();
        centroids.extend_from_slice(&x[pick * dim..(pick + 1) * dim]);
        for (p, d) in x.chunks_exact(dim).zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &centroids[start..start + dim]));
        }
    }
    centroids
}

fn lloyd(x: &[f64], dim: usize, k: usize, mut centroids: Vec<f64>) -> Clustering {
    let n = x.len() / dim;
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, p) in x.chunks_exact(dim).enumerate() {
            let (c, _) = nearest(p, &centroids, dim);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (p, &c) in x.chunks_exact(dim).zip(&assignment) {
            counts[c] += 1;
            sums[c * dim..(c + 1) * dim]
                .iter_mut()
                .zip(p)
                .for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..dim {
                    centroids[c * dim + j] = sums[c * dim + j] / counts[c] as f64;
                }
            } else {
                // Empty cluster: move it to the point farthest from its centroid.
                let far = x
                    .chunks_exact(dim)
                    .zip(&assignment)
                    .map(|(p, &a)| sq_dist(p, &centroids[a * dim..(a + 1) * dim]))
                    .enumerate()
                    .fold((0, -1.0), |b, (i, d)| if d > b.1 { (i, d) } else { b })
                    .0;
                centroids[c * dim..(c + 1) * dim].copy_from_slice(&x[far * dim..(far + 1) * dim]);
                assignment[far] = c;
            }
        }
    }
    let inertia = x
        .chunks_exact(dim)
        .zip(&assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c * dim..(c + 1) * dim]))
        .sum();
    Clustering {
        assignment,
        inertia,
    }
}

/// Best-inertia clustering over [`RESTARTS`] seeded k-means++ runs. `x` is
/// row-major with `dim` columns and at least `k` rows.
pub fn kmeans(x: &[f64], dim: usize, k: usize, seed: u64) -> Clustering {
    let n = x.len() / dim;
    assert!(k >= 1 && n >= k, "need at least k points");
    (0..RESTARTS)
        .map(|r| {
            let mut rng = rng::stream(seed, &[domain::KMEANS, r as u64]);
            let init = seed_centroids(x, dim, k, &mut rng);
            lloyd(x, dim, k, init)
        })
        .fold(None, |best: Option<Clustering>, c| match best {
            Some(b) if b.inertia <= c.inertia => Some(b),
            _ => Some(c),
        })
        .expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_three_blobs() {
        let mut x = Vec::new();
        for c in 0..3 {
            for i in 0..20 {
                x.push(c as f64 * 10.0 + (i % 5) as f64 * 0.1);
                x.push(-(c as f64) * 10.0 + (i % 3) as f64 * 0.1);
            }
        }
        let res = kmeans(&x, 2, 3, 1);
        for c in 0..3 {
            let block = &res.assignment[c * 20..(c + 1) * 20];
            assert!(block.iter().all(|&a| a == block[0]));
        }
        assert_ne!(res.assignment[0], res.assignment[20]);
        assert_ne!(res.assignment[20], res.assignment[40]);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let x = [0.0, 1.0, 5.0];
        let res = kmeans(&x, 1, 3, 0);
        assert_eq!(res.inertia, 0.0);
    }
}
