//! Downstream evaluation: node classification scored by macro/micro F1 and
//! community detection scored by NMI.

pub mod kmeans;
pub mod logistic;
pub mod metrics;

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::embedder::{EmbeddingModel, Embeddings};
use crate::error::{Error, Result};
use crate::hin::{Hin, LabelSet};
use crate::rng::{self, domain};

pub use kmeans::{kmeans, Clustering};
pub use logistic::OneVsRest;
pub use metrics::{f1_scores, nmi};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            repeats: 10,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }
}

/// Mean and population standard deviation over trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Summary {
            mean,
            std: var.sqrt(),
        }
    }
}

/// Feature rows of the labeled nodes with their classes.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData {
    pub dim: usize,
    /// Row-major, one row per labeled node.
    pub x: Vec<f64>,
    pub y: Vec<usize>,
    pub class_count: usize,
}

impl LabeledData {
    pub fn new(dim: usize, x: Vec<f64>, y: Vec<usize>, class_count: usize) -> Self {
        assert_eq!(x.len(), y.len() * dim);
        LabeledData {
            dim,
            x,
            y,
            class_count,
        }
    }

    pub fn from_embeddings(emb: &Embeddings, hin: &Hin, labels: &LabelSet) -> Result<Self> {
        let mut x = Vec::with_capacity(labels.len() * emb.dim());
        let mut y = Vec::with_capacity(labels.len());
        for (v, c) in labels.iter() {
            let name = hin.node_name(v);
            let row = emb.get(name).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "labeled node `{name}` has no embedding; embedding file and labels do not match"
                ))
            })?;
            x.extend_from_slice(row);
            y.push(c);
        }
        Ok(LabeledData::new(emb.dim(), x, y, labels.class_count()))
    }

    pub fn from_model(model: &EmbeddingModel, labels: &LabelSet) -> Self {
        let mut x = Vec::with_capacity(labels.len() * model.dim());
        let mut y = Vec::with_capacity(labels.len());
        for (v, c) in labels.iter() {
            x.extend_from_slice(model.center_vec(v));
            y.push(c);
        }
        LabeledData::new(model.dim(), x, y, labels.class_count())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn rows(&self, idx: &[usize]) -> (Vec<f64>, Vec<usize>) {
        let mut x = Vec::with_capacity(idx.len() * self.dim);
        let mut y = Vec::with_capacity(idx.len());
        for &i in idx {
            x.extend_from_slice(&self.x[i * self.dim..(i + 1) * self.dim]);
            y.push(self.y[i]);
        }
        (x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassificationScores {
    pub macro_f1: Summary,
    pub micro_f1: Summary,
}

const MAX_SPLIT_ATTEMPTS: usize = 100;

/// One-vs-rest logistic regression over `repeats` random train/test splits.
/// A split missing some class on the training side is redrawn.
pub fn classify(data: &LabeledData, split: &SplitSpec) -> Result<ClassificationScores> {
    split.validate()?;
    let mut present: Vec<usize> = data.y.clone();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::InvalidInput(
            "classification needs at least two classes".into(),
        ));
    }
    let n = data.len();
    let n_train = ((split.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut macros = Vec::with_capacity(split.repeats);
    let mut micros = Vec::with_capacity(split.repeats);
    for trial in 0..split.repeats {
        let mut idx: Vec<usize> = (0..n).collect();
        let mut attempt = 0;
        loop {
            idx.sort_unstable();
            let mut rng =
                rng::stream(split.seed, &[domain::SPLIT, trial as u64, attempt as u64]);
            idx.shuffle(&mut rng);
            let mut seen: Vec<usize> = idx[..n_train].iter().map(|&i| data.y[i]).collect();
            seen.sort_unstable();
            seen.dedup();
            if seen == present {
                break;
            }
            attempt += 1;
            if attempt == MAX_SPLIT_ATTEMPTS {
                return Err(Error::InvalidInput(format!(
                    "no split in {MAX_SPLIT_ATTEMPTS} attempts puts every class in the training side"
                )));
            }
            log::warn!("trial {trial}: a class is missing from the training split; resampling");
        }
        let (xtr, ytr) = data.rows(&idx[..n_train]);
        let (xte, yte) = data.rows(&idx[n_train..]);
        let model = OneVsRest::fit(&xtr, &ytr, data.dim, data.class_count);
        let pred = model.predict(&xte);
        let (ma, mi) = f1_scores(&yte, &pred, data.class_count);
        macros.push(ma);
        micros.push(mi);
    }
    Ok(ClassificationScores {
        macro_f1: Summary::of(&macros),
        micro_f1: Summary::of(&micros),
    })
}

/// k-means with `k = class_count` over the labeled rows, scored by NMI against
/// the labels, averaged over `repeats` seeds.
pub fn cluster(data: &LabeledData, repeats: usize, seed: u64) -> Result<Summary> {
    let k = data.class_count;
    if k < 2 {
        return Err(Error::InvalidInput("clustering needs at least two classes".into()));
    }
    if data.len() < k {
        return Err(Error::InvalidInput(format!(
            "{} labeled nodes cannot form {k} clusters",
            data.len()
        )));
    }
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let scores: Vec<f64> = (0..repeats)
        .map(|r| {
            let c = kmeans(&data.x, data.dim, k, rng::derive_seed(seed, &[r as u64]));
            nmi(&c.assignment, &data.y)
        })
        .collect::<Result<_>>()?;
    Ok(Summary::of(&scores))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub macro_f1: Option<Summary>,
    pub micro_f1: Option<Summary>,
    pub nmi: Option<Summary>,
}

impl EvalReport {
    fn entries(&self) -> Vec<(&'static str, Summary)> {
        [
            ("macro_f1", self.macro_f1),
            ("micro_f1", self.micro_f1),
            ("nmi", self.nmi),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mean,std\n");
        for (k, s) in self.entries() {
            let _ = writeln!(out, "{k},{},{}", s.mean, s.std);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<10} {:>8} {:>8}\n", "metric", "mean", "std");
        for (k, s) in self.entries() {
            let _ = writeln!(out, "{k:<10} {:>8.4} {:>8.4}", s.mean, s.std);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(k: usize, per: usize, sigma: f64, seed: u64) -> LabeledData {
        use rand::Rng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rng::stream(seed, &[]);
        let noise = Normal::new(0.0, sigma).unwrap();
        let dim = 4;
        let centers: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..k * per {
            let c = i % k;
            for m in &centers[c] {
                x.push(m + noise.sample(&mut rng));
            }
            y.push(c);
        }
        LabeledData::new(dim, x, y, k)
    }

    #[test]
    fn separable_classes_score_perfectly() {
        let data = LabeledData::new(1, vec![-3.0, -2.0, -2.5, 2.0, 3.0, 2.5, -2.2, 2.2, -2.8, 2.7], vec![0, 0, 0, 1, 1, 1, 0, 1, 0, 1], 2);
        let s = classify(&data, &SplitSpec { repeats: 3, ..Default::default() }).unwrap();
        assert_eq!(s.macro_f1.mean, 1.0);
        assert_eq!(s.micro_f1.mean, 1.0);
    }

    #[test]
    fn gaussian_clusters_are_classified() {
        let data = blobs(4, 50, 0.3, 5);
        let s = classify(&data, &SplitSpec::default()).unwrap();
        assert!(s.macro_f1.mean >= 0.95, "{:?}", s);
        let nmi = cluster(&data, 3, 1).unwrap();
        assert!(nmi.mean > 0.9, "{nmi:?}");
    }

    #[test]
    fn cluster_needs_enough_nodes() {
        let data = LabeledData::new(1, vec![0.0, 1.0], vec![0, 1], 3);
        assert!(cluster(&data, 1, 0).is_err());
    }

    #[test]
    fn one_class_is_rejected() {
        let data = LabeledData::new(1, vec![0.0, 1.0, 2.0], vec![0, 0, 0], 1);
        assert!(classify(&data, &SplitSpec::default()).is_err());
    }

    #[test]
    fn report_formats() {
        let r = EvalReport {
            macro_f1: Some(Summary { mean: 0.9, std: 0.01 }),
            micro_f1: None,
            nmi: Some(Summary { mean: 0.5, std: 0.0 }),
        };
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("nmi,0.5,0"));
    }
}
