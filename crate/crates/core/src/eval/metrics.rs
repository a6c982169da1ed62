use std::collections::HashMap;

use crate::error::{Error, Result};

/// Standard multi-class F1 scores: macro is the unweighted mean of per-class
/// F1 over classes present in `truth` or `pred`; micro pools true positives,
/// false positives and false negatives over all classes.
pub fn f1_scores(truth: &[usize], pred: &[usize], class_count: usize) -> (f64, f64) {
    assert_eq!(truth.len(), pred.len());
    let mut tp = vec![0u64; class_count];
    let mut fp = vec![0u64; class_count];
    let mut fn_ = vec![0u64; class_count];
    for (&t, &p) in truth.iter().zip(pred) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let f1 = |tp: u64, fp: u64, fn_: u64| {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let present: Vec<usize> = (0..class_count)
        .filter(|&c| tp[c] + fp[c] + fn_[c] > 0)
        .collect();
    let macro_f1 = if present.is_empty() {
        0.0
    } else {
        present.iter().map(|&c| f1(tp[c], fp[c], fn_[c])).sum::<f64>() / present.len() as f64
    };
    let micro_f1 = f1(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum());
    (macro_f1, micro_f1)
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    -counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Normalized mutual information with the arithmetic-mean normalization
/// `I(a; b) / ((H(a) + H(b)) / 2)`. Two single-cluster partitions score 1.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "partition lengths differ: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InvalidInput("NMI of empty partitions".into()));
    }
    let n = pred.len() as f64;
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut a: HashMap<usize, u64> = HashMap::new();
    let mut b: HashMap<usize, u64> = HashMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *joint.entry((p, t)).or_default() += 1;
        *a.entry(p).or_default() += 1;
        *b.entry(t).or_default() += 1;
    }
    let ha = entropy(a.values().copied(), n);
    let hb = entropy(b.values().copied(), n);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    let mut cells: Vec<(&(usize, usize), &u64)> = joint.iter().collect();
    cells.sort_unstable();
    let mi: f64 = cells
        .into_iter()
        .map(|(&(p, t), &c)| {
            let c = c as f64;
            (c / n) * (n * c / (a[&p] as f64 * b[&t] as f64)).ln()
        })
        .sum();
    Ok((mi / ((ha + hb) / 2.0)).clamp(0.0, 1.0))
}
