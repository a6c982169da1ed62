use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::embedder::loss::{accumulate_pair, Gradients};
use crate::embedder::{adam, init_model, EmbeddingModel, NegativeTable, TrainConfig};
use crate::error::{Error, Result};
use crate::hin::{Hin, NodeId};
use crate::rng::{self, domain};
use crate::sampler::{PairSample, SampleSet};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean loss per positive pair (including its negatives), one per epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: u64,
}

impl TrainReport {
    /// `epoch,mean_loss` lines with a header, epochs numbered from 1.
    pub fn loss_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss\n");
        for (i, l) in self.epoch_losses.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, l));
        }
        out
    }
}

struct Shard {
    grads: Gradients,
    scratch: Vec<f64>,
    loss: f64,
}

fn shard_pass(
    model: &EmbeddingModel,
    pairs: &[PairSample],
    negatives: &[NodeId],
    neg: usize,
    shard: &mut Shard,
) {
    shard.grads.clear();
    shard.loss = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        shard.loss += accumulate_pair(
            model,
            p.center,
            p.context,
            &negatives[i * neg..(i + 1) * neg],
            &mut shard.grads,
            &mut shard.scratch,
        );
    }
}

/// Minimizes the typed negative-sampling loss with Adam.
///
/// Each epoch visits the corpus in a fresh seeded permutation. Negatives for a
/// batch are drawn from a stream keyed by `(seed, epoch, batch)`. With
/// `workers > 1` the batch is split into contiguous shards whose gradients are
/// computed in parallel and summed in shard order before the update.
pub fn train(
    model: &mut EmbeddingModel,
    corpus: &SampleSet,
    table: &NegativeTable,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidInput("cannot train on an empty corpus".into()));
    }
    if model.dim() != cfg.dim {
        return Err(Error::Config(format!(
            "model dimension {} differs from configured {}",
            model.dim(),
            cfg.dim
        )));
    }
    let mut context_types: Vec<_> = corpus.pairs.iter().map(|p| model.node_type(p.context)).collect();
    context_types.sort_unstable();
    context_types.dedup();
    table.check_types(context_types)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let mut shards: Vec<Shard> = (0..cfg.workers)
        .map(|_| Shard {
            grads: Gradients::for_model(model),
            scratch: vec![0.0; cfg.dim],
            loss: 0.0,
        })
        .collect();

    let neg = cfg.negatives;
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut batch_pairs: Vec<PairSample> = Vec::with_capacity(cfg.batch_size);
    let mut negatives: Vec<NodeId> = Vec::with_capacity(cfg.batch_size * neg);
    let mut report = TrainReport::default();

    for epoch in 0..cfg.epochs {
        order.iter_mut().enumerate().for_each(|(i, o)| *o = i);
        order.shuffle(&mut rng::stream(cfg.seed, &[domain::SHUFFLE, epoch as u64]));
        let mut epoch_loss = 0.0;
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let mut rng = rng::stream(cfg.seed, &[domain::NEGATIVE, epoch as u64, b as u64]);
            batch_pairs.clear();
            negatives.clear();
            for &i in idx {
                let p = corpus.pairs[i];
                batch_pairs.push(p);
                table.draw_into(model.node_type(p.context), neg, p.context, &mut rng, &mut negatives)?;
            }

            if cfg.workers == 1 {
                shard_pass(model, &batch_pairs, &negatives, neg, &mut shards[0]);
            } else {
                let per = batch_pairs.len().div_ceil(cfg.workers);
                let m: &EmbeddingModel = model;
                let (bp, ng) = (&batch_pairs, &negatives);
                pool.install(|| {
                    shards.par_iter_mut().enumerate().for_each(|(s, shard)| {
                        let lo = (s * per).min(bp.len());
                        let hi = ((s + 1) * per).min(bp.len());
                        shard_pass(m, &bp[lo..hi], &ng[lo * neg..hi * neg], neg, shard);
                    });
                });
                let (first, rest) = shards.split_first_mut().expect("at least one worker");
                for s in rest.iter() {
                    first.grads.add_from(&s.grads);
                    first.loss += s.loss;
                }
            }

            let step = model.adam.step() + 1;
            let loss = shards[0].loss;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    step,
                    what: format!("loss in epoch {} batch {b}", epoch + 1),
                });
            }
            epoch_loss += loss;
            let grads = &shards[0].grads;
            if !adam::apply(model, grads, cfg) {
                return Err(Error::NonFinite {
                    step,
                    what: format!("parameter after epoch {} batch {b}", epoch + 1),
                });
            }
        }
        let mean = epoch_loss / corpus.len() as f64;
        log::info!("epoch {}: mean loss {mean:.6}", epoch + 1);
        report.epoch_losses.push(mean);
    }
    report.steps = model.adam.step();
    Ok(report)
}

/// Initializes a model, builds the negative tables from `corpus` and trains.
pub fn fit(hin: &Hin, corpus: &SampleSet, cfg: &TrainConfig) -> Result<(EmbeddingModel, TrainReport)> {
    let mut model = init_model(hin, cfg)?;
    let table = NegativeTable::from_corpus(hin, corpus, cfg.negative_exponent);
    let report = train(&mut model, corpus, &table, cfg)?;
    Ok((model, report))
}
