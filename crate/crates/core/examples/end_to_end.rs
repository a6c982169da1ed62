//! Generate a planted-partition graph, sample with coarsening, train, and
//! score the embeddings against the planted communities.
//!
//! cargo run --release --example end_to_end -- [seed] [epochs]

use std::time::Instant;

use hin_embed::coarsener::{removable_types, run_pipeline, CoarsenConfig};
use hin_embed::embedder::{fit, TrainConfig};
use hin_embed::eval::{classify, cluster, LabeledData, SplitSpec};
use hin_embed::synth::{generate, SynthConfig};

fn main() -> hin_embed::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let epochs: usize = args.next().map_or(20, |s| s.parse().expect("epochs"));

    let g = generate(&SynthConfig { seed, ..SynthConfig::default() })?;
    println!("graph: {} nodes, {} edges", g.hin.node_count(), g.hin.edge_count());

    let cfg = CoarsenConfig {
        cutoff: 0.3,
        rounds: 3,
        removable_types: removable_types(&g.hin, &["P".into(), "S".into()])?,
        attenuation: 0.5,
    };
    let t = Instant::now();
    let q0 = 200.0 * g.hin.node_count() as f64;
    let corpus = run_pipeline(&g.hin, &cfg, q0, 5, seed)?.into_corpus();
    println!("sampled {} pairs in {:.2?}", corpus.len(), t.elapsed());

    let train = TrainConfig {
        dim: 32,
        epochs,
        seed,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..TrainConfig::default()
    };
    let t = Instant::now();
    let (model, report) = fit(&g.hin, &corpus, &train)?;
    println!("trained {epochs} epochs in {:.2?}", t.elapsed());
    for (i, l) in report.epoch_losses.iter().enumerate() {
        println!("  epoch {:>2}: {l:.5}", i + 1);
    }

    let data = LabeledData::from_model(&model, &g.labels);
    let scores = classify(&data, &SplitSpec { seed, ..SplitSpec::default() })?;
    let nmi = cluster(&data, 5, seed)?;
    println!(
        "macro-F1 {:.4}  micro-F1 {:.4}  NMI {:.4}",
        scores.macro_f1.mean, scores.micro_f1.mean, nmi.mean
    );
    Ok(())
}
