//! Train the typed skip-gram on a sampled corpus and write the embeddings.
//!
//! cargo run --release --example train_embeddings -- [out.txt]

use hin_embed::coarsener::{removable_types, run_pipeline, CoarsenConfig};
use hin_embed::embedder::{export_embeddings, fit, TrainConfig};
use hin_embed::hin::TypeId;
use hin_embed::synth::{generate, SynthConfig};

fn main() -> hin_embed::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "embeddings.txt".into());
    let g = generate(&SynthConfig::default())?;
    let cfg = CoarsenConfig {
        cutoff: 0.3,
        rounds: 3,
        removable_types: removable_types(&g.hin, &["P".into(), "S".into()])?,
        attenuation: 0.5,
    };
    let corpus = run_pipeline(&g.hin, &cfg, 50.0 * g.hin.node_count() as f64, 5, 0)?.into_corpus();
    let train = TrainConfig { dim: 16, epochs: 5, ..TrainConfig::default() };
    let (model, report) = fit(&g.hin, &corpus, &train)?;
    print!("{}", report.loss_csv());

    // Mean of each learned pair-type vector; all-ones at the start.
    let types = g.hin.type_count() as u32;
    for c in (0..types).map(TypeId) {
        for v in (0..types).map(TypeId) {
            let w = model.pair_type_vec(c, v);
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            println!("W[{}][{}] mean {mean:.4}", g.hin.type_name(c), g.hin.type_name(v));
        }
    }
    export_embeddings(&model, g.hin.symbols(), std::path::Path::new(&out))?;
    println!("wrote {out}");
    Ok(())
}
