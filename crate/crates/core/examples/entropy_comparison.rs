//! Compare pair entropy and self-pair share of coarsened short walks with a
//! window baseline at the same corpus size.
//!
//! cargo run --release --example entropy_comparison -- [seed]

use hin_embed::coarsener::{removable_types, run_pipeline, CoarsenConfig};
use hin_embed::diagnostics::{matched_comparison, WindowBaseline};
use hin_embed::synth::{generate, SynthConfig};

fn main() -> hin_embed::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    let g = generate(&SynthConfig::star_heavy(seed))?;
    let cfg = CoarsenConfig {
        cutoff: 0.3,
        rounds: 3,
        removable_types: removable_types(&g.hin, &["P".into(), "S".into()])?,
        attenuation: 0.5,
    };
    let corpus = run_pipeline(&g.hin, &cfg, 200.0 * g.hin.node_count() as f64, 5, seed)?.into_corpus();
    let report = matched_comparison(&g.hin, &corpus.pair_ids(), &WindowBaseline::default(), seed)?;
    print!("{}", report.to_table());
    Ok(())
}
