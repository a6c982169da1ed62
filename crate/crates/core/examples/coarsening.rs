//! Sampling rounds with coarsening in between, round by round.
//!
//! cargo run --release --example coarsening -- [cutoff] [rounds]

use hin_embed::coarsener::{removable_types, run_pipeline, CoarsenConfig};
use hin_embed::diagnostics::sample_entropy;
use hin_embed::synth::{generate, SynthConfig};

fn main() -> hin_embed::Result<()> {
    let mut args = std::env::args().skip(1);
    let cutoff: f64 = args.next().map_or(0.3, |s| s.parse().expect("cutoff"));
    let rounds: usize = args.next().map_or(3, |s| s.parse().expect("rounds"));

    let g = generate(&SynthConfig::star_heavy(0))?;
    let cfg = CoarsenConfig {
        cutoff,
        rounds,
        removable_types: removable_types(&g.hin, &["P".into(), "S".into()])?,
        attenuation: 0.5,
    };
    let run = run_pipeline(&g.hin, &cfg, 50.0 * g.hin.node_count() as f64, 5, 0)?;
    println!("{:>5} {:>10} {:>8} {:>8} {:>9} {:>9} {:>8}", "round", "budget", "edges", "removed", "pairs", "skipped", "entropy");
    for r in &run.rounds {
        println!(
            "{:>5} {:>10.0} {:>8} {:>8} {:>9} {:>9} {:>8.3}",
            r.view.round,
            r.view.budget_total,
            r.view.graph.edge_count(),
            r.view.removed_count(),
            r.samples.len(),
            r.samples.skipped_walks,
            sample_entropy(&r.samples.pair_ids())?
        );
    }
    if let Some(first) = run.rounds.first().and_then(|r| r.rewiring.first()) {
        println!(
            "first removal: {} with {} neighbors, {} edge(s) added",
            g.hin.node_name(first.removed),
            first.neighborhood.len(),
            first.added.len()
        );
    }
    Ok(())
}
