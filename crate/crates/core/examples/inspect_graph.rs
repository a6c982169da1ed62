//! Load a typed graph from `edges.tsv` / `types.tsv` and print its shape.
//!
//! cargo run --example inspect_graph -- <edges.tsv> <types.tsv>
//!
//! Without arguments a planted-partition graph is generated instead.

use std::path::Path;

use hin_embed::hin::{load_hin, Hin, TypeId};
use hin_embed::synth::{generate, SynthConfig};

fn main() -> hin_embed::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let hin: Hin = match args.as_slice() {
        [edges, types] => {
            let (hin, report) = load_hin(Path::new(edges), Path::new(types))?;
            println!(
                "dropped {} self-loop(s) and {} duplicate edge(s)",
                report.self_loops, report.duplicate_edges
            );
            hin
        }
        _ => generate(&SynthConfig::default())?.hin,
    };
    println!("{} nodes, {} edges, {} types", hin.node_count(), hin.edge_count(), hin.type_count());
    println!("{:<8} {:>8} {:>10} {:>8} {:>14}", "type", "nodes", "mean deg", "max deg", "neighbor types");
    for t in (0..hin.type_count() as u32).map(TypeId) {
        let nodes: Vec<_> = hin.nodes_of_type(t).collect();
        let degrees: Vec<usize> = nodes.iter().map(|&v| hin.degree(v)).collect();
        let mean = degrees.iter().sum::<usize>() as f64 / nodes.len().max(1) as f64;
        let mixed = nodes.iter().map(|&v| hin.neighbor_types(v).len()).sum::<usize>() as f64
            / nodes.len().max(1) as f64;
        println!(
            "{:<8} {:>8} {:>10.2} {:>8} {:>14.2}",
            hin.type_name(t),
            nodes.len(),
            mean,
            degrees.iter().max().unwrap_or(&0),
            mixed
        );
    }
    let isolated = hin.nodes().filter(|&v| hin.degree(v) == 0).count();
    println!("isolated nodes: {isolated}");
    Ok(())
}
