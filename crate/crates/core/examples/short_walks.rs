//! Self-avoiding short walks next to fixed-length window walks on a star.
//!
//! cargo run --example short_walks

use hin_embed::diagnostics::{self_pair_fraction, window_pairs, Pair};
use hin_embed::hin::HinBuilder;
use hin_embed::rng;
use hin_embed::sampler::{sas_walk, step_walk};

fn main() -> hin_embed::Result<()> {
    // One paper linked to four authors and a venue.
    let hin = HinBuilder::new()
        .node("p", "P")
        .node("a1", "A")
        .node("a2", "A")
        .node("a3", "A")
        .node("a4", "A")
        .node("s", "S")
        .edge("p", "a1")
        .edge("p", "a2")
        .edge("p", "a3")
        .edge("p", "a4")
        .edge("p", "s")
        .build();
    let a1 = hin.node_id("a1").expect("node exists");
    let mut rng = rng::stream(7, &[]);

    let mut short: Vec<Pair> = Vec::new();
    for _ in 0..3 {
        let walk = sas_walk(&hin, a1, 5, 50, &mut rng)?;
        let names: Vec<&str> = walk.iter().map(|p| hin.node_name(p.context)).collect();
        println!("short walk from a1: {}", names.join(" "));
        short.extend(walk.iter().map(|p| (p.center, p.context)));
    }

    let mut window: Vec<Pair> = Vec::new();
    for _ in 0..3 {
        let mut walk = vec![a1];
        for _ in 0..9 {
            walk.push(step_walk(&hin, *walk.last().expect("non-empty"), &mut rng)?);
        }
        let names: Vec<&str> = walk.iter().map(|&v| hin.node_name(v)).collect();
        println!("window walk:        {}", names.join(" "));
        window_pairs(&walk, 5, &mut window);
    }
    println!("self-pair fraction: short walks {:.3}, window {:.3}", self_pair_fraction(&short)?, self_pair_fraction(&window)?);
    Ok(())
}
