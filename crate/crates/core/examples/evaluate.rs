//! Score an embedding file: one-vs-rest logistic regression (macro/micro F1)
//! and k-means (NMI) against node labels.
//!
//! cargo run --release --example evaluate -- <embeddings.txt> <edges.tsv> <types.tsv> <labels.tsv>
//!
//! Without arguments, random and planted features are compared instead.

use std::path::Path;

use hin_embed::embedder::import_embeddings;
use hin_embed::eval::{classify, cluster, EvalReport, LabeledData, SplitSpec};
use hin_embed::hin::{load_hin, load_labels};
use hin_embed::rng;
use rand::Rng;

fn report(data: &LabeledData) -> hin_embed::Result<EvalReport> {
    let scores = classify(data, &SplitSpec::default())?;
    Ok(EvalReport {
        macro_f1: Some(scores.macro_f1),
        micro_f1: Some(scores.micro_f1),
        nmi: Some(cluster(data, 10, 0)?),
    })
}

fn main() -> hin_embed::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [emb, edges, types, labels] = args.as_slice() {
        let (hin, _) = load_hin(Path::new(edges), Path::new(types))?;
        let labels = load_labels(&hin, Path::new(labels))?;
        let emb = import_embeddings(Path::new(emb))?;
        print!("{}", report(&LabeledData::from_embeddings(&emb, &hin, &labels)?)?.to_table());
        return Ok(());
    }
    let mut rng = rng::stream(0, &[]);
    let (n, dim, k) = (300, 8, 3);
    let y: Vec<usize> = (0..n).map(|i| i % k).collect();
    let noise: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let planted: Vec<f64> = noise
        .iter()
        .enumerate()
        .map(|(i, x)| x + if i % dim == y[i / dim] { 3.0 } else { 0.0 })
        .collect();
    println!("random features");
    print!("{}", report(&LabeledData::new(dim, noise, y.clone(), k))?.to_table());
    println!("planted features");
    print!("{}", report(&LabeledData::new(dim, planted, y, k))?.to_table());
    Ok(())
}
