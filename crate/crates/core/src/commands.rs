//! The stages behind the `hin-embed` subcommands. Each stage validates its
//! config, writes its artifacts into `run.output_dir` together with a
//! `manifest.json`, and returns the in-memory results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::coarsener::{run_pipeline, PipelineRun};
use crate::config::{Manifest, RunConfig};
use crate::diagnostics::{matched_comparison, sample_entropy, self_pair_fraction, ComparisonReport};
use crate::embedder::{fit, import_embeddings, write_embeddings, Embeddings, TrainReport};
use crate::error::{Error, Result};
use crate::eval::{classify, cluster, EvalReport, LabeledData};
use crate::hin::{load_hin, load_labels, Hin};
use crate::sampler::{load_corpus, save_corpus, SampleSet};
use crate::synth::{generate, SynthConfig, SynthGraph};

pub const CORPUS_FILE: &str = "corpus.tsv";
pub const CORPUS_META_FILE: &str = "corpus.meta.json";
pub const SAMPLE_STATS_FILE: &str = "sample_stats.csv";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const LOSS_FILE: &str = "loss.csv";
pub const EVAL_CSV_FILE: &str = "eval.csv";
pub const EVAL_TEXT_FILE: &str = "eval.txt";
pub const ENTROPY_CSV_FILE: &str = "entropy.csv";
pub const ENTROPY_TEXT_FILE: &str = "entropy.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvalTask {
    Classify,
    Cluster,
    #[default]
    Both,
}

impl FromStr for EvalTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(EvalTask::Classify),
            "cluster" => Ok(EvalTask::Cluster),
            "both" => Ok(EvalTask::Both),
            other => Err(Error::Config(format!(
                "unknown task `{other}`; expected classify, cluster or both"
            ))),
        }
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn prepare_output(cfg: &RunConfig, command: &str) -> Result<PathBuf> {
    let dir = cfg.run.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let manifest = Manifest::new(command, cfg);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join(MANIFEST_FILE), json + "\n")?;
    Ok(dir)
}

/// Runs `f` on a thread pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(f))
}

fn load_graph(cfg: &RunConfig) -> Result<Hin> {
    let (hin, report) = load_hin(&cfg.data.edges, &cfg.data.types)?;
    log::info!(
        "loaded {} nodes, {} edges, {} types ({} self-loops, {} duplicate edges dropped)",
        hin.node_count(),
        hin.edge_count(),
        hin.type_count(),
        report.self_loops,
        report.duplicate_edges
    );
    Ok(hin)
}

/// Writes a synthetic planted-partition dataset (`edges.tsv`, `types.tsv`,
/// `labels.tsv`) into `out_dir`.
pub fn cmd_gen(cfg: &SynthConfig, out_dir: &Path) -> Result<SynthGraph> {
    let graph = generate(cfg)?;
    graph.save(out_dir)?;
    log::info!(
        "wrote {} nodes and {} edges to {}",
        graph.hin.node_count(),
        graph.hin.edge_count(),
        out_dir.display()
    );
    Ok(graph)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundInfo {
    pub round: usize,
    pub budget_total: f64,
    pub walks: u64,
    pub pairs: usize,
    pub skipped_walks: u64,
    pub removed_after: usize,
    pub edges: usize,
    pub self_pair_fraction: Option<f64>,
    pub entropy_nats: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct CorpusMeta<'a> {
    seed: u64,
    config_hash: String,
    coarsening_rounds: usize,
    pairs: usize,
    rounds: &'a [RoundInfo],
}

#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub corpus: SampleSet,
    pub rounds: Vec<RoundInfo>,
}

fn round_infos(run: &PipelineRun) -> Vec<RoundInfo> {
    run.rounds
        .iter()
        .map(|r| {
            let ids = r.samples.pair_ids();
            RoundInfo {
                round: r.view.round,
                budget_total: r.view.budget_total,
                walks: r.budget.walks(),
                pairs: r.samples.len(),
                skipped_walks: r.samples.skipped_walks,
                removed_after: r.removed_next.len(),
                edges: r.view.graph.edge_count(),
                self_pair_fraction: self_pair_fraction(&ids).ok(),
                entropy_nats: sample_entropy(&ids).ok(),
            }
        })
        .collect()
}

fn stats_csv(rounds: &[RoundInfo], corpus: &SampleSet) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(
        "round,budget_total,walks,pairs,skipped_walks,removed_after,edges,self_pair_fraction,entropy_nats\n",
    );
    for r in rounds {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.round,
            r.budget_total,
            r.walks,
            r.pairs,
            r.skipped_walks,
            r.removed_after,
            r.edges,
            opt(r.self_pair_fraction),
            opt(r.entropy_nats)
        );
    }
    let ids = corpus.pair_ids();
    let _ = writeln!(
        out,
        "all,{},{},{},{},{},,{},{}",
        rounds.iter().map(|r| r.budget_total).sum::<f64>(),
        rounds.iter().map(|r| r.walks).sum::<u64>(),
        corpus.len(),
        corpus.skipped_walks,
        rounds.iter().map(|r| r.removed_after).sum::<usize>(),
        opt(self_pair_fraction(&ids).ok()),
        opt(sample_entropy(&ids).ok())
    );
    out
}

fn sample_stage(cfg: &RunConfig, hin: &Hin, dir: &Path) -> Result<SampleOutcome> {
    let coarsen = cfg.coarsen_config(hin)?;
    let q0 = cfg.initial_budget(hin);
    let run = run_pipeline(hin, &coarsen, q0, cfg.sampling.pairs_per_walk, cfg.run.seed)?;
    let rounds = round_infos(&run);
    let corpus = run.into_corpus();
    if corpus.is_empty() {
        return Err(Error::InvalidInput("sampling produced no pairs".into()));
    }
    save_corpus(hin, &corpus, &dir.join(CORPUS_FILE))?;
    write_file(&dir.join(SAMPLE_STATS_FILE), stats_csv(&rounds, &corpus))?;
    let meta = CorpusMeta {
        seed: cfg.run.seed,
        config_hash: cfg.hash(),
        coarsening_rounds: cfg.sampling.rounds,
        pairs: corpus.len(),
        rounds: &rounds,
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(&dir.join(CORPUS_META_FILE), json + "\n")?;
    log::info!("sampled {} pairs over {} round(s)", corpus.len(), rounds.len());
    Ok(SampleOutcome { corpus, rounds })
}

/// Samples the configured graph with coarsening and writes `corpus.tsv`,
/// `corpus.meta.json` and `sample_stats.csv`.
pub fn cmd_sample(cfg: &RunConfig) -> Result<SampleOutcome> {
    cfg.validate()?;
    let dir = prepare_output(cfg, "sample")?;
    let hin = load_graph(cfg)?;
    with_workers(cfg.run.workers, || sample_stage(cfg, &hin, &dir))?
}

fn train_stage(cfg: &RunConfig, hin: &Hin, corpus: &SampleSet, dir: &Path) -> Result<(Embeddings, TrainReport)> {
    let (model, report) = fit(hin, corpus, &cfg.train_config())?;
    let emb = Embeddings::from_model(&model, hin.symbols());
    write_embeddings(&emb, &dir.join(EMBEDDINGS_FILE))?;
    write_file(&dir.join(LOSS_FILE), report.loss_csv())?;
    Ok((emb, report))
}

/// Trains on a pair file and writes `embeddings.txt` and `loss.csv`.
pub fn cmd_train(cfg: &RunConfig, corpus: &Path) -> Result<TrainReport> {
    cfg.validate()?;
    if !corpus.is_file() {
        return Err(Error::Config(format!("corpus file not found: {}", corpus.display())));
    }
    let dir = prepare_output(cfg, "train")?;
    let hin = load_graph(cfg)?;
    let corpus = load_corpus(&hin, corpus)?;
    with_workers(cfg.run.workers, || train_stage(cfg, &hin, &corpus, &dir))?.map(|(_, r)| r)
}

fn eval_stage(cfg: &RunConfig, data: &LabeledData, task: EvalTask, dir: &Path) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    if matches!(task, EvalTask::Classify | EvalTask::Both) {
        let scores = classify(data, &cfg.split_spec())?;
        report.macro_f1 = Some(scores.macro_f1);
        report.micro_f1 = Some(scores.micro_f1);
    }
    if matches!(task, EvalTask::Cluster | EvalTask::Both) {
        report.nmi = Some(cluster(data, cfg.eval.repeats, cfg.run.seed)?);
    }
    write_file(&dir.join(EVAL_CSV_FILE), report.to_csv())?;
    write_file(&dir.join(EVAL_TEXT_FILE), report.to_table())?;
    Ok(report)
}

fn labels_path(cfg: &RunConfig) -> Result<&Path> {
    cfg.data
        .labels
        .as_deref()
        .ok_or_else(|| Error::Config("data.labels: required for evaluation".into()))
}

/// Scores an embedding file against the configured labels and writes
/// `eval.csv` and `eval.txt`.
pub fn cmd_eval(cfg: &RunConfig, embeddings: &Path, task: EvalTask) -> Result<EvalReport> {
    cfg.validate()?;
    let labels_file = labels_path(cfg)?;
    if !embeddings.is_file() {
        return Err(Error::Config(format!(
            "embedding file not found: {}",
            embeddings.display()
        )));
    }
    let dir = prepare_output(cfg, "eval")?;
    let hin = load_graph(cfg)?;
    let labels = load_labels(&hin, labels_file)?;
    let emb = import_embeddings(embeddings)?;
    let data = LabeledData::from_embeddings(&emb, &hin, &labels)?;
    with_workers(cfg.run.workers, || eval_stage(cfg, &data, task, &dir))?
}

fn entropy_stage(cfg: &RunConfig, hin: &Hin, corpus: &SampleSet, dir: &Path) -> Result<ComparisonReport> {
    let report = matched_comparison(hin, &corpus.pair_ids(), &cfg.entropy, cfg.run.seed)?;
    write_file(&dir.join(ENTROPY_CSV_FILE), report.to_csv())?;
    write_file(&dir.join(ENTROPY_TEXT_FILE), report.to_table())?;
    Ok(report)
}

/// Samples with coarsening and with the window baseline at a matched pair
/// budget and writes the comparison to `entropy.csv` and `entropy.txt`.
pub fn cmd_entropy(cfg: &RunConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let dir = prepare_output(cfg, "entropy")?;
    let hin = load_graph(cfg)?;
    with_workers(cfg.run.workers, || {
        let coarsen = cfg.coarsen_config(&hin)?;
        let run = run_pipeline(
            &hin,
            &coarsen,
            cfg.initial_budget(&hin),
            cfg.sampling.pairs_per_walk,
            cfg.run.seed,
        )?;
        entropy_stage(cfg, &hin, &run.into_corpus(), &dir)
    })?
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub sample: SampleOutcome,
    pub train: TrainReport,
    /// Present when labels are configured.
    pub eval: Option<EvalReport>,
    pub entropy: ComparisonReport,
}

/// Sample, train, evaluate (when labels are configured) and compare entropy,
/// writing every stage's artifacts into one directory.
pub fn cmd_pipeline(cfg: &RunConfig, task: EvalTask) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let dir = prepare_output(cfg, "pipeline")?;
    let hin = load_graph(cfg)?;
    let labels = cfg
        .data
        .labels
        .as_deref()
        .map(|p| load_labels(&hin, p))
        .transpose()?;
    with_workers(cfg.run.workers, || {
        let sample = sample_stage(cfg, &hin, &dir)?;
        let (emb, train) = train_stage(cfg, &hin, &sample.corpus, &dir)?;
        let eval = match &labels {
            Some(labels) => {
                let data = LabeledData::from_embeddings(&emb, &hin, labels)?;
                Some(eval_stage(cfg, &data, task, &dir)?)
            }
            None => None,
        };
        let entropy = entropy_stage(cfg, &hin, &sample.corpus, &dir)?;
        Ok(PipelineOutcome {
            sample,
            train,
            eval,
            entropy,
        })
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_parse() {
        assert_eq!("classify".parse::<EvalTask>().unwrap(), EvalTask::Classify);
        assert_eq!("both".parse::<EvalTask>().unwrap(), EvalTask::Both);
        assert!("all".parse::<EvalTask>().unwrap_err().is_validation());
    }
}
