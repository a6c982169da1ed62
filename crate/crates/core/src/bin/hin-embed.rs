use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hin_embed::commands::{self, EvalTask};
use hin_embed::synth::SynthConfig;
use hin_embed::{Error, RunConfig};

#[derive(Parser)]
#[command(version, about = "Heterogeneous network embedding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `run.workers`.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `run.output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.run.output_dir = o.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic planted-partition dataset.
    Gen {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the star-heavy preset (about 2,000 nodes with hubs).
        #[arg(long)]
        star_heavy: bool,
        #[arg(long)]
        communities: Option<usize>,
        /// Probability that an edge stays inside its community.
        #[arg(long)]
        intra: Option<f64>,
        /// Zipf exponent of partner popularity; larger is more star-like.
        #[arg(long)]
        hub_skew: Option<f64>,
        /// Multiplies every node count.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Sample a pair corpus with coarsening.
    Sample(Common),
    /// Train embeddings on a pair corpus.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Score embeddings by classification and clustering.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        embeddings: PathBuf,
        /// classify, cluster or both.
        #[arg(long, default_value = "both")]
        task: EvalTask,
    },
    /// Compare corpus entropy against the sliding-window baseline.
    Entropy(Common),
    /// Sample, train, evaluate and compare entropy in one go.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "both")]
        task: EvalTask,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen {
            out,
            seed,
            star_heavy,
            communities,
            intra,
            hub_skew,
            scale,
        } => {
            let mut cfg = if star_heavy {
                SynthConfig::star_heavy(seed)
            } else {
                SynthConfig { seed, ..SynthConfig::default() }
            };
            if let Some(f) = scale {
                cfg = cfg.scaled(f);
            }
            if let Some(k) = communities {
                cfg.communities = k;
            }
            if let Some(p) = intra {
                cfg.intra = p;
            }
            if let Some(s) = hub_skew {
                cfg.hub_skew = s;
            }
            commands::cmd_gen(&cfg, &out)?;
        }
        Command::Sample(c) => {
            let out = commands::cmd_sample(&c.load()?)?;
            println!("{} pairs in {} round(s)", out.corpus.len(), out.rounds.len());
        }
        Command::Train { common, corpus } => {
            let report = commands::cmd_train(&common.load()?, &corpus)?;
            if let Some(l) = report.epoch_losses.last() {
                println!("final mean loss {l:.6}");
            }
        }
        Command::Eval { common, embeddings, task } => {
            print!("{}", commands::cmd_eval(&common.load()?, &embeddings, task)?.to_table());
        }
        Command::Entropy(c) => print!("{}", commands::cmd_entropy(&c.load()?)?.to_table()),
        Command::Pipeline { common, task } => {
            let out = commands::cmd_pipeline(&common.load()?, task)?;
            if let Some(r) = &out.eval {
                print!("{}", r.to_table());
            }
            print!("{}", out.entropy.to_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
