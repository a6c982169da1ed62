//! Embedding of heterogeneous information networks.
//!
//! The pipeline has four stages:
//!
//! 1. [`sampler`]: type-guided self-avoiding short walks produce
//!    `(center, context)` pairs with no self-pairs. Walks per node are
//!    proportional to degree.
//! 2. [`coarsener`]: between sampling rounds the most frequent context nodes
//!    of chosen types are removed and their neighbors rewired, so later rounds
//!    see a smaller graph with a reduced budget.
//! 3. [`embedder`]: a skip-gram with negative sampling whose scores are
//!    reweighted per `(context type, center type)` pair.
//! 4. [`eval`] and [`diagnostics`]: classification, clustering, and corpus
//!    entropy against a sliding-window baseline.
//!
//! [`commands`] wires the stages to files on disk; [`synth`] generates
//! planted-partition test graphs.
//!
//! ```no_run
//! use hin_embed::{coarsener, embedder, synth};
//!
//! let g = synth::generate(&synth::SynthConfig::default())?;
//! let cfg = coarsener::CoarsenConfig {
//!     cutoff: 0.3,
//!     rounds: 2,
//!     removable_types: coarsener::removable_types(&g.hin, &["A".into()])?,
//!     attenuation: 0.5,
//! };
//! let corpus = coarsener::run_pipeline(&g.hin, &cfg, 50.0 * 1500.0, 5, 7)?.into_corpus();
//! let train = embedder::TrainConfig { dim: 32, epochs: 5, ..Default::default() };
//! let (_model, _report) = embedder::fit(&g.hin, &corpus, &train)?;
//! # Ok::<(), hin_embed::Error>(())
//! ```

pub mod coarsener;
pub mod commands;
pub mod config;
pub mod diagnostics;
pub mod embedder;
pub mod error;
pub mod eval;
pub mod hin;
pub mod rng;
pub mod sampler;
pub mod synth;

pub use coarsener::{run_pipeline, CoarsenConfig, CoarsenedView, PipelineRun};
pub use config::RunConfig;
pub use embedder::{EmbeddingModel, Embeddings, TrainConfig};
pub use error::{Error, Result};
pub use hin::{load_hin, load_labels, Hin, HinBuilder, LabelSet, NodeId, TypeId};
pub use sampler::{PairSample, SampleSet};
