//! Self-avoiding short-sequence sampling.
//!
//! Walks are type-guided: from node `v` the walker first picks a neighbor type
//! uniformly among the types present around `v`, then a neighbor of that type
//! uniformly. Each walk started at `v0` emits `(v0, v_i)` for every visited
//! `v_i != v0` until `l` pairs are collected, so a corpus never contains a
//! self-pair. The number of walks started at each node is proportional to its
//! degree in the original graph.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::mem::MaybeUninit;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::coarsener::CoarsenedView;
use crate::error::{Error, Result};
use crate::hin::{data_lines, two_fields, Hin, NodeId, TypeId};
use crate::rng::{self, domain};

/// Walk-step cap per requested pair. A walk that keeps returning to its start
/// ends after `MAX_STEPS_PER_PAIR * l` steps with fewer than `l` pairs.
pub const MAX_STEPS_PER_PAIR: usize = 10;

/// One center-context pair. Node types are looked up in the graph rather
/// than stored, which halves the size of large corpora.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSample {
    pub center: NodeId,
    pub context: NodeId,
}

impl PairSample {
    pub fn new(center: NodeId, context: NodeId) -> Self {
        PairSample { center, context }
    }

    pub fn center_type(&self, hin: &Hin) -> TypeId {
        hin.node_type(self.center)
    }

    pub fn context_type(&self, hin: &Hin) -> TypeId {
        hin.node_type(self.context)
    }
}

/// A multiset of center-context pairs with per-node walk accounting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleSet {
    pub pairs: Vec<PairSample>,
    /// Coarsening round that produced the pairs (the last round for merged sets).
    pub source_round: usize,
    /// Number of walks started at each node.
    pub walk_starts: Vec<u32>,
    /// Walks skipped because a non-removed start node was isolated in the
    /// coarsened graph.
    pub skipped_walks: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(center, context)` tuples, the form the diagnostics work on.
    pub fn pair_ids(&self) -> Vec<(NodeId, NodeId)> {
        self.pairs.iter().map(|p| (p.center, p.context)).collect()
    }

    /// Appends another set, summing walk accounting.
    pub fn merge(&mut self, other: SampleSet) {
        if self.walk_starts.len() < other.walk_starts.len() {
            self.walk_starts.resize(other.walk_starts.len(), 0);
        }
        for (acc, w) in self.walk_starts.iter_mut().zip(&other.walk_starts) {
            *acc += w;
        }
        self.pairs.extend(other.pairs);
        self.skipped_walks += other.skipped_walks;
        self.source_round = self.source_round.max(other.source_round);
    }
}

/// Per-node walk counts for one sampling round.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingBudget {
    pub per_node: Vec<u32>,
    /// The real-valued total the per-node counts were derived from.
    pub total: f64,
}

impl SamplingBudget {
    pub fn walks(&self) -> u64 {
        self.per_node.iter().map(|&q| q as u64).sum()
    }
}

/// Picks the type of the next node uniformly among the neighbor types of `v`.
pub fn choose_next_type<R: Rng + ?Sized>(hin: &Hin, v: NodeId, rng: &mut R) -> Result<TypeId> {
    let buckets = hin.buckets(v);
    if buckets.is_empty() {
        return Err(Error::NoNeighbors(v));
    }
    Ok(buckets[rng.random_range(0..buckets.len())].ty)
}

/// One type-guided step: `P(u | v) = 1/|T_N(v)| * 1/|N_t(v)|` for `u` of type `t`.
#[inline]
pub fn step_walk<R: Rng + ?Sized>(hin: &Hin, v: NodeId, rng: &mut R) -> Result<NodeId> {
    let record = hin.walk_record(v);
    let nb = record.bucket_count();
    if nb == 0 {
        return Err(Error::NoNeighbors(v));
    }
    let (_, nodes) = record.bucket(rng.random_range(0..nb));
    Ok(NodeId(nodes[rng.random_range(0..nodes.len())]))
}

/// Degree-proportional walk counts: `q_v = round(q_total * deg(v) / 2|E|)`.
///
/// Degrees always come from `hin`, which should be the original graph even
/// when sampling a coarsened one.
pub fn compute_budget(hin: &Hin, q_total: f64) -> SamplingBudget {
    assert!(
        q_total.is_finite() && q_total >= 0.0,
        "sampling budget must be finite and non-negative, got {q_total}"
    );
    let denom = 2.0 * hin.edge_count() as f64;
    let per_node = hin
        .nodes()
        .map(|v| {
            let deg = hin.degree(v);
            if deg == 0 || denom == 0.0 {
                0
            } else {
                (q_total * deg as f64 / denom).round().max(0.0) as u32
            }
        })
        .collect();
    SamplingBudget {
        per_node,
        total: q_total,
    }
}

/// Runs one self-avoiding short walk from `v0`, appending at most `l` pairs to
/// `out`. Returns the number of pairs appended.
pub fn sas_walk_into<R: Rng + ?Sized>(
    hin: &Hin,
    v0: NodeId,
    l: usize,
    max_steps: usize,
    rng: &mut R,
    out: &mut Vec<PairSample>,
) -> Result<usize> {
    if hin.degree(v0) == 0 {
        return Err(Error::NoNeighbors(v0));
    }
    out.reserve(l);
    let emitted = walk_into_slice(hin, v0, max_steps, rng, &mut out.spare_capacity_mut()[..l]);
    // SAFETY: the walk initialized the first `emitted` spare slots.
    unsafe { out.set_len(out.len() + emitted) };
    Ok(emitted)
}

/// Fills `out` with up to `out.len()` pairs from one walk; returns how many.
/// `v0` must have neighbors.
#[inline]
fn walk_into_slice<R: Rng + ?Sized>(
    hin: &Hin,
    v0: NodeId,
    max_steps: usize,
    rng: &mut R,
    out: &mut [MaybeUninit<PairSample>],
) -> usize {
    let mut current = v0;
    let mut emitted = 0;
    for _ in 0..max_steps {
        if emitted == out.len() {
            break;
        }
        current = match step_walk(hin, current, rng) {
            Ok(next) => next,
            // Unreachable on undirected graphs; truncate rather than fail.
            Err(_) => break,
        };
        if current != v0 {
            out[emitted].write(PairSample::new(v0, current));
            emitted += 1;
        }
    }
    emitted
}

/// Walks advanced together from one start node, so that their memory
/// accesses overlap.
const LANES: usize = 8;

/// Runs `out.len() / l` walks from `v0`, walk `w` filling
/// `out[w * l..(w + 1) * l]`. Reports every walk that ended with fewer than
/// `l` pairs through `on_short(w, len)`. `v0` must have neighbors.
fn lockstep_walks<R: Rng + ?Sized>(
    hin: &Hin,
    v0: NodeId,
    l: usize,
    max_steps: usize,
    rng: &mut R,
    out: &mut [MaybeUninit<PairSample>],
    mut on_short: impl FnMut(usize, usize),
) {
    let q = out.len() / l;
    for first in (0..q).step_by(LANES) {
        let lanes = LANES.min(q - first);
        let mut current = [v0; LANES];
        let mut emitted = [0usize; LANES];
        let mut steps = [0usize; LANES];
        let mut active = lanes;
        while active > 0 {
            for j in 0..lanes {
                if emitted[j] == l || steps[j] == max_steps {
                    continue;
                }
                steps[j] += 1;
                match step_walk(hin, current[j], rng) {
                    Ok(u) => {
                        current[j] = u;
                        if u != v0 {
                            out[(first + j) * l + emitted[j]].write(PairSample::new(v0, u));
                            emitted[j] += 1;
                        }
                    }
                    // Unreachable on undirected graphs; truncate rather than fail.
                    Err(_) => steps[j] = max_steps,
                }
                if emitted[j] == l || steps[j] == max_steps {
                    active -= 1;
                }
            }
        }
        for (j, &len) in emitted[..lanes].iter().enumerate() {
            if len < l {
                on_short(first + j, len);
            }
        }
    }
}

pub fn sas_walk<R: Rng + ?Sized>(
    hin: &Hin,
    v0: NodeId,
    l: usize,
    max_steps: usize,
    rng: &mut R,
) -> Result<Vec<PairSample>> {
    let mut out = Vec::with_capacity(l);
    sas_walk_into(hin, v0, l, max_steps, rng, &mut out)?;
    Ok(out)
}

const NODES_PER_TASK: usize = 256;

/// Samples one round: `budget.per_node[v]` walks from every node `v`, on the
/// original graph when `v` has been removed by coarsening and on the
/// coarsened graph otherwise.
///
/// Each start node draws from its own stream keyed by `(seed, round, v)`, so
/// the result is identical for any number of worker threads. Runs on the
/// current rayon pool.
pub fn sample_graph(
    original: &Hin,
    view: &CoarsenedView,
    budget: &SamplingBudget,
    l: usize,
    seed: u64,
) -> SampleSet {
    let n = original.node_count();
    assert_eq!(budget.per_node.len(), n, "budget computed for another graph");
    let max_steps = MAX_STEPS_PER_PAIR * l;
    let round = view.round;

    // Walk `w` (numbered in node order) owns slots `[w * l, (w + 1) * l)` of
    // one shared buffer, so workers write disjoint ranges and pairs are never
    // copied out of per-worker buffers. Walks cut short by `max_steps` leave
    // gaps that are squeezed out afterwards.
    let walks: Vec<usize> = (0..n)
        .map(|i| {
            let v = NodeId(i as u32);
            let graph = if view.is_removed(v) { original } else { &view.graph };
            if graph.degree(v) > 0 {
                budget.per_node[i] as usize
            } else {
                0
            }
        })
        .collect();
    let total_walks: usize = walks.iter().sum();
    let mut pairs: Vec<PairSample> = Vec::with_capacity(total_walks * l);
    // (index of the first walk, walks per node, slots) for each task.
    type Region<'a> = (usize, &'a [usize], &'a mut [MaybeUninit<PairSample>]);
    let mut regions: Vec<Region> = Vec::new();
    let mut rest = &mut pairs.spare_capacity_mut()[..total_walks * l];
    let mut first_walk = 0;
    for chunk in walks.chunks(NODES_PER_TASK) {
        let count: usize = chunk.iter().sum();
        let (head, tail) = rest.split_at_mut(count * l);
        regions.push((first_walk, chunk, head));
        first_walk += count;
        rest = tail;
    }

    // Per chunk: (walk index, length) of every short walk, walk starts, skips.
    type ChunkResult = (Vec<(usize, usize)>, Vec<u32>, u64);
    let chunks: Vec<ChunkResult> = regions
        .into_par_iter()
        .enumerate()
        .map(|(c, (first_walk, chunk_walks, region))| {
            let mut short = Vec::new();
            let mut starts = Vec::with_capacity(chunk_walks.len());
            let mut skipped = 0u64;
            let mut w = 0;
            for (k, &count) in chunk_walks.iter().enumerate() {
                let i = c * NODES_PER_TASK + k;
                let v = NodeId(i as u32);
                let q = budget.per_node[i];
                if count == 0 {
                    skipped += q as u64;
                    starts.push(0);
                    continue;
                }
                let graph = if view.is_removed(v) { original } else { &view.graph };
                let mut rng = rng::stream(seed, &[domain::SAMPLE, round as u64, i as u64]);
                let slots = &mut region[w * l..(w + count) * l];
                lockstep_walks(graph, v, l, max_steps, &mut rng, slots, |j, len| {
                    short.push((first_walk + w + j, len))
                });
                w += count;
                starts.push(q);
            }
            (short, starts, skipped)
        })
        .collect();

    let mut set = SampleSet {
        pairs: Vec::new(),
        source_round: round,
        walk_starts: Vec::with_capacity(n),
        skipped_walks: 0,
    };
    let buffer = &mut pairs.spare_capacity_mut()[..total_walks * l];
    // Slots before `write` hold the compacted pairs; walks before `next` are done.
    let (mut write, mut next) = (0, 0);
    for (short, starts, skipped) in chunks {
        for (w, len) in short {
            buffer.copy_within(next * l..w * l + len, write);
            write += w * l + len - next * l;
            next = w + 1;
        }
        set.walk_starts.extend(starts);
        set.skipped_walks += skipped;
    }
    buffer.copy_within(next * l..total_walks * l, write);
    write += (total_walks - next) * l;
    // SAFETY: every walk initialized the first `len` slots of its range, and
    // the compaction above moved exactly those slots, in order, into
    // `[0, write)`.
    unsafe { pairs.set_len(write) };
    set.pairs = pairs;
    if set.skipped_walks > 0 {
        log::info!(
            "round {round}: skipped {} walk(s) from nodes isolated by coarsening",
            set.skipped_walks
        );
    }
    set
}

/// Writes one `center<TAB>context` line per pair, using external node ids.
pub fn save_corpus(hin: &Hin, corpus: &SampleSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in &corpus.pairs {
        writeln!(w, "{}\t{}", hin.node_name(p.center), hin.node_name(p.context))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a pair file written by [`save_corpus`]. Walk accounting is not
/// stored in the file and comes back empty.
pub fn load_corpus(hin: &Hin, path: &Path) -> Result<SampleSet> {
    let mut pairs = Vec::new();
    for line in data_lines(path)? {
        let (no, line) = line?;
        let (a, b) = two_fields(path, no, &line)?;
        let lookup = |name: &str| {
            hin.node_id(name)
                .ok_or_else(|| Error::parse(path, no, format!("unknown node `{name}`")))
        };
        let (center, context) = (lookup(a)?, lookup(b)?);
        pairs.push(PairSample::new(center, context));
    }
    if pairs.is_empty() {
        return Err(Error::parse(path, 0, "corpus has no pairs"));
    }
    Ok(SampleSet {
        pairs,
        ..SampleSet::default()
    })
}
