//! Heterogeneous information network storage.
//!
//! A [`Hin`] is an immutable, undirected simple graph whose nodes carry a type
//! label. Each node's neighbors are stored contiguously, sorted by
//! `(neighbor type, neighbor id)`, and indexed by per-node type buckets so
//! that both the set of neighbor types and the neighbors of one type are
//! available in constant time.
//!
//! Input files are tab-separated text (tabs shown as spaces):
//!
//! ```text
//! # types file: node_id <TAB> type_name
//! p1 P
//! a1 A
//! # edge file: src <TAB> dst
//! p1 a1
//! ```
//!
//! Edges are treated as undirected, duplicates are collapsed and self-loops
//! are dropped.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeId(pub u32);

impl TypeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type#{}", self.0)
    }
}

/// Bidirectional mapping between external string ids and dense indices, for
/// both nodes and node types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    type_names: Vec<String>,
    type_index: HashMap<String, TypeId>,
}

impl Symbols {
    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.type_names[t.index()]
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.type_index.get(name).copied()
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn type_count(&self) -> usize {
        self.type_names.len()
    }

    fn intern_type(&mut self, name: &str) -> TypeId {
        if let Some(&t) = self.type_index.get(name) {
            return t;
        }
        let t = TypeId(self.type_names.len() as u32);
        self.type_names.push(name.to_owned());
        self.type_index.insert(name.to_owned(), t);
        t
    }

    /// Returns `None` when the node is already registered.
    fn insert_node(&mut self, name: &str) -> Option<NodeId> {
        if self.node_index.contains_key(name) {
            return None;
        }
        let v = NodeId(self.node_names.len() as u32);
        self.node_names.push(name.to_owned());
        self.node_index.insert(name.to_owned(), v);
        Some(v)
    }
}

/// A run of neighbors sharing one type, as a range into the neighbor array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bucket {
    pub ty: TypeId,
    start: u32,
    end: u32,
}

impl Bucket {
    #[inline]
    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// One node's type buckets and neighbors in a single contiguous run:
/// `[bucket_count, (type, end) per bucket, neighbors...]`, where each `end`
/// is relative to the start of the neighbors. Random walks touch one record
/// per step, which keeps large graphs cache friendly.
#[derive(Clone, Copy, Debug)]
pub struct WalkRecord<'a>(&'a [u32]);

impl<'a> WalkRecord<'a> {
    #[inline]
    pub fn bucket_count(&self) -> usize {
        self.0.first().map_or(0, |&b| b as usize)
    }

    /// Type and neighbors of bucket `j`.
    #[inline]
    pub fn bucket(&self, j: usize) -> (TypeId, &'a [u32]) {
        let nb = self.bucket_count();
        let start = if j == 0 { 0 } else { self.0[2 * j] as usize };
        let end = self.0[2 * j + 2] as usize;
        let base = 1 + 2 * nb;
        (TypeId(self.0[1 + 2 * j]), &self.0[base + start..base + end])
    }
}

fn pack_walk_table(
    offsets: &[usize],
    neighbors: &[NodeId],
    bucket_offsets: &[usize],
    buckets: &[Bucket],
) -> (Vec<u32>, Vec<u32>) {
    let n = offsets.len() - 1;
    let mut walk_offsets = Vec::with_capacity(n + 1);
    let mut table = Vec::with_capacity(neighbors.len() + buckets.len() * 2 + n);
    walk_offsets.push(0);
    for v in 0..n {
        let own = &buckets[bucket_offsets[v]..bucket_offsets[v + 1]];
        if !own.is_empty() {
            table.push(own.len() as u32);
            for b in own {
                table.push(b.ty.0);
                table.push(b.end - offsets[v] as u32);
            }
            table.extend(neighbors[offsets[v]..offsets[v + 1]].iter().map(|u| u.0));
        }
        walk_offsets.push(u32::try_from(table.len()).expect("graph too large for a 32-bit walk table"));
    }
    (walk_offsets, table)
}

#[derive(Clone, Debug)]
pub struct Hin {
    symbols: Arc<Symbols>,
    node_types: Arc<Vec<TypeId>>,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    bucket_offsets: Vec<usize>,
    buckets: Vec<Bucket>,
    walk_offsets: Vec<u32>,
    walk_table: Vec<u32>,
    edge_count: usize,
}

impl PartialEq for Hin {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.node_types == other.node_types
            && self.offsets == other.offsets
            && self.neighbors == other.neighbors
            && self.edge_count == other.edge_count
    }
}

/// Counts of input rows discarded while building a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

impl Hin {
    /// Builds the frozen graph from symmetric, duplicate-free, loop-free
    /// adjacency lists.
    pub(crate) fn from_adjacency(
        symbols: Arc<Symbols>,
        node_types: Arc<Vec<TypeId>>,
        mut adjacency: Vec<Vec<NodeId>>,
    ) -> Self {
        let n = node_types.len();
        debug_assert_eq!(adjacency.len(), n);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut bucket_offsets = Vec::with_capacity(n + 1);
        let total: usize = adjacency.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        let mut buckets: Vec<Bucket> = Vec::new();
        offsets.push(0);
        bucket_offsets.push(0);
        for list in adjacency.iter_mut() {
            list.sort_unstable_by_key(|u| (node_types[u.index()], *u));
            let base = neighbors.len();
            let first_bucket = buckets.len();
            for (i, &u) in list.iter().enumerate() {
                let ty = node_types[u.index()];
                let pos = (base + i) as u32;
                let extends = buckets.len() > first_bucket && buckets[buckets.len() - 1].ty == ty;
                if extends {
                    buckets.last_mut().expect("non-empty").end += 1;
                } else {
                    buckets.push(Bucket {
                        ty,
                        start: pos,
                        end: pos + 1,
                    });
                }
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
            bucket_offsets.push(buckets.len());
        }
        debug_assert_eq!(total % 2, 0);
        let (walk_offsets, walk_table) = pack_walk_table(&offsets, &neighbors, &bucket_offsets, &buckets);
        Hin {
            symbols,
            node_types,
            offsets,
            neighbors,
            bucket_offsets,
            buckets,
            walk_offsets,
            walk_table,
            edge_count: total / 2,
        }
    }

    /// Builds a graph from an edge list over already-registered nodes.
    /// Duplicate edges are collapsed and self-loops dropped.
    pub(crate) fn from_edges(
        symbols: Arc<Symbols>,
        node_types: Arc<Vec<TypeId>>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> (Self, LoadReport) {
        let n = node_types.len();
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut report = LoadReport::default();
        let mut raw = 0usize;
        for (u, v) in edges {
            if u == v {
                report.self_loops += 1;
                continue;
            }
            raw += 1;
            adjacency[u.index()].push(v);
            adjacency[v.index()].push(u);
        }
        let mut kept = 0usize;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            kept += list.len();
        }
        report.duplicate_edges = raw - kept / 2;
        (Self::from_adjacency(symbols, node_types, adjacency), report)
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn type_count(&self) -> usize {
        self.symbols.type_count()
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub(crate) fn shared_symbols(&self) -> Arc<Symbols> {
        Arc::clone(&self.symbols)
    }

    pub(crate) fn shared_node_types(&self) -> Arc<Vec<TypeId>> {
        Arc::clone(&self.node_types)
    }

    pub fn node_types(&self) -> &[TypeId] {
        &self.node_types
    }

    #[inline]
    pub fn node_type(&self, v: NodeId) -> TypeId {
        self.node_types[v.index()]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn nodes_of_type(&self, t: TypeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| self.node_type(v) == t)
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }

    /// All neighbors of `v`, grouped by type.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    /// The non-empty type buckets of `v`, in ascending type order.
    #[inline]
    pub fn buckets(&self, v: NodeId) -> &[Bucket] {
        &self.buckets[self.bucket_offsets[v.index()]..self.bucket_offsets[v.index() + 1]]
    }

    #[inline]
    pub fn bucket_nodes(&self, bucket: &Bucket) -> &[NodeId] {
        &self.neighbors[bucket.start as usize..bucket.end as usize]
    }

    /// Buckets and neighbors of `v` packed into one slice, for walks.
    #[inline]
    pub fn walk_record(&self, v: NodeId) -> WalkRecord<'_> {
        let i = v.index();
        WalkRecord(&self.walk_table[self.walk_offsets[i] as usize..self.walk_offsets[i + 1] as usize])
    }

    /// The set of types present among the neighbors of `v`, ascending.
    pub fn neighbor_types(&self, v: NodeId) -> impl ExactSizeIterator<Item = TypeId> + '_ {
        self.buckets(v).iter().map(|b| b.ty)
    }

    /// Neighbors of `v` whose type is `t`, sorted by id. Empty when none.
    pub fn neighbors_of_type(&self, v: NodeId, t: TypeId) -> &[NodeId] {
        self.buckets(v)
            .iter()
            .find(|b| b.ty == t)
            .map(|b| self.bucket_nodes(b))
            .unwrap_or(&[])
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors_of_type(u, self.node_type(v))
            .binary_search(&v)
            .is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            let mut out: Vec<(NodeId, NodeId)> = self
                .neighbors(u)
                .iter()
                .filter(|&&v| u < v)
                .map(|&v| (u, v))
                .collect();
            out.sort_unstable();
            out
        })
    }

    /// Mutable sorted adjacency lists, the starting point for rewiring.
    pub(crate) fn adjacency_lists(&self) -> Vec<Vec<NodeId>> {
        self.nodes()
            .map(|v| {
                let mut list = self.neighbors(v).to_vec();
                list.sort_unstable();
                list
            })
            .collect()
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        self.symbols.node_name(v)
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        self.symbols.type_name(t)
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.symbols.node_id(name)
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.symbols.type_id(name)
    }
}

/// Incremental construction of a [`Hin`] from external ids, mostly for tests
/// and generators.
#[derive(Debug, Default)]
pub struct HinBuilder {
    symbols: Symbols,
    node_types: Vec<TypeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl HinBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a type name without adding a node, which fixes type ordering.
    pub fn add_type(&mut self, type_name: &str) -> TypeId {
        self.symbols.intern_type(type_name)
    }

    pub fn add_node(&mut self, name: &str, type_name: &str) -> Result<NodeId> {
        let t = self.symbols.intern_type(type_name);
        let v = self
            .symbols
            .insert_node(name)
            .ok_or_else(|| Error::InvalidInput(format!("node `{name}` declared twice")))?;
        self.node_types.push(t);
        Ok(v)
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let lookup = |name: &str| {
            self.symbols
                .node_id(name)
                .ok_or_else(|| Error::InvalidInput(format!("edge references unknown node `{name}`")))
        };
        let (u, v) = (lookup(a)?, lookup(b)?);
        self.edges.push((u, v));
        Ok(())
    }

    pub fn add_edge_ids(&mut self, u: NodeId, v: NodeId) {
        self.edges.push((u, v));
    }

    /// Chaining helper: `HinBuilder::new().node("a", "A").node("b", "B").edge("a", "b")`.
    /// Panics on invalid input.
    pub fn node(mut self, name: &str, type_name: &str) -> Self {
        self.add_node(name, type_name).expect("valid node");
        self
    }

    pub fn edge(mut self, a: &str, b: &str) -> Self {
        self.add_edge(a, b).expect("valid edge");
        self
    }

    pub fn build_with_report(self) -> (Hin, LoadReport) {
        Hin::from_edges(
            Arc::new(self.symbols),
            Arc::new(self.node_types),
            self.edges,
        )
    }

    pub fn build(self) -> Hin {
        self.build_with_report().0
    }
}

pub(crate) fn data_lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>> + '_> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(Error::io(path, e))),
            Ok(l) => {
                let trimmed = l.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, trimmed.to_owned())))
                }
            }
        }))
}

pub(crate) fn two_fields<'a>(path: &Path, line_no: usize, line: &'a str) -> Result<(&'a str, &'a str)> {
    let mut parts = line.split('\t').map(str::trim);
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => Ok((a, b)),
        _ => Err(Error::parse(
            path,
            line_no,
            format!("expected two tab-separated fields, got `{line}`"),
        )),
    }
}

/// Loads a graph from an edge file and a node type file.
pub fn load_hin(edge_file: &Path, type_file: &Path) -> Result<(Hin, LoadReport)> {
    let mut builder = HinBuilder::new();
    for row in data_lines(type_file)? {
        let (line_no, line) = row?;
        let (name, ty) = two_fields(type_file, line_no, &line)?;
        builder
            .add_node(name, ty)
            .map_err(|_| Error::parse(type_file, line_no, format!("node `{name}` typed twice")))?;
    }
    if builder.node_types.is_empty() {
        return Err(Error::EmptyGraph(format!(
            "no nodes in {}",
            type_file.display()
        )));
    }
    for row in data_lines(edge_file)? {
        let (line_no, line) = row?;
        let (a, b) = two_fields(edge_file, line_no, &line)?;
        builder.add_edge(a, b).map_err(|_| {
            let unknown = if builder.symbols.node_id(a).is_none() { a } else { b };
            Error::parse(
                edge_file,
                line_no,
                format!("edge `{line}` references node `{unknown}` missing from the type file"),
            )
        })?;
    }
    let (hin, report) = builder.build_with_report();
    if hin.edge_count() == 0 {
        return Err(Error::EmptyGraph(format!(
            "no edges in {}",
            edge_file.display()
        )));
    }
    if report.self_loops > 0 {
        log::warn!(
            "dropped {} self-loop edge(s) from {}",
            report.self_loops,
            edge_file.display()
        );
    }
    Ok((hin, report))
}

/// Writes the graph back out in the format read by [`load_hin`]. Node order in
/// the type file is the id order, so reloading reproduces the same ids.
pub fn save_hin(hin: &Hin, edge_file: &Path, type_file: &Path) -> Result<()> {
    let write_types = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(type_file)?);
        for v in hin.nodes() {
            writeln!(w, "{}\t{}", hin.node_name(v), hin.type_name(hin.node_type(v)))?;
        }
        w.flush()
    };
    write_types().map_err(|e| Error::io(type_file, e))?;
    let write_edges = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(edge_file)?);
        for (u, v) in hin.edges() {
            writeln!(w, "{}\t{}", hin.node_name(u), hin.node_name(v))?;
        }
        w.flush()
    };
    write_edges().map_err(|e| Error::io(edge_file, e))
}

/// Class labels for nodes of one target type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    pub target_type: TypeId,
    labels: BTreeMap<NodeId, usize>,
    class_names: Vec<String>,
}

impl LabelSet {
    /// `labels` must all be nodes of `target_type`; class indices must be
    /// dense in `0..class_names.len()`.
    pub fn new(
        hin: &Hin,
        target_type: TypeId,
        labels: BTreeMap<NodeId, usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        for (&v, &c) in &labels {
            if hin.node_type(v) != target_type {
                return Err(Error::InvalidInput(format!(
                    "labeled node `{}` has type `{}`, expected `{}`",
                    hin.node_name(v),
                    hin.type_name(hin.node_type(v)),
                    hin.type_name(target_type)
                )));
            }
            if c >= class_names.len() {
                return Err(Error::InvalidInput(format!("class index {c} out of range")));
            }
        }
        Ok(LabelSet {
            target_type,
            labels,
            class_names,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_name(&self, c: usize) -> &str {
        &self.class_names[c]
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn get(&self, v: NodeId) -> Option<usize> {
        self.labels.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labeled nodes in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.labels.iter().map(|(&v, &c)| (v, c))
    }
}

/// Loads a `node_id <TAB> class_name` file. Class indices follow sorted class
/// names.
pub fn load_labels(hin: &Hin, path: &Path) -> Result<LabelSet> {
    let mut rows = Vec::new();
    let mut target: Option<TypeId> = None;
    for row in data_lines(path)? {
        let (line_no, line) = row?;
        let (name, class) = two_fields(path, line_no, &line)?;
        let v = hin.node_id(name).ok_or_else(|| {
            Error::parse(path, line_no, format!("unknown node `{name}` in label file"))
        })?;
        let t = hin.node_type(v);
        match target {
            None => target = Some(t),
            Some(expected) if expected != t => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!(
                        "node `{name}` has type `{}` but earlier labels are `{}`",
                        hin.type_name(t),
                        hin.type_name(expected)
                    ),
                ))
            }
            _ => {}
        }
        rows.push((line_no, v, class.to_owned()));
    }
    let target = target.ok_or_else(|| {
        Error::InvalidInput(format!("label file {} has no labels", path.display()))
    })?;
    let mut class_names: Vec<String> = rows.iter().map(|r| r.2.clone()).collect();
    class_names.sort();
    class_names.dedup();
    let mut labels = BTreeMap::new();
    for (line_no, v, class) in rows {
        let c = class_names.binary_search(&class).expect("class collected above");
        if labels.insert(v, c).is_some_and(|prev| prev != c) {
            return Err(Error::parse(
                path,
                line_no,
                format!("node `{}` labeled twice with different classes", hin.node_name(v)),
            ));
        }
    }
    LabelSet::new(hin, target, labels, class_names)
}

pub fn save_labels(hin: &Hin, labels: &LabelSet, path: &Path) -> Result<()> {
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for (v, c) in labels.iter() {
            writeln!(w, "{}\t{}", hin.node_name(v), labels.class_name(c))?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Hin {
        HinBuilder::new()
            .node("p", "P")
            .node("a1", "A")
            .node("a2", "A")
            .node("s1", "S")
            .node("iso", "S")
            .edge("p", "a2")
            .edge("p", "a1")
            .edge("s1", "p")
            .build()
    }

    fn id(h: &Hin, name: &str) -> NodeId {
        h.node_id(name).unwrap()
    }

    #[test]
    fn path_graph_degrees() {
        let h = HinBuilder::new()
            .node("a", "A")
            .node("b", "P")
            .node("c", "A")
            .edge("a", "b")
            .edge("b", "c")
            .build();
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.degree(id(&h, "b")), 2);
        assert_eq!(h.degree(id(&h, "a")), 1);
    }

    #[test]
    fn neighbor_types_of_star() {
        let h = star();
        let p = id(&h, "p");
        let types: Vec<&str> = h.neighbor_types(p).map(|t| h.type_name(t)).collect();
        assert_eq!(types, vec!["A", "S"]);
        assert_eq!(h.neighbor_types(id(&h, "iso")).len(), 0);
        let leaf: Vec<&str> = h
            .neighbor_types(id(&h, "a1"))
            .map(|t| h.type_name(t))
            .collect();
        assert_eq!(leaf, vec!["P"]);
    }

    #[test]
    fn neighbors_of_type_buckets() {
        let h = star();
        let p = id(&h, "p");
        let a = h.type_id("A").unwrap();
        let s = h.type_id("S").unwrap();
        assert_eq!(h.neighbors_of_type(p, a), &[id(&h, "a1"), id(&h, "a2")]);
        assert_eq!(h.neighbors_of_type(p, s), &[id(&h, "s1")]);
        let a1 = id(&h, "a1");
        assert!(h.neighbors_of_type(a1, s).is_empty());
        assert_eq!(h.degree(id(&h, "iso")), 0);
        assert_eq!(h.degree(p), 3);
    }

    #[test]
    fn walk_records_mirror_buckets() {
        let h = star();
        for v in h.nodes() {
            let r = h.walk_record(v);
            assert_eq!(r.bucket_count(), h.buckets(v).len());
            for (j, b) in h.buckets(v).iter().enumerate() {
                let (ty, nodes) = r.bucket(j);
                assert_eq!(ty, b.ty);
                let ids: Vec<u32> = h.bucket_nodes(b).iter().map(|u| u.0).collect();
                assert_eq!(nodes, &ids[..]);
            }
        }
    }

    #[test]
    fn duplicates_and_self_loops_are_dropped() {
        let (h, report) = HinBuilder::new()
            .node("a", "A")
            .node("b", "B")
            .edge("a", "b")
            .edge("b", "a")
            .edge("a", "a")
            .build_with_report();
        assert_eq!(h.edge_count(), 1);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.duplicate_edges, 1);
        assert!(h.has_edge(id(&h, "a"), id(&h, "b")));
        assert!(h.has_edge(id(&h, "b"), id(&h, "a")));
    }

    #[test]
    fn handshake_on_star() {
        let h = star();
        let sum: usize = h.nodes().map(|v| h.degree(v)).sum();
        assert_eq!(sum, 2 * h.edge_count());
    }

    #[test]
    fn load_rejects_untyped_endpoint() {
        let dir = tempfile::tempdir().unwrap();
        let types = dir.path().join("types.tsv");
        let edges = dir.path().join("edges.tsv");
        std::fs::write(&types, "b\tP\n").unwrap();
        std::fs::write(&edges, "# comment\na\tb\n").unwrap();
        let err = load_hin(&edges, &types).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "{msg}");
        assert!(msg.contains("`a`"), "{msg}");
        assert!(err.is_validation());
    }

    #[test]
    fn load_rejects_empty_graph() {
        let dir = tempfile::tempdir().unwrap();
        let types = dir.path().join("types.tsv");
        let edges = dir.path().join("edges.tsv");
        std::fs::write(&types, "a\tP\nb\tA\n").unwrap();
        std::fs::write(&edges, "# nothing\n").unwrap();
        assert!(matches!(load_hin(&edges, &types), Err(Error::EmptyGraph(_))));
        std::fs::write(&types, "").unwrap();
        assert!(matches!(load_hin(&edges, &types), Err(Error::EmptyGraph(_))));
    }

    #[test]
    fn labels_load_and_validate() {
        let h = star();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.tsv");
        std::fs::write(&path, "a1\tdb\na2\tai\n").unwrap();
        let labels = load_labels(&h, &path).unwrap();
        assert_eq!(labels.class_count(), 2);
        assert_eq!(labels.get(id(&h, "a1")), Some(1));
        assert_eq!(labels.get(id(&h, "a2")), Some(0));

        std::fs::write(&path, "a1\tdb\nzz\tai\n").unwrap();
        let msg = load_labels(&h, &path).unwrap_err().to_string();
        assert!(msg.contains(":2:") && msg.contains("zz"), "{msg}");

        std::fs::write(&path, "a1\tdb\np\tai\n").unwrap();
        assert!(load_labels(&h, &path).is_err());
    }
}
