//! Undirected weighted graphs, edge-list parsing and topological distances.
//!
//! The distance matrix follows the disconnected-graph convention used
//! throughout the crate: vertices in different components sit at the largest
//! finite intra-component distance plus one.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Bidirectional map between external string IDs and internal indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeNames {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeNames {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }
}

/// Undirected graph with positive edge weights.
///
/// Immutable after construction; adjacency lists are built once and shared.
#[derive(Debug, Clone)]
pub struct Graph {
    edges: Vec<Edge>,
    names: NodeNames,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph over vertices `0..n` named by their decimal index.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut names = NodeNames::default();
        for i in 0..n {
            names.intern(&i.to_string());
        }
        let mut collected = Vec::new();
        let mut seen = HashSet::new();
        for (k, (u, v, w)) in edges.into_iter().enumerate() {
            check_edge(u, v, w, n, &mut seen).map_err(|msg| Error::parse(k + 1, msg))?;
            collected.push(Edge { u, v, w });
        }
        Ok(Self::assemble(names, collected))
    }

    /// Builds an unweighted graph over vertices `0..n`.
    pub fn from_unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    fn assemble(names: NodeNames, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); names.len()];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        Self {
            edges,
            names,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &NodeNames {
        &self.names
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Sum of the weights of edges incident to `i`.
    pub fn strength(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// True when every edge weight is exactly 1.
    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }
}

fn check_edge(
    u: usize,
    v: usize,
    w: f64,
    n: usize,
    seen: &mut HashSet<(usize, usize)>,
) -> std::result::Result<(), String> {
    if u >= n || v >= n {
        return Err(format!("edge ({u}, {v}) out of range for {n} vertices"));
    }
    if u == v {
        return Err(format!("self-loop on vertex {u}"));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(format!("weight must be positive and finite, got {w}"));
    }
    if !seen.insert((u.min(v), u.max(v))) {
        return Err(format!("duplicate edge ({u}, {v})"));
    }
    Ok(())
}

/// Parses a whitespace-separated `u v [w]` edge list.
///
/// Lines starting with `#` and blank lines are skipped. Vertex IDs are
/// arbitrary strings, indexed in order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut names = NodeNames::default();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(Error::parse(
                lineno,
                format!("expected `u v [w]`, found {} tokens", tokens.len()),
            ));
        }
        let w = match tokens.get(2) {
            Some(tok) => tok
                .parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("invalid weight `{tok}`")))?,
            None => 1.0,
        };
        if tokens[0] == tokens[1] {
            return Err(Error::parse(
                lineno,
                format!("self-loop on `{}`", tokens[0]),
            ));
        }
        let u = names.intern(tokens[0]);
        let v = names.intern(tokens[1]);
        check_edge(u, v, w, names.len(), &mut seen).map_err(|msg| Error::parse(lineno, msg))?;
        edges.push(Edge { u, v, w });
    }
    Ok(Graph::assemble(names, edges))
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// Connected components, each sorted ascending, ordered by smallest member.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for &(v, _) in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Dense symmetric matrix of topological distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: Array2<f64>,
}

impl DistanceMatrix {
    /// Wraps a square matrix, checking symmetry, a zero diagonal and
    /// positive off-diagonal entries.
    pub fn new(d: Array2<f64>) -> Result<Self> {
        let (r, c) = d.dim();
        if r != c {
            return Err(Error::DimensionMismatch(format!("{r}x{c} is not square")));
        }
        for i in 0..r {
            if d[[i, i]] != 0.0 {
                return Err(Error::InvalidConfig(format!("d[{i}][{i}] must be 0")));
            }
            for j in 0..i {
                let x = d[[i, j]];
                if !(x > 0.0 && x.is_finite()) || x != d[[j, i]] {
                    return Err(Error::InvalidConfig(format!(
                        "d[{i}][{j}] must be positive, finite and symmetric"
                    )));
                }
            }
        }
        Ok(Self { d })
    }

    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[[i, j]]
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.d.column(j)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.d
    }

    pub fn max(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }
}

/// All-pairs shortest paths with the cross-component "maximum plus one" rule.
///
/// Sources run in parallel; each row is computed independently so the result
/// does not depend on the thread count.
pub fn apsp(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let unit = g.is_unit_weight();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            if unit {
                bfs_row(g, s)
            } else {
                dijkstra_row(g, s)
            }
        })
        .collect();

    let intra_max = rows
        .iter()
        .flatten()
        .copied()
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    let cross = intra_max + 1.0;

    let mut d = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            d[[i, j]] = if x.is_finite() { x } else { cross };
        }
    }
    DistanceMatrix { d }
}

fn bfs_row(g: &Graph, s: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.n()];
    dist[s] = 0.0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if dist[v].is_infinite() {
                dist[v] = dist[u] + 1.0;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on node index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_row(g: &Graph, s: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.n()];
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([HeapEntry { dist: 0.0, node: s }]);
    while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in g.neighbors(u) {
            let alt = du + w;
            if alt < dist[v] {
                dist[v] = alt;
                heap.push(HeapEntry { dist: alt, node: v });
            }
        }
    }
    dist
}
