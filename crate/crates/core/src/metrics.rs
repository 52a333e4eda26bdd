//! Embedding fit metrics and partition-quality scores.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::embed::{stress, EmbeddingSet, LossKind};
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, NodeNames};

/// Assignment of every vertex to one community.
///
/// Labels are canonical: contiguous `0..k`, numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        let mut map = HashMap::new();
        let labels: Vec<usize> = labels
            .into_iter()
            .map(|l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            k: map.len(),
            labels,
        }
    }

    /// Builds a partition from disjoint communities covering `0..n`.
    ///
    /// # Panics
    /// If the communities overlap or leave a vertex uncovered.
    pub fn from_communities(n: usize, communities: &[Vec<usize>]) -> Self {
        let mut labels = vec![usize::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for &v in members {
                assert_eq!(labels[v], usize::MAX, "vertex {v} in two communities");
                labels[v] = c;
            }
        }
        assert!(labels.iter().all(|&l| l != usize::MAX), "uncovered vertex");
        Self::from_labels(labels)
    }

    pub fn whole(n: usize) -> Self {
        Self::from_labels(std::iter::repeat_n(0, n))
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(0..n)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    /// Number of communities.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }
}

/// Parses `node_id label` lines against the graph's ID space.
pub fn parse_partition(text: &str, names: &NodeNames) -> Result<Partition> {
    let mut raw: Vec<Option<String>> = vec![None; names.len()];
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(lineno, "expected `node_id label`"));
        }
        let v = names
            .index_of(tokens[0])
            .ok_or_else(|| Error::UnknownNode(tokens[0].to_owned()))?;
        if raw[v].replace(tokens[1].to_owned()).is_some() {
            return Err(Error::parse(
                lineno,
                format!("node `{}` labelled twice", tokens[0]),
            ));
        }
    }
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(raw.len());
    for (v, label) in raw.into_iter().enumerate() {
        let label = label.ok_or_else(|| {
            Error::InvalidConfig(format!("node `{}` has no label", names.name(v)))
        })?;
        let next = ids.len();
        labels.push(*ids.entry(label).or_insert(next));
    }
    Ok(Partition::from_labels(labels))
}

pub fn read_partition(path: impl AsRef<Path>, names: &NodeNames) -> Result<Partition> {
    parse_partition(&fs::read_to_string(path)?, names)
}

pub fn format_partition(p: &Partition, names: &NodeNames) -> String {
    assert_eq!(p.len(), names.len());
    let mut out = String::new();
    for (v, name) in names.iter().enumerate() {
        writeln!(out, "{name} {}", p.label(v)).unwrap();
    }
    out
}

/// Root-mean-square distance error over unordered pairs.
///
/// # Panics
/// If fewer than two vertices are embedded.
pub fn rmse(e: &EmbeddingSet, d: &DistanceMatrix) -> f64 {
    assert!(e.n() >= 2, "rmse needs at least two vertices");
    stress(e, d, LossKind::Absolute, 0.0).sqrt()
}

/// Root-mean-square relative distance error over unordered pairs.
///
/// # Panics
/// If fewer than two vertices are embedded.
pub fn rmrse(e: &EmbeddingSet, d: &DistanceMatrix) -> f64 {
    assert!(e.n() >= 2, "rmrse needs at least two vertices");
    stress(e, d, LossKind::Relative, 0.0).sqrt()
}

/// Newman–Girvan modularity using edge weights; 0 for an edgeless graph.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    assert_eq!(g.n(), p.len(), "partition size differs from graph order");
    let total = g.total_weight();
    if total == 0.0 {
        return 0.0;
    }
    let mut inner = vec![0.0; p.k()];
    let mut degree = vec![0.0; p.k()];
    for e in g.edges() {
        let (cu, cv) = (p.label(e.u), p.label(e.v));
        if cu == cv {
            inner[cu] += e.w;
        }
        degree[cu] += e.w;
        degree[cv] += e.w;
    }
    inner
        .iter()
        .zip(&degree)
        .map(|(w_in, w_deg)| w_in / total - (w_deg / (2.0 * total)).powi(2))
        .sum()
}

struct Contingency {
    n: f64,
    /// Non-zero cells `(row, col, count)`.
    cells: Vec<(usize, usize, f64)>,
    rows: Vec<f64>,
    cols: Vec<f64>,
}

fn contingency(a: &Partition, b: &Partition) -> Contingency {
    assert_eq!(a.len(), b.len(), "partitions have different lengths");
    let mut cells = HashMap::new();
    let mut rows = vec![0.0; a.k()];
    let mut cols = vec![0.0; b.k()];
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        *cells.entry((la, lb)).or_insert(0.0) += 1.0;
        rows[la] += 1.0;
        cols[lb] += 1.0;
    }
    let mut cells: Vec<(usize, usize, f64)> =
        cells.into_iter().map(|((r, c), x)| (r, c, x)).collect();
    cells.sort_unstable_by_key(|&(r, c, _)| (r, c));
    Contingency {
        n: a.len() as f64,
        cells,
        rows,
        cols,
    }
}

fn comb2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index. Identical trivial partitions score 1.
pub fn ars(a: &Partition, b: &Partition) -> f64 {
    let t = contingency(a, b);
    let index: f64 = t.cells.iter().map(|&(_, _, c)| comb2(c)).sum();
    let sum_a: f64 = t.rows.iter().copied().map(comb2).sum();
    let sum_b: f64 = t.cols.iter().copied().map(comb2).sum();
    let total = comb2(t.n);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

fn entropy(counts: &[f64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the arithmetic mean of the two entropies.
/// Two single-community partitions score 1.
pub fn nmi(a: &Partition, b: &Partition) -> f64 {
    let t = contingency(a, b);
    if t.n == 0.0 {
        return 1.0;
    }
    let ha = entropy(&t.rows, t.n);
    let hb = entropy(&t.cols, t.n);
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = t
        .cells
        .iter()
        .map(|&(r, c, x)| x / t.n * (t.n * x / (t.rows[r] * t.cols[c])).ln())
        .sum();
    (mi / (0.5 * (ha + hb))).clamp(0.0, 1.0)
}
