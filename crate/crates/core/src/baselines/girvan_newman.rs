use std::collections::VecDeque;

use rayon::prelude::*;

use crate::graph::Graph;
use crate::metrics::{modularity, Partition};

/// Which intermediate partition to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// The partition with the highest modularity on the original graph.
    MaxModularity,
    /// The first partition with at least this many components.
    TargetK(usize),
}

/// Sources handled per parallel work unit; fixed so sums are reproducible.
const SOURCE_CHUNK: usize = 16;

/// Graph whose edges can be switched off.
struct Residual<'a> {
    g: &'a Graph,
    /// `(neighbour, edge index)` per vertex.
    adj: Vec<Vec<(usize, usize)>>,
    alive: Vec<bool>,
}

impl<'a> Residual<'a> {
    fn new(g: &'a Graph) -> Self {
        let mut adj = vec![Vec::new(); g.n()];
        for (id, e) in g.edges().iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        Self {
            g,
            adj,
            alive: vec![true; g.edge_count()],
        }
    }

    /// Hop-count edge betweenness (Brandes), summed over all sources.
    fn betweenness(&self) -> Vec<f64> {
        let n = self.g.n();
        let m = self.alive.len();
        let sources: Vec<usize> = (0..n).collect();
        let partial: Vec<Vec<f64>> = sources
            .par_chunks(SOURCE_CHUNK)
            .map(|chunk| {
                let mut acc = vec![0.0; m];
                let mut state = Brandes::new(n);
                for &s in chunk {
                    state.accumulate(self, s, &mut acc);
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; m];
        for p in partial {
            total.iter_mut().zip(p).for_each(|(t, x)| *t += x);
        }
        total
    }

    fn components(&self) -> Partition {
        let n = self.g.n();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(w, id) in &self.adj[v] {
                    if self.alive[id] && label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        Partition::from_labels(label)
    }
}

struct Brandes {
    order: Vec<usize>,
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    /// Predecessors as `(vertex, edge index)`.
    pred: Vec<Vec<(usize, usize)>>,
}

impl Brandes {
    fn new(n: usize) -> Self {
        Self {
            order: Vec::with_capacity(n),
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            pred: vec![Vec::new(); n],
        }
    }

    fn accumulate(&mut self, r: &Residual<'_>, s: usize, acc: &mut [f64]) {
        self.order.clear();
        for v in 0..self.sigma.len() {
            self.sigma[v] = 0.0;
            self.dist[v] = usize::MAX;
            self.delta[v] = 0.0;
            self.pred[v].clear();
        }
        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            self.order.push(v);
            for &(w, id) in &r.adj[v] {
                if !r.alive[id] {
                    continue;
                }
                if self.dist[w] == usize::MAX {
                    self.dist[w] = self.dist[v] + 1;
                    queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.pred[w].push((v, id));
                }
            }
        }
        for &w in self.order.iter().rev() {
            for &(v, id) in &self.pred[w] {
                let c = self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
                acc[id] += c;
                self.delta[v] += c;
            }
        }
    }
}

/// Divisive clustering by repeatedly deleting the edge of highest
/// betweenness.
///
/// Betweenness counts unweighted shortest paths and is recomputed after every
/// deletion; ties go to the edge listed first. Each time the number of
/// connected components grows, the components form a candidate partition.
pub fn girvan_newman(g: &Graph, selection: Selection) -> Partition {
    let mut r = Residual::new(g);
    let mut current = r.components();
    let mut best = (modularity(g, &current), current.clone());
    if let Selection::TargetK(k) = selection {
        if current.k() >= k {
            return current;
        }
    }
    let mut remaining = g.edge_count();
    while remaining > 0 {
        let bc = r.betweenness();
        let mut pick = usize::MAX;
        for (id, &b) in bc.iter().enumerate() {
            if r.alive[id] && (pick == usize::MAX || b > bc[pick]) {
                pick = id;
            }
        }
        r.alive[pick] = false;
        remaining -= 1;
        let next = r.components();
        if next.k() == current.k() {
            continue;
        }
        current = next;
        match selection {
            Selection::TargetK(k) if current.k() >= k => return current,
            Selection::TargetK(_) => {}
            Selection::MaxModularity => {
                let q = modularity(g, &current);
                if q > best.0 {
                    best = (q, current.clone());
                }
            }
        }
    }
    match selection {
        Selection::MaxModularity => best.1,
        Selection::TargetK(_) => current,
    }
}
