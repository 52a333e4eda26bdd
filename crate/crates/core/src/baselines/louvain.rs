use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::metrics::{modularity, Partition};

/// Smallest modularity improvement that counts as progress.
pub const MIN_GAIN: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    pub partition: Partition,
    /// Modularity after every local-moving pass, across all levels.
    pub trace: Vec<f64>,
}

/// Weighted graph with self-loops, as produced by aggregation.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Self-loop weight counted once.
    selfloop: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|i| g.neighbors(i).to_vec()).collect();
        let strength = (0..n).map(|i| g.strength(i)).collect();
        Self {
            adj,
            selfloop: vec![0.0; n],
            strength,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community into one vertex.
    fn aggregate(&self, community: &[usize], k: usize) -> Self {
        let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        let mut selfloop = vec![0.0; k];
        let mut strength = vec![0.0; k];
        for i in 0..self.n() {
            let ci = community[i];
            selfloop[ci] += self.selfloop[i];
            strength[ci] += self.strength[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    // seen from both ends
                    selfloop[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = maps
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_by_key(|&(j, _)| j);
                v
            })
            .collect();
        Self {
            adj,
            selfloop,
            strength,
        }
    }
}

/// Louvain modularity optimization with a seeded vertex order.
///
/// Vertices are visited in a shuffled order and moved to the neighbouring
/// community with the largest modularity gain; passes repeat until a pass
/// improves modularity by no more than [`MIN_GAIN`]. Communities are then
/// collapsed and the process repeats on the smaller graph.
pub fn louvain(g: &Graph, seed: u64) -> Partition {
    louvain_traced(g, seed).partition
}

pub fn louvain_traced(g: &Graph, seed: u64) -> LouvainResult {
    let n = g.n();
    let two_m = 2.0 * g.total_weight();
    if two_m == 0.0 {
        return LouvainResult {
            partition: Partition::singletons(n),
            trace: vec![],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(g);
    // community of every original vertex
    let mut membership: Vec<usize> = (0..n).collect();
    let mut current_q = modularity(g, &Partition::singletons(n));
    let mut trace = Vec::new();

    loop {
        let ln = level.n();
        let mut community: Vec<usize> = (0..ln).collect();
        let mut total: Vec<f64> = level.strength.clone();
        let mut order: Vec<usize> = (0..ln).collect();
        order.shuffle(&mut rng);
        let mut moved_any = false;

        loop {
            let mut moves = 0;
            for &i in &order {
                let ki = level.strength[i];
                let old = community[i];
                let mut links: HashMap<usize, f64> = HashMap::new();
                let mut neighbours = Vec::new();
                for &(j, w) in &level.adj[i] {
                    let c = community[j];
                    let e = links.entry(c).or_insert_with(|| {
                        neighbours.push(c);
                        0.0
                    });
                    *e += w;
                }
                total[old] -= ki;
                let gain = |c: usize, links: &HashMap<usize, f64>| {
                    links.get(&c).copied().unwrap_or(0.0) - total[c] * ki / two_m
                };
                let mut best = old;
                let mut best_gain = gain(old, &links);
                for &c in &neighbours {
                    let v = gain(c, &links);
                    if v > best_gain {
                        best_gain = v;
                        best = c;
                    }
                }
                total[best] += ki;
                if best != old {
                    community[i] = best;
                    moves += 1;
                }
            }
            if moves == 0 {
                break;
            }
            let q = modularity(g, &lift(&membership, &community));
            trace.push(q);
            moved_any = true;
            let improved = q - current_q;
            current_q = q;
            if improved <= MIN_GAIN {
                break;
            }
        }

        if !moved_any {
            break;
        }
        let relabel = Partition::from_labels(community.iter().copied());
        for c in membership.iter_mut() {
            *c = relabel.label(*c);
        }
        if relabel.k() == ln {
            break;
        }
        level = level.aggregate(relabel.labels(), relabel.k());
    }

    LouvainResult {
        partition: Partition::from_labels(membership),
        trace,
    }
}

fn lift(membership: &[usize], community: &[usize]) -> Partition {
    Partition::from_labels(membership.iter().map(|&c| community[c]))
}
