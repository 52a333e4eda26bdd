use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::metrics::Partition;

pub const MAX_SWEEPS: usize = 100;

/// Asynchronous label propagation.
///
/// Every vertex starts with its own label. In each sweep the vertices are
/// visited in a fresh random order; a vertex whose label is not among the
/// heaviest labels of its neighbours adopts one of those, chosen at random.
/// Stops after a sweep without changes or after [`MAX_SWEEPS`] sweeps.
pub fn label_propagation(g: &Graph, seed: u64) -> Partition {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..MAX_SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                continue;
            }
            let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
            for &(u, w) in nb {
                *weight.entry(labels[u]).or_insert(0.0) += w;
            }
            let top = weight.values().copied().fold(f64::NEG_INFINITY, f64::max);
            let best: Vec<usize> = weight
                .iter()
                .filter(|&(_, &w)| w == top)
                .map(|(&l, _)| l)
                .collect();
            if best.contains(&labels[v]) {
                continue;
            }
            labels[v] = *best.choose(&mut rng).expect("non-empty neighbourhood");
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(labels)
}
