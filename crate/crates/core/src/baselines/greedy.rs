use std::collections::BTreeMap;

use crate::graph::Graph;
use crate::metrics::Partition;

/// Clauset–Newman–Moore greedy agglomeration.
///
/// Starting from singletons, the pair of adjacent communities whose merge
/// raises modularity the most is merged, until no merge raises it. Equal
/// gains go to the pair with the smallest community indices.
pub fn greedy_modularity(g: &Graph) -> Partition {
    let n = g.n();
    let two_m = 2.0 * g.total_weight();
    if two_m == 0.0 {
        return Partition::singletons(n);
    }
    // weight between adjacent communities, each edge counted once
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in g.edges() {
        *links[e.u].entry(e.v).or_insert(0.0) += e.w;
        *links[e.v].entry(e.u).or_insert(0.0) += e.w;
    }
    let mut a: Vec<f64> = (0..n).map(|i| g.strength(i) / two_m).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let m = g.total_weight();

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, row) in links.iter().enumerate() {
            for (&j, &w) in row.range(i + 1..) {
                let dq = w / m - 2.0 * a[i] * a[j];
                if best.is_none_or(|(b, _, _)| dq > b) {
                    best = Some((dq, i, j));
                }
            }
        }
        let Some((dq, i, j)) = best else { break };
        if dq <= 0.0 {
            break;
        }
        // merge j into i
        let moved = std::mem::take(&mut links[j]);
        for (x, w) in moved {
            links[x].remove(&j);
            if x == i {
                continue;
            }
            *links[i].entry(x).or_insert(0.0) += w;
            *links[x].entry(i).or_insert(0.0) += w;
        }
        a[i] += a[j];
        a[j] = 0.0;
        parent[j] = i;
    }

    let root = |mut v: usize| {
        while parent[v] != v {
            v = parent[v];
        }
        v
    };
    Partition::from_labels((0..n).map(root))
}
