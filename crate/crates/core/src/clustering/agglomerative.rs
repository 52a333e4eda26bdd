use std::fmt;

use serde::Serialize;

use super::PointCloud;
use crate::metrics::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Average,
    Complete,
    Single,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Single => "single",
        })
    }
}

/// Bottom-up merging until `k` clusters remain.
///
/// The closest pair of clusters is merged first; equal distances go to the
/// pair with the smallest indices. Cluster distances are updated with the
/// Lance–Williams recurrences.
///
/// # Panics
/// If `k` is zero (with points present) or larger than the number of points.
pub fn agglomerative(pts: &PointCloud, k: usize, linkage: Linkage) -> Partition {
    let n = pts.n();
    assert!(k <= n, "cannot form {k} clusters from {n} points");
    assert!(k >= 1 || n == 0, "need at least one cluster");
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = pts.dist(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut parent: Vec<usize> = (0..n).collect();
    // nearest active neighbour with a larger index
    let mut nn = vec![usize::MAX; n];
    let mut nnd = vec![f64::INFINITY; n];
    let refresh = |i: usize, dist: &[f64], active: &[bool], nn: &mut [usize], nnd: &mut [f64]| {
        nn[i] = usize::MAX;
        nnd[i] = f64::INFINITY;
        for j in i + 1..n {
            if active[j] && dist[i * n + j] < nnd[i] {
                nnd[i] = dist[i * n + j];
                nn[i] = j;
            }
        }
    };
    for i in 0..n {
        refresh(i, &dist, &active, &mut nn, &mut nnd);
    }

    for _ in 0..n.saturating_sub(k) {
        let mut a = usize::MAX;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && (a == usize::MAX || nnd[i] < nnd[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for x in 0..n {
            if !active[x] || x == a || x == b {
                continue;
            }
            let (da, db) = (dist[a * n + x], dist[b * n + x]);
            let d = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Complete => da.max(db),
                Linkage::Average => (sa * da + sb * db) / (sa + sb),
            };
            dist[a * n + x] = d;
            dist[x * n + a] = d;
        }
        active[b] = false;
        size[a] += size[b];
        parent[b] = a;

        refresh(a, &dist, &active, &mut nn, &mut nnd);
        for x in 0..n {
            if !active[x] || x == a {
                continue;
            }
            if nn[x] == a || nn[x] == b {
                refresh(x, &dist, &active, &mut nn, &mut nnd);
            } else if x < a {
                let d = dist[x * n + a];
                if d < nnd[x] || (d == nnd[x] && a < nn[x]) {
                    nnd[x] = d;
                    nn[x] = a;
                }
            }
        }
    }

    let root = |mut i: usize| {
        while parent[i] != i {
            i = parent[i];
        }
        i
    };
    Partition::from_labels((0..n).map(root))
}
