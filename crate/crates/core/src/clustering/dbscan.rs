use std::collections::VecDeque;

use rayon::prelude::*;

use super::PointCloud;
use crate::metrics::Partition;

/// Density-based clustering.
///
/// A point is a core point when at least `min_pts` points, itself included,
/// lie within `eps`. Clusters grow from core points in index order; border
/// points join the first cluster that reaches them. Noise points become
/// singleton communities.
///
/// # Panics
/// If `eps` is negative or not finite.
pub fn dbscan(pts: &PointCloud, eps: f64, min_pts: usize) -> Partition {
    assert!(eps >= 0.0 && eps.is_finite(), "eps must be non-negative");
    let n = pts.n();
    let eps2 = eps * eps;
    let neighbours: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| pts.sq_dist(i, j) <= eps2).collect())
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut clusters = 0;
    for start in 0..n {
        if !core[start] || label[start].is_some() {
            continue;
        }
        let c = clusters;
        clusters += 1;
        label[start] = Some(c);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            if !core[p] {
                continue;
            }
            for &q in &neighbours[p] {
                if label[q].is_none() {
                    label[q] = Some(c);
                    queue.push_back(q);
                }
            }
        }
    }
    let mut next = clusters;
    let labels: Vec<usize> = label
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    Partition::from_labels(labels)
}
