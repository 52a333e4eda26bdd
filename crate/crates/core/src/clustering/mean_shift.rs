use rayon::prelude::*;

use super::{quantile, sq_dist, PointCloud};
use crate::metrics::Partition;

const MAX_ITERATIONS: usize = 300;
const STOP_FRACTION: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Half the median pairwise distance.
    Auto,
    Fixed(f64),
}

/// Half the median pairwise distance; zero for fewer than two points.
pub fn auto_bandwidth(pts: &PointCloud) -> f64 {
    if pts.n() < 2 {
        return 0.0;
    }
    0.5 * quantile(&pts.sorted_pair_distances(), 0.5)
}

/// Flat-kernel mean shift seeded at every point.
///
/// Each point climbs to the mean of its neighbours within the bandwidth until
/// it moves less than `1e-5` bandwidths. Modes are kept in order of support,
/// dropping any within half a bandwidth of a kept mode, and each point joins
/// its nearest kept mode.
///
/// # Panics
/// If a fixed bandwidth is not positive and finite.
pub fn mean_shift(pts: &PointCloud, bandwidth: Bandwidth) -> Partition {
    let n = pts.n();
    let bw = match bandwidth {
        Bandwidth::Fixed(b) => {
            assert!(b > 0.0 && b.is_finite(), "bandwidth must be positive");
            b
        }
        Bandwidth::Auto => auto_bandwidth(pts),
    };
    if n <= 1 || bw.is_nan() || bw <= 0.0 {
        // all points coincide (or there is at most one)
        return Partition::whole(n);
    }
    let m = pts.dim();
    let bw2 = bw * bw;
    let stop2 = (STOP_FRACTION * bw).powi(2);

    let modes: Vec<(Vec<f64>, usize)> = (0..n)
        .into_par_iter()
        .map(|seed| {
            let mut x = pts.point(seed).to_vec();
            let mut support = 0;
            for _ in 0..MAX_ITERATIONS {
                let mut mean = vec![0.0; m];
                let mut count = 0;
                for j in 0..n {
                    let p = pts.point(j);
                    if sq_dist(&x, p) <= bw2 {
                        mean.iter_mut().zip(p).for_each(|(s, v)| *s += v);
                        count += 1;
                    }
                }
                if count == 0 {
                    break;
                }
                mean.iter_mut().for_each(|s| *s /= count as f64);
                support = count;
                let moved = sq_dist(&mean, &x);
                x = mean;
                if moved < stop2 {
                    break;
                }
            }
            (x, support)
        })
        .collect();

    let mut order: Vec<usize> = (0..n).filter(|&i| modes[i].1 > 0).collect();
    order.sort_by(|&a, &b| modes[b].1.cmp(&modes[a].1).then(a.cmp(&b)));
    let merge2 = (0.5 * bw).powi(2);
    let mut centers: Vec<&[f64]> = Vec::new();
    for i in order {
        let c = modes[i].0.as_slice();
        if centers.iter().all(|k| sq_dist(k, c) >= merge2) {
            centers.push(c);
        }
    }
    if centers.is_empty() {
        return Partition::whole(n);
    }

    let labels = (0..n).map(|i| {
        let p = pts.point(i);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, c) in centers.iter().enumerate() {
            let d = sq_dist(p, c);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    });
    Partition::from_labels(labels)
}
