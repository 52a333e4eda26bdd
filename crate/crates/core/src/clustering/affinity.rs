use ndarray::Array2;

use super::PointCloud;
use crate::metrics::Partition;

const MAX_ITERATIONS: usize = 200;
const STABLE_ITERATIONS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preference {
    /// Median of the off-diagonal similarities.
    Median,
    Value(f64),
}

impl Preference {
    pub fn resolve(self, pts: &PointCloud) -> f64 {
        match self {
            Preference::Value(v) => v,
            Preference::Median => {
                let n = pts.n();
                if n < 2 {
                    return 0.0;
                }
                // each unordered pair appears twice off the diagonal, so the
                // median over pairs equals the median over ordered entries
                let d = pts.sorted_pair_distances();
                let k = d.len();
                let mid = if k % 2 == 1 {
                    d[k / 2] * d[k / 2]
                } else {
                    0.5 * (d[k / 2 - 1] * d[k / 2 - 1] + d[k / 2] * d[k / 2])
                };
                -mid
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityResult {
    pub partition: Partition,
    /// Exemplar indices, one per community label.
    pub exemplars: Vec<usize>,
    pub converged: bool,
    pub iterations: usize,
}

/// Affinity propagation on negative squared Euclidean similarities.
///
/// Stops once the exemplar set has been unchanged for 15 iterations, or after
/// 200. Without convergence the current assignment is returned with
/// `converged = false`; if no exemplar emerged at all every point is its own
/// community.
///
/// # Panics
/// If `damping` is outside `[0.5, 1)`.
pub fn affinity_propagation(
    pts: &PointCloud,
    preference: Preference,
    damping: f64,
) -> AffinityResult {
    assert!(
        (0.5..1.0).contains(&damping),
        "damping must lie in [0.5, 1)"
    );
    let n = pts.n();
    if n == 0 {
        return AffinityResult {
            partition: Partition::whole(0),
            exemplars: vec![],
            converged: true,
            iterations: 0,
        };
    }
    let all_same = (1..n).all(|i| pts.sq_dist(0, i) == 0.0);
    if all_same {
        return AffinityResult {
            partition: Partition::whole(n),
            exemplars: vec![0],
            converged: true,
            iterations: 0,
        };
    }

    let pref = preference.resolve(pts);
    let s = Array2::from_shape_fn(
        (n, n),
        |(i, k)| if i == k { pref } else { -pts.sq_dist(i, k) },
    );
    let mut r = Array2::<f64>::zeros((n, n));
    let mut a = Array2::<f64>::zeros((n, n));
    let mut history: Vec<Vec<bool>> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..MAX_ITERATIONS {
        iterations = it + 1;
        // responsibilities
        for i in 0..n {
            let (mut first, mut second, mut arg) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for k in 0..n {
                let v = a[[i, k]] + s[[i, k]];
                if v > first {
                    second = first;
                    first = v;
                    arg = k;
                } else if v > second {
                    second = v;
                }
            }
            for k in 0..n {
                let best = if k == arg { second } else { first };
                let new = s[[i, k]] - best;
                r[[i, k]] = damping * r[[i, k]] + (1.0 - damping) * new;
            }
        }
        // availabilities
        for k in 0..n {
            let col: f64 = (0..n)
                .map(|i| {
                    if i == k {
                        r[[k, k]]
                    } else {
                        r[[i, k]].max(0.0)
                    }
                })
                .sum();
            for i in 0..n {
                let new = if i == k {
                    col - r[[k, k]]
                } else {
                    (col - r[[i, k]].max(0.0)).min(0.0)
                };
                a[[i, k]] = damping * a[[i, k]] + (1.0 - damping) * new;
            }
        }

        let exemplars: Vec<bool> = (0..n).map(|k| a[[k, k]] + r[[k, k]] > 0.0).collect();
        let any = exemplars.iter().any(|&e| e);
        history.push(exemplars);
        if history.len() > STABLE_ITERATIONS {
            history.remove(0);
        }
        if any && history.len() == STABLE_ITERATIONS && history.windows(2).all(|w| w[0] == w[1]) {
            converged = true;
            break;
        }
    }

    let current = history.last().expect("at least one iteration");
    let mut exemplars: Vec<usize> = (0..n).filter(|&k| current[k]).collect();
    if exemplars.is_empty() {
        return AffinityResult {
            partition: Partition::singletons(n),
            exemplars: (0..n).collect(),
            converged: false,
            iterations,
        };
    }

    let assign = |ex: &[usize]| -> Vec<usize> {
        (0..n)
            .map(|i| match ex.iter().position(|&e| e == i) {
                Some(c) => c,
                None => argmax(ex.iter().map(|&e| s[[i, e]])),
            })
            .collect()
    };
    // move each exemplar to the member with the largest total similarity
    let labels = assign(&exemplars);
    for (c, ex) in exemplars.iter_mut().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
        let best = argmax(
            members
                .iter()
                .map(|&j| members.iter().map(|&i| s[[i, j]]).sum::<f64>()),
        );
        *ex = members[best];
    }
    let labels = assign(&exemplars);

    let partition = Partition::from_labels(labels.iter().copied());
    // reorder exemplars to follow canonical labels
    let mut ordered = vec![0; partition.k()];
    for (i, &l) in labels.iter().enumerate() {
        ordered[partition.label(i)] = exemplars[l];
    }
    AffinityResult {
        partition,
        exemplars: ordered,
        converged,
        iterations,
    }
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}
