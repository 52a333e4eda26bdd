use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::metrics::Partition;

pub const MAX_PASSES: usize = 10;

/// Kernighan–Lin bisection from a seeded random balanced split.
///
/// Each pass tentatively swaps vertex pairs with the best gain, locking them,
/// then keeps the prefix of swaps with the largest total cut reduction.
/// Passes repeat until one brings no improvement. With odd `n` the second
/// side holds the extra vertex.
///
/// # Panics
/// If the graph has fewer than two vertices.
pub fn kernighan_lin(g: &Graph, seed: u64) -> Partition {
    let n = g.n();
    assert!(n >= 2, "bisection needs at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut side = vec![1u8; n];
    for &v in &order[..n / 2] {
        side[v] = 0;
    }

    for _ in 0..MAX_PASSES {
        let swaps = pass(g, &side);
        let mut best = (0.0, 0);
        let mut total = 0.0;
        for (k, &(_, _, gain)) in swaps.iter().enumerate() {
            total += gain;
            if total > best.0 + 1e-12 {
                best = (total, k + 1);
            }
        }
        if best.1 == 0 {
            break;
        }
        for &(a, b, _) in &swaps[..best.1] {
            side[a] = 1;
            side[b] = 0;
        }
    }
    // label the side of vertex 0 first
    Partition::from_labels(side.iter().map(|&s| s as usize))
}

fn weight_between(g: &Graph, a: usize, b: usize) -> f64 {
    g.neighbors(a)
        .iter()
        .filter(|&&(v, _)| v == b)
        .map(|&(_, w)| w)
        .sum()
}

/// One tentative sequence of swaps `(from side 0, from side 1, gain)`.
fn pass(g: &Graph, side: &[u8]) -> Vec<(usize, usize, f64)> {
    let n = g.n();
    let mut d: Vec<f64> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(u, w)| if side[u] == side[v] { -w } else { w })
                .sum()
        })
        .collect();
    let mut locked = vec![false; n];
    let mut swaps = Vec::new();
    let steps = (n / 2).min(n - n / 2);
    for _ in 0..steps {
        let ranked = |s: u8, d: &[f64], locked: &[bool]| {
            let mut v: Vec<usize> = (0..n).filter(|&x| side[x] == s && !locked[x]).collect();
            v.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
            v
        };
        let left = ranked(0, &d, &locked);
        let right = ranked(1, &d, &locked);
        let top_right = d[right[0]];
        let mut best: Option<(f64, usize, usize)> = None;
        for &a in &left {
            // edge weights only lower the gain, so D sums bound it
            if best.is_some_and(|(g0, _, _)| d[a] + top_right <= g0) {
                break;
            }
            for &b in &right {
                if best.is_some_and(|(g0, _, _)| d[a] + d[b] <= g0) {
                    break;
                }
                let gain = d[a] + d[b] - 2.0 * weight_between(g, a, b);
                if best.is_none_or(|(g0, _, _)| gain > g0) {
                    best = Some((gain, a, b));
                }
            }
        }
        let (gain, a, b) = best.expect("both sides have unlocked vertices");
        locked[a] = true;
        locked[b] = true;
        swaps.push((a, b, gain));
        for &(x, w) in g.neighbors(a) {
            if !locked[x] {
                d[x] += if side[x] == 0 { 2.0 * w } else { -2.0 * w };
            }
        }
        for &(x, w) in g.neighbors(b) {
            if !locked[x] {
                d[x] += if side[x] == 1 { 2.0 * w } else { -2.0 * w };
            }
        }
    }
    swaps
}
