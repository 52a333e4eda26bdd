//! Stress objective under the power-law distance `‖eᵢ − eⱼ‖^κ`.
//!
//! `κ` is either fixed or learned through an unconstrained parameter `α`
//! with `κ = κ_min + (κ_max − κ_min)·σ(α)`.

mod adam;
mod io;
mod optim;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

pub use adam::Adam;
pub use io::{format_tsv, parse_tsv, read_tsv, EmbeddingFile};
pub(crate) use optim::initial_kappa;
pub use optim::{optimize_direct, DirectFit, KappaMode, OptimConfig, PairBatch};

pub const KAPPA_MIN: f64 = 0.05;
pub const KAPPA_MAX: f64 = 2.0;

/// Smoothing added under the norm during optimization.
pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    #[serde(rename = "abs")]
    Absolute,
    #[serde(rename = "rel")]
    Relative,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Absolute => "abs",
            LossKind::Relative => "rel",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" | "absolute" => Ok(LossKind::Absolute),
            "rel" | "relative" => Ok(LossKind::Relative),
            other => Err(Error::InvalidConfig(format!("unknown loss kind `{other}`"))),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn kappa_of_alpha(alpha: f64) -> f64 {
    KAPPA_MIN + (KAPPA_MAX - KAPPA_MIN) * sigmoid(alpha)
}

/// `dκ/dα`.
pub fn kappa_slope(alpha: f64) -> f64 {
    let s = sigmoid(alpha);
    (KAPPA_MAX - KAPPA_MIN) * s * (1.0 - s)
}

/// Inverse of [`kappa_of_alpha`].
///
/// # Panics
/// If `kappa` is not strictly inside `(KAPPA_MIN, KAPPA_MAX)`.
pub fn alpha_of_kappa(kappa: f64) -> f64 {
    assert!(
        kappa > KAPPA_MIN && kappa < KAPPA_MAX,
        "kappa {kappa} outside the open interval ({KAPPA_MIN}, {KAPPA_MAX})"
    );
    let p = (kappa - KAPPA_MIN) / (KAPPA_MAX - KAPPA_MIN);
    (p / (1.0 - p)).ln()
}

pub fn kappa_in_range(kappa: f64) -> bool {
    (KAPPA_MIN..=KAPPA_MAX).contains(&kappa)
}

/// `(‖a − b‖² + ε)^(κ/2)`; exactly `‖a − b‖^κ` for `ε = 0`.
#[inline]
pub fn pair_distance(a: &[f64], b: &[f64], kappa: f64, epsilon: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq + epsilon).powf(0.5 * kappa)
}

/// Squared residual of one pair.
#[inline]
pub fn pair_loss(d: f64, target: f64, loss: LossKind) -> f64 {
    debug_assert!(target > 0.0, "pair target must be positive");
    match loss {
        LossKind::Absolute => (d - target) * (d - target),
        LossKind::Relative => {
            let r = d / target - 1.0;
            r * r
        }
    }
}

/// Vertex embeddings plus the distance exponent they are measured with.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    coords: Array2<f64>,
    kappa: f64,
}

impl EmbeddingSet {
    pub fn new(coords: Array2<f64>, kappa: f64) -> Result<Self> {
        if !kappa_in_range(kappa) {
            return Err(Error::InvalidConfig(format!(
                "kappa {kappa} outside [{KAPPA_MIN}, {KAPPA_MAX}]"
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite embedding entry".into()));
        }
        Ok(Self { coords, kappa })
    }

    pub fn n(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn coords(&self) -> &Array2<f64> {
        &self.coords
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.coords
            .row(i)
            .to_slice()
            .expect("embedding rows are contiguous")
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        pair_distance(self.row(i), self.row(j), self.kappa, 0.0)
    }
}

/// Mean pairwise loss over unordered pairs; 0 for fewer than two vertices.
pub fn stress(e: &EmbeddingSet, d: &DistanceMatrix, loss: LossKind, epsilon: f64) -> f64 {
    stress_of(e.coords.view(), e.kappa, d, loss, epsilon)
}

pub(crate) fn stress_of(
    coords: ArrayView2<'_, f64>,
    kappa: f64,
    d: &DistanceMatrix,
    loss: LossKind,
    epsilon: f64,
) -> f64 {
    let n = coords.nrows();
    assert_eq!(n, d.n(), "embedding and distance matrix sizes differ");
    if n < 2 {
        return 0.0;
    }
    let row_sums: Vec<f64> = (1..n)
        .into_par_iter()
        .map(|i| {
            let ei = coords.row(i);
            let ei = ei.as_slice().expect("contiguous rows");
            (0..i)
                .map(|j| {
                    let ej = coords.row(j);
                    let dist = pair_distance(ei, ej.as_slice().unwrap(), kappa, epsilon);
                    pair_loss(dist, d.get(i, j), loss)
                })
                .sum::<f64>()
        })
        .collect();
    pair_scale(n) * row_sums.iter().sum::<f64>()
}

#[inline]
pub(crate) fn pair_scale(n: usize) -> f64 {
    2.0 / (n as f64 * (n as f64 - 1.0))
}

/// How `κ` enters the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Fixed(f64),
    Learned { alpha: f64 },
}

impl Kappa {
    pub fn value(self) -> f64 {
        match self {
            Kappa::Fixed(k) => k,
            Kappa::Learned { alpha } => kappa_of_alpha(alpha),
        }
    }
}

/// Objective value with its gradient.
#[derive(Debug, Clone)]
pub struct StressGradient {
    pub value: f64,
    /// `∂stress/∂e`, same shape as the embedding.
    pub coords: Array2<f64>,
    /// `∂stress/∂α`; zero when `κ` is fixed.
    pub alpha: f64,
}

/// Per-pair contribution: loss, the coefficient `c` with `∂L/∂eᵢ = c·(eᵢ − eⱼ)`,
/// and `∂L/∂κ`.
#[inline]
pub(crate) fn pair_term(
    ei: &[f64],
    ej: &[f64],
    target: f64,
    kappa: f64,
    loss: LossKind,
    epsilon: f64,
) -> (f64, f64, f64) {
    let s: f64 = ei
        .iter()
        .zip(ej)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        + epsilon;
    let dist = s.powf(0.5 * kappa);
    let (value, dl_dd) = match loss {
        LossKind::Absolute => {
            let r = dist - target;
            (r * r, 2.0 * r)
        }
        LossKind::Relative => {
            let r = dist / target - 1.0;
            (r * r, 2.0 * r / target)
        }
    };
    if s <= 0.0 {
        return (value, 0.0, 0.0);
    }
    // d(dist)/d(eᵢ) = κ·s^(κ/2 − 1)·(eᵢ − eⱼ); d(dist)/dκ = dist·ln(s)/2
    let coef = dl_dd * kappa * dist / s;
    let dk = dl_dd * 0.5 * dist * s.ln();
    (value, coef, dk)
}

/// Analytic gradient of [`stress`] with respect to every coordinate and `α`.
///
/// Each row is accumulated independently over all partners in index order,
/// so the result is the same for any thread count.
pub fn stress_gradient(
    coords: ArrayView2<'_, f64>,
    kappa: Kappa,
    d: &DistanceMatrix,
    loss: LossKind,
    epsilon: f64,
) -> StressGradient {
    let (n, m) = coords.dim();
    assert_eq!(n, d.n(), "embedding and distance matrix sizes differ");
    let mut grad = Array2::zeros((n, m));
    if n < 2 {
        return StressGradient {
            value: 0.0,
            coords: grad,
            alpha: 0.0,
        };
    }
    let k = kappa.value();
    let rows: Vec<(Vec<f64>, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ei = coords.row(i);
            let ei = ei.as_slice().expect("contiguous rows");
            let mut g = vec![0.0; m];
            let mut value = 0.0;
            let mut dk = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let ej = coords.row(j);
                let ej = ej.as_slice().unwrap();
                let (l, coef, dkappa) = pair_term(ei, ej, d.get(i, j), k, loss, epsilon);
                for ((gi, a), b) in g.iter_mut().zip(ei).zip(ej) {
                    *gi += coef * (a - b);
                }
                // each unordered pair is visited twice; count it once
                if j < i {
                    value += l;
                    dk += dkappa;
                }
            }
            (g, value, dk)
        })
        .collect();

    let scale = pair_scale(n);
    let mut value = 0.0;
    let mut dk = 0.0;
    for (i, (g, v, k_part)) in rows.into_iter().enumerate() {
        for (dst, src) in grad.row_mut(i).iter_mut().zip(g) {
            *dst = scale * src;
        }
        value += v;
        dk += k_part;
    }
    let alpha = match kappa {
        Kappa::Fixed(_) => 0.0,
        Kappa::Learned { alpha } => scale * dk * kappa_slope(alpha),
    };
    StressGradient {
        value: scale * value,
        coords: grad,
        alpha,
    }
}

/// Gradient of the mean loss over an explicit list of sampled pairs.
pub(crate) fn sampled_gradient(
    coords: ArrayView2<'_, f64>,
    kappa: Kappa,
    d: &DistanceMatrix,
    loss: LossKind,
    epsilon: f64,
    pairs: &[(usize, usize)],
) -> StressGradient {
    let (n, m) = coords.dim();
    let k = kappa.value();
    let terms: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let ei = coords.row(i);
            let ej = coords.row(j);
            pair_term(
                ei.as_slice().unwrap(),
                ej.as_slice().unwrap(),
                d.get(i, j),
                k,
                loss,
                epsilon,
            )
        })
        .collect();
    let scale = 1.0 / pairs.len().max(1) as f64;
    let mut grad = Array2::zeros((n, m));
    let mut value = 0.0;
    let mut dk = 0.0;
    for (&(i, j), &(l, coef, dkappa)) in pairs.iter().zip(&terms) {
        value += l;
        dk += dkappa;
        for c in 0..m {
            let diff = coef * (coords[[i, c]] - coords[[j, c]]);
            grad[[i, c]] += scale * diff;
            grad[[j, c]] -= scale * diff;
        }
    }
    let alpha = match kappa {
        Kappa::Fixed(_) => 0.0,
        Kappa::Learned { alpha } => scale * dk * kappa_slope(alpha),
    };
    StressGradient {
        value: scale * value,
        coords: grad,
        alpha,
    }
}
