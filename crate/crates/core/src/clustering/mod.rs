//! Point-cloud clustering of embeddings and the modularity-ranked sweep that
//! turns clusterings into graph communities.

mod affinity;
mod agglomerative;
mod dbscan;
mod mean_shift;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::EmbeddingSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{modularity, Partition};

pub use affinity::{affinity_propagation, AffinityResult, Preference};
pub use agglomerative::{agglomerative, Linkage};
pub use dbscan::dbscan;
pub use mean_shift::{auto_bandwidth, mean_shift, Bandwidth};

/// Rows of an embedding viewed as points in `ℝᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Array2<f64>,
}

impl PointCloud {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(
                "point coordinates must be finite".into(),
            ));
        }
        Ok(Self {
            points: points.as_standard_layout().into_owned(),
        })
    }

    pub fn from_embedding(e: &EmbeddingSet) -> Self {
        Self {
            points: e.coords().as_standard_layout().into_owned(),
        }
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let m = self.dim();
        &self.points.as_slice().expect("standard layout")[i * m..(i + 1) * m]
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.point(i), self.point(j))
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.sq_dist(i, j).sqrt()
    }

    /// Distances of all unordered pairs, sorted ascending.
    pub fn sorted_pair_distances(&self) -> Vec<f64> {
        let n = self.n();
        let mut out: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "affinity")]
    AffinityPropagation,
    #[serde(rename = "agglo")]
    Agglomerative,
    Dbscan,
    MeanShift,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::MeanShift,
        Algorithm::AffinityPropagation,
        Algorithm::Agglomerative,
        Algorithm::Dbscan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AffinityPropagation => "affinity",
            Algorithm::Agglomerative => "agglo",
            Algorithm::Dbscan => "dbscan",
            Algorithm::MeanShift => "mean_shift",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean_shift" | "meanshift" => Ok(Algorithm::MeanShift),
            "affinity" | "affinity_propagation" => Ok(Algorithm::AffinityPropagation),
            "agglo" | "agglomerative" => Ok(Algorithm::Agglomerative),
            "dbscan" => Ok(Algorithm::Dbscan),
            other => Err(Error::InvalidConfig(format!(
                "unknown clustering algorithm `{other}`"
            ))),
        }
    }
}

/// One concrete hyperparameter setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ClusterParams {
    MeanShift { bandwidth: f64 },
    Affinity { preference: f64, damping: f64 },
    Agglomerative { k: usize, linkage: Linkage },
    Dbscan { eps: f64, min_pts: usize },
}

impl ClusterParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ClusterParams::MeanShift { .. } => Algorithm::MeanShift,
            ClusterParams::Affinity { .. } => Algorithm::AffinityPropagation,
            ClusterParams::Agglomerative { .. } => Algorithm::Agglomerative,
            ClusterParams::Dbscan { .. } => Algorithm::Dbscan,
        }
    }

    fn key(&self) -> [f64; 2] {
        match *self {
            ClusterParams::MeanShift { bandwidth } => [bandwidth, 0.0],
            ClusterParams::Affinity {
                preference,
                damping,
            } => [preference, damping],
            ClusterParams::Agglomerative { k, linkage } => [k as f64, linkage as u8 as f64],
            ClusterParams::Dbscan { eps, min_pts } => [eps, min_pts as f64],
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
    }
}

impl fmt::Display for ClusterParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterParams::MeanShift { bandwidth } => write!(f, "bandwidth={bandwidth}"),
            ClusterParams::Affinity {
                preference,
                damping,
            } => {
                write!(f, "preference={preference},damping={damping}")
            }
            ClusterParams::Agglomerative { k, linkage } => write!(f, "k={k},linkage={linkage}"),
            ClusterParams::Dbscan { eps, min_pts } => write!(f, "eps={eps},min_pts={min_pts}"),
        }
    }
}

/// Hyperparameter grid per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub mean_shift: Vec<f64>,
    pub affinity: Vec<(f64, f64)>,
    pub agglomerative: Vec<(usize, Linkage)>,
    pub dbscan: Vec<(f64, usize)>,
}

pub const DEFAULT_DAMPING: f64 = 0.5;

impl Sweep {
    /// Grids scaled to the point cloud: mean-shift bandwidths around the
    /// automatic value, affinity preferences at one and two times the median
    /// similarity, agglomerative `k` from 2 to 12, DBSCAN radii at the 10th,
    /// 25th and 50th percentile of pairwise distance.
    pub fn default_for(pts: &PointCloud) -> Self {
        let n = pts.n();
        if n < 2 {
            return Self {
                mean_shift: vec![1.0],
                affinity: vec![],
                agglomerative: vec![],
                dbscan: vec![],
            };
        }
        let dists = pts.sorted_pair_distances();
        let auto = 0.5 * quantile(&dists, 0.5);
        let mean_shift = if auto > 0.0 {
            vec![0.5 * auto, auto, 2.0 * auto]
        } else {
            vec![1.0]
        };
        let median = Preference::Median.resolve(pts);
        let affinity = vec![(median, DEFAULT_DAMPING), (2.0 * median, DEFAULT_DAMPING)];
        let agglomerative = (2..=12.min(n - 1)).map(|k| (k, Linkage::Average)).collect();
        let mut dbscan = Vec::new();
        for q in [0.10, 0.25, 0.50] {
            let eps = quantile(&dists, q);
            if eps > 0.0 {
                for min_pts in [3, 5] {
                    dbscan.push((eps, min_pts));
                }
            }
        }
        Self {
            mean_shift,
            affinity,
            agglomerative,
            dbscan,
        }
    }

    fn cells(&self, algorithms: &[Algorithm]) -> Vec<ClusterParams> {
        let mut out = Vec::new();
        for alg in algorithms {
            match alg {
                Algorithm::MeanShift => out.extend(
                    self.mean_shift
                        .iter()
                        .map(|&bandwidth| ClusterParams::MeanShift { bandwidth }),
                ),
                Algorithm::AffinityPropagation => {
                    out.extend(self.affinity.iter().map(|&(preference, damping)| {
                        ClusterParams::Affinity {
                            preference,
                            damping,
                        }
                    }))
                }
                Algorithm::Agglomerative => out.extend(
                    self.agglomerative
                        .iter()
                        .map(|&(k, linkage)| ClusterParams::Agglomerative { k, linkage }),
                ),
                Algorithm::Dbscan => out.extend(
                    self.dbscan
                        .iter()
                        .map(|&(eps, min_pts)| ClusterParams::Dbscan { eps, min_pts }),
                ),
            }
        }
        out
    }
}

/// Runs one grid cell.
pub fn run_cell(pts: &PointCloud, params: ClusterParams) -> (Partition, Option<bool>) {
    match params {
        ClusterParams::MeanShift { bandwidth } => {
            (mean_shift(pts, Bandwidth::Fixed(bandwidth)), None)
        }
        ClusterParams::Affinity {
            preference,
            damping,
        } => {
            let r = affinity_propagation(pts, Preference::Value(preference), damping);
            (r.partition, Some(r.converged))
        }
        ClusterParams::Agglomerative { k, linkage } => (agglomerative(pts, k, linkage), None),
        ClusterParams::Dbscan { eps, min_pts } => (dbscan(pts, eps, min_pts), None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub params: ClusterParams,
    pub partition: Partition,
    pub modularity: f64,
    /// Affinity propagation only.
    pub converged: Option<bool>,
}

impl Detection {
    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }
}

/// Clusters the embedding with every requested algorithm over its grid and
/// scores each result by modularity on `g`.
///
/// Results are ordered by modularity (descending), then algorithm name, then
/// parameters.
pub fn detect_communities(
    g: &Graph,
    e: &EmbeddingSet,
    algorithms: &[Algorithm],
    sweep: &Sweep,
) -> Result<Vec<Detection>> {
    if algorithms.is_empty() {
        return Err(Error::InvalidConfig(
            "no clustering algorithm requested".into(),
        ));
    }
    if e.n() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices, embedding has {} rows",
            g.n(),
            e.n()
        )));
    }
    let mut algorithms = algorithms.to_vec();
    algorithms.sort();
    algorithms.dedup();
    let pts = PointCloud::from_embedding(e);
    let mut out: Vec<Detection> = sweep
        .cells(&algorithms)
        .into_par_iter()
        .map(|params| {
            let (partition, converged) = run_cell(&pts, params);
            Detection {
                modularity: modularity(g, &partition),
                params,
                partition,
                converged,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.modularity
            .total_cmp(&a.modularity)
            .then_with(|| a.algorithm().name().cmp(b.algorithm().name()))
            .then_with(|| a.params.cmp_key(&b.params))
    });
    Ok(out)
}
