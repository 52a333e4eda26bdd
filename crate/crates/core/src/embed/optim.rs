use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{
    alpha_of_kappa, kappa_in_range, sampled_gradient, stress_gradient, stress_of, Adam,
    EmbeddingSet, Kappa, LossKind, DEFAULT_EPSILON, KAPPA_MAX, KAPPA_MIN,
};
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

/// Largest number of unordered pairs handled as a full batch under
/// [`PairBatch::Auto`].
pub const FULL_BATCH_LIMIT: usize = 131_072;
pub const AUTO_MINIBATCH: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaMode {
    Fixed(f64),
    Learned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBatch {
    /// All pairs up to [`FULL_BATCH_LIMIT`], otherwise [`AUTO_MINIBATCH`] sampled pairs.
    Auto,
    All,
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    pub loss: LossKind,
    pub kappa: KappaMode,
    pub dim: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub kappa_learning_rate: f64,
    pub pair_batch: PairBatch,
    pub seed: u64,
    pub epsilon: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            loss: LossKind::Absolute,
            kappa: KappaMode::Fixed(1.0),
            dim: 2,
            iterations: 2000,
            learning_rate: 0.05,
            kappa_learning_rate: 0.01,
            pair_batch: PairBatch::Auto,
            seed: 42,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim == 0 {
            return bad("embedding dimension must be at least 1".into());
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if !(self.kappa_learning_rate > 0.0 && self.kappa_learning_rate.is_finite()) {
            return bad(format!(
                "kappa learning rate must be positive, got {}",
                self.kappa_learning_rate
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            ));
        }
        if let KappaMode::Fixed(k) = self.kappa {
            if !kappa_in_range(k) {
                return bad(format!("kappa {k} outside [{KAPPA_MIN}, {KAPPA_MAX}]"));
            }
        }
        if self.pair_batch == PairBatch::Sampled(0) {
            return bad("pair batch must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn batch_size(&self, n: usize) -> Option<usize> {
        let pairs = n * n.saturating_sub(1) / 2;
        match self.pair_batch {
            PairBatch::All => None,
            PairBatch::Auto if pairs <= FULL_BATCH_LIMIT => None,
            PairBatch::Auto => Some(AUTO_MINIBATCH),
            PairBatch::Sampled(b) if b >= pairs => None,
            PairBatch::Sampled(b) => Some(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DirectFit {
    pub embedding: EmbeddingSet,
    /// Objective at the start of each iteration, then once more after the last update.
    pub loss_trace: Vec<f64>,
    /// Full-batch objective (with the configured smoothing) of `embedding`.
    pub stress: f64,
}

pub(crate) fn initial_kappa(mode: KappaMode) -> Kappa {
    match mode {
        KappaMode::Fixed(k) => Kappa::Fixed(k),
        KappaMode::Learned => Kappa::Learned {
            alpha: alpha_of_kappa(1.0),
        },
    }
}

pub(crate) fn sample_pairs(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<(usize, usize)> {
    (0..count)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect()
}

/// Fits embeddings directly with Adam from a seeded Gaussian start.
///
/// In full-batch mode the best iterate seen is returned, so the final stress
/// never exceeds the initial one.
pub fn optimize_direct(d: &DistanceMatrix, cfg: &OptimConfig) -> Result<DirectFit> {
    cfg.validate()?;
    let n = d.n();
    let m = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std = (d.max() / (2.0 * (m as f64).sqrt())).max(f64::MIN_POSITIVE);
    let normal = Normal::new(0.0, std).expect("positive standard deviation");
    let mut coords = Array2::from_shape_simple_fn((n, m), || normal.sample(&mut rng));
    let mut kappa = initial_kappa(cfg.kappa);

    if n < 2 {
        return Ok(DirectFit {
            embedding: EmbeddingSet::new(coords, kappa.value())?,
            loss_trace: vec![0.0],
            stress: 0.0,
        });
    }

    let batch = cfg.batch_size(n);
    let mut coord_opt = Adam::new(n * m, cfg.learning_rate);
    let mut alpha_opt = Adam::new(1, cfg.kappa_learning_rate);
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut best: Option<(f64, Array2<f64>, Kappa)> = None;

    for iteration in 0..cfg.iterations {
        let grad = match batch {
            None => stress_gradient(coords.view(), kappa, d, cfg.loss, cfg.epsilon),
            Some(b) => {
                let pairs = sample_pairs(&mut rng, n, b);
                sampled_gradient(coords.view(), kappa, d, cfg.loss, cfg.epsilon, &pairs)
            }
        };
        if !grad.value.is_finite() || grad.coords.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { iteration });
        }
        trace.push(grad.value);
        if batch.is_none() && best.as_ref().is_none_or(|(v, _, _)| grad.value < *v) {
            best = Some((grad.value, coords.clone(), kappa));
        }

        coord_opt.step(
            coords.as_slice_mut().expect("standard layout"),
            grad.coords.as_slice().expect("standard layout"),
        );
        if let Kappa::Learned { alpha } = &mut kappa {
            let mut a = [*alpha];
            alpha_opt.step(&mut a, &[grad.alpha]);
            *alpha = a[0];
        }
    }

    let last = stress_of(coords.view(), kappa.value(), d, cfg.loss, cfg.epsilon);
    if !last.is_finite() {
        return Err(Error::NonFiniteLoss {
            iteration: cfg.iterations,
        });
    }
    trace.push(last);
    let (coords, kappa, value) = match best {
        Some((v, c, k)) if v < last => (c, k, v),
        _ => (coords, kappa, last),
    };
    Ok(DirectFit {
        embedding: EmbeddingSet::new(coords, kappa.value())?,
        loss_trace: trace,
        stress: value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::stress;
    use crate::graph::{apsp, Graph};

    fn cycle4() -> DistanceMatrix {
        apsp(&Graph::from_unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap())
    }

    #[test]
    fn config_validation() {
        let ok = OptimConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            OptimConfig {
                iterations: 0,
                ..ok.clone()
            },
            OptimConfig {
                learning_rate: 0.0,
                ..ok.clone()
            },
            OptimConfig {
                dim: 0,
                ..ok.clone()
            },
            OptimConfig {
                kappa: KappaMode::Fixed(3.0),
                ..ok.clone()
            },
            OptimConfig {
                kappa: KappaMode::Fixed(0.01),
                ..ok.clone()
            },
            OptimConfig {
                pair_batch: PairBatch::Sampled(0),
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn batch_rule() {
        let cfg = OptimConfig::default();
        assert_eq!(cfg.batch_size(100), None);
        assert_eq!(cfg.batch_size(512), None);
        assert_eq!(cfg.batch_size(513), Some(AUTO_MINIBATCH));
        assert_eq!(cfg.batch_size(600), Some(AUTO_MINIBATCH));
        let all = OptimConfig {
            pair_batch: PairBatch::All,
            ..cfg.clone()
        };
        assert_eq!(all.batch_size(5000), None);
        let small = OptimConfig {
            pair_batch: PairBatch::Sampled(4),
            ..cfg
        };
        assert_eq!(small.batch_size(3), None);
        assert_eq!(small.batch_size(10), Some(4));
    }

    #[test]
    fn triangle_embeds_exactly() {
        let d = apsp(&Graph::from_unweighted(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        let cfg = OptimConfig {
            seed: 1,
            ..Default::default()
        };
        let fit = optimize_direct(&d, &cfg).unwrap();
        assert!(fit.stress < 1e-6, "{}", fit.stress);
        let exact = stress(&fit.embedding, &d, LossKind::Absolute, 0.0);
        assert!(exact < 1e-6);
    }

    #[test]
    fn square_learns_kappa_two() {
        let d = cycle4();
        for seed in [1, 2, 3] {
            let cfg = OptimConfig {
                kappa: KappaMode::Learned,
                seed,
                ..Default::default()
            };
            let fit = optimize_direct(&d, &cfg).unwrap();
            let k = fit.embedding.kappa();
            assert!(fit.stress < 1e-3, "seed {seed}: {}", fit.stress);
            assert!((1.8..=2.0).contains(&k), "seed {seed}: kappa {k}");
        }
    }

    #[test]
    fn final_never_exceeds_initial_and_is_reproducible() {
        let d = cycle4();
        let cfg = OptimConfig {
            loss: LossKind::Relative,
            kappa: KappaMode::Learned,
            iterations: 300,
            seed: 9,
            ..Default::default()
        };
        let a = optimize_direct(&d, &cfg).unwrap();
        let b = optimize_direct(&d, &cfg).unwrap();
        assert!(a.stress <= a.loss_trace[0]);
        assert_eq!(a.loss_trace.len(), 301);
        assert_eq!(a.embedding, b.embedding);
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn minibatch_path_runs() {
        let d = cycle4();
        let cfg = OptimConfig {
            pair_batch: PairBatch::Sampled(3),
            iterations: 500,
            kappa: KappaMode::Learned,
            ..Default::default()
        };
        let fit = optimize_direct(&d, &cfg).unwrap();
        assert!(fit.loss_trace.iter().all(|x| x.is_finite()));
        assert!(*fit.loss_trace.last().unwrap() < fit.loss_trace[0]);
    }

    #[test]
    fn divergence_is_reported() {
        let d = cycle4();
        let cfg = OptimConfig {
            learning_rate: 1e300,
            iterations: 50,
            ..Default::default()
        };
        match optimize_direct(&d, &cfg) {
            Err(Error::NonFiniteLoss { iteration }) => assert!(iteration < 50),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
