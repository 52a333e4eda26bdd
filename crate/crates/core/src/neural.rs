//! Embeddings as a learned function of distance-matrix columns.
//!
//! A tanh multilayer perceptron maps column `j` of the (scaled) distance
//! matrix to the embedding of vertex `j`. The network weights, and optionally
//! `κ`, are trained on the same pairwise stress used for direct fitting.
//! Gradients are computed by hand: the pairwise stress gradient with respect
//! to the embeddings is pulled back through the network layer by layer.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{
    initial_kappa, stress_gradient, Adam, EmbeddingSet, Kappa, LossKind, OptimConfig,
};
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
}

/// Weights and biases of a fully connected network; `weights[l]` has shape
/// `(layer_sizes[l + 1], layer_sizes[l])`. The output layer is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    layer_sizes: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    activation: Activation,
}

impl MlpParams {
    pub fn zeros(layer_sizes: &[usize]) -> Self {
        assert!(
            layer_sizes.len() >= 2,
            "need at least input and output sizes"
        );
        let weights = layer_sizes
            .windows(2)
            .map(|w| Array2::zeros((w[1], w[0])))
            .collect();
        let biases = layer_sizes[1..].iter().map(|&s| Array1::zeros(s)).collect();
        Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            activation: Activation::Tanh,
        }
    }

    /// Xavier-uniform weights, zero biases.
    pub fn xavier<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Self {
        let mut p = Self::zeros(layer_sizes);
        for w in &mut p.weights {
            let (fan_out, fan_in) = w.dim();
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            w.mapv_inplace(|_| rng.random_range(-a..a));
        }
        p
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(Array2::len).sum::<usize>()
            + self.biases.iter().map(Array1::len).sum::<usize>()
    }

    fn is_finite(&self) -> bool {
        self.weights.iter().flatten().all(|x| x.is_finite())
            && self.biases.iter().flatten().all(|x| x.is_finite())
    }

    /// Activations of every layer for a batch of inputs (one per row).
    /// Entry 0 is the input itself; the last entry is the linear output.
    fn forward_trace(&self, inputs: ArrayView2<'_, f64>) -> Vec<Array2<f64>> {
        assert_eq!(inputs.ncols(), self.input_dim(), "input width mismatch");
        let last = self.weights.len() - 1;
        let mut acts = Vec::with_capacity(self.weights.len() + 1);
        acts.push(inputs.to_owned());
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = acts[l].dot(&w.t());
            z += b;
            if l < last {
                z.mapv_inplace(f64::tanh);
            }
            acts.push(z);
        }
        acts
    }

    /// Applies the network to each row of `inputs`.
    pub fn forward_batch(&self, inputs: ArrayView2<'_, f64>) -> Array2<f64> {
        self.forward_trace(inputs).pop().unwrap()
    }
}

/// Embedding of one scaled distance column.
///
/// # Panics
/// If `column.len()` differs from the network's input size.
pub fn mlp_forward(params: &MlpParams, column: ArrayView1<'_, f64>) -> Array1<f64> {
    assert_eq!(column.len(), params.input_dim(), "column length mismatch");
    let batch = column.insert_axis(Axis(0));
    params.forward_batch(batch).row(0).to_owned()
}

/// Scaled network inputs: row `j` holds column `j` of `d` divided by `scale`.
pub fn network_inputs(d: &DistanceMatrix, scale: f64) -> Array2<f64> {
    // the matrix is symmetric, so rows and columns coincide
    d.as_array().mapv(|x| x / scale)
}

#[derive(Debug, Clone)]
pub struct MlpGradient {
    pub value: f64,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    /// `∂stress/∂α`; zero when `κ` is fixed.
    pub alpha: f64,
}

/// Exact gradient of the network objective with respect to all weights and `α`.
pub fn mlp_gradient(
    params: &MlpParams,
    inputs: ArrayView2<'_, f64>,
    d: &DistanceMatrix,
    loss: LossKind,
    kappa: Kappa,
    epsilon: f64,
) -> MlpGradient {
    let acts = params.forward_trace(inputs);
    let embedding = acts.last().unwrap();
    let sg = stress_gradient(embedding.view(), kappa, d, loss, epsilon);

    let layers = params.weights.len();
    let mut dw = vec![Array2::zeros((0, 0)); layers];
    let mut db = vec![Array1::zeros(0); layers];
    let mut delta = sg.coords;
    for l in (0..layers).rev() {
        dw[l] = delta.t().dot(&acts[l]);
        db[l] = delta.sum_axis(Axis(0));
        if l > 0 {
            let mut back = delta.dot(&params.weights[l]);
            back.zip_mut_with(&acts[l], |g, &a| *g *= 1.0 - a * a);
            delta = back;
        }
    }
    MlpGradient {
        value: sg.value,
        weights: dw,
        biases: db,
        alpha: sg.alpha,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralConfig {
    pub optim: OptimConfig,
    pub hidden: Vec<usize>,
    /// Divisor for distance columns; `None` uses the largest distance.
    pub input_scale: Option<f64>,
}

impl Default for NeuralConfig {
    fn default() -> Self {
        Self {
            optim: OptimConfig {
                learning_rate: 1e-3,
                ..OptimConfig::default()
            },
            hidden: vec![128, 128],
            input_scale: None,
        }
    }
}

impl NeuralConfig {
    pub fn validate(&self) -> Result<()> {
        self.optim.validate()?;
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::InvalidConfig(
                "hidden sizes must be non-empty and positive".into(),
            ));
        }
        if let Some(s) = self.input_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "input scale must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NeuralFit {
    pub params: MlpParams,
    pub input_scale: f64,
    pub embedding: EmbeddingSet,
    pub loss_trace: Vec<f64>,
    pub stress: f64,
}

impl NeuralFit {
    pub fn model(&self) -> NeuralModel {
        NeuralModel {
            params: self.params.clone(),
            input_scale: self.input_scale,
            kappa: self.embedding.kappa(),
        }
    }
}

/// Trains the network on the full pair set with Adam.
///
/// The best iterate seen is returned, so the returned stress never exceeds
/// the value at iteration 0.
pub fn train_neural(d: &DistanceMatrix, cfg: &NeuralConfig) -> Result<NeuralFit> {
    cfg.validate()?;
    let n = d.n();
    let opt = &cfg.optim;
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
    let mut sizes = Vec::with_capacity(cfg.hidden.len() + 2);
    sizes.push(n);
    sizes.extend(&cfg.hidden);
    sizes.push(opt.dim);
    let mut params = MlpParams::xavier(&sizes, &mut rng);
    let scale = cfg.input_scale.unwrap_or_else(|| d.max().max(1.0));
    let inputs = network_inputs(d, scale);
    let mut kappa = initial_kappa(opt.kappa);

    let mut w_opt: Vec<Adam> = params
        .weights
        .iter()
        .map(|w| Adam::new(w.len(), opt.learning_rate))
        .collect();
    let mut b_opt: Vec<Adam> = params
        .biases
        .iter()
        .map(|b| Adam::new(b.len(), opt.learning_rate))
        .collect();
    let mut alpha_opt = Adam::new(1, opt.kappa_learning_rate);

    let mut trace = Vec::with_capacity(opt.iterations + 1);
    let mut best: Option<(f64, MlpParams, Kappa)> = None;
    for iteration in 0..=opt.iterations {
        let grad = mlp_gradient(&params, inputs.view(), d, opt.loss, kappa, opt.epsilon);
        if !grad.value.is_finite() || !params.is_finite() {
            return Err(Error::NonFiniteLoss { iteration });
        }
        trace.push(grad.value);
        if best.as_ref().is_none_or(|(v, _, _)| grad.value < *v) {
            best = Some((grad.value, params.clone(), kappa));
        }
        if iteration == opt.iterations {
            break;
        }
        for ((w, g), a) in params.weights.iter_mut().zip(&grad.weights).zip(&mut w_opt) {
            a.step(w.as_slice_mut().unwrap(), g.as_slice().unwrap());
        }
        for ((b, g), a) in params.biases.iter_mut().zip(&grad.biases).zip(&mut b_opt) {
            a.step(b.as_slice_mut().unwrap(), g.as_slice().unwrap());
        }
        if let Kappa::Learned { alpha } = &mut kappa {
            let mut a = [*alpha];
            alpha_opt.step(&mut a, &[grad.alpha]);
            *alpha = a[0];
        }
    }

    let (value, params, kappa) = best.expect("at least one evaluation");
    let coords = params.forward_batch(inputs.view());
    Ok(NeuralFit {
        embedding: EmbeddingSet::new(coords, kappa.value())?,
        params,
        input_scale: scale,
        loss_trace: trace,
        stress: value,
    })
}

/// A trained network together with what is needed to reapply it.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralModel {
    pub params: MlpParams,
    pub input_scale: f64,
    pub kappa: f64,
}

pub const MODEL_FORMAT: &str = "gek-mlp";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    activation: Activation,
    layer_sizes: Vec<usize>,
    /// Row-major `(out, in)` matrices.
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    input_scale: f64,
    kappa: f64,
}

impl NeuralModel {
    /// Embeds every vertex of `d`.
    pub fn embed(&self, d: &DistanceMatrix) -> Result<EmbeddingSet> {
        if d.n() != self.params.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} vertices, graph has {}",
                self.params.input_dim(),
                d.n()
            )));
        }
        let coords = self
            .params
            .forward_batch(network_inputs(d, self.input_scale).view());
        EmbeddingSet::new(coords, self.kappa)
    }

    pub fn to_json(&self) -> Result<String> {
        let p = &self.params;
        let file = ModelFile {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_VERSION,
            activation: p.activation,
            layer_sizes: p.layer_sizes.clone(),
            weights: p
                .weights
                .iter()
                .map(|w| w.outer_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: p.biases.iter().map(|b| b.to_vec()).collect(),
            input_scale: self.input_scale,
            kappa: self.kappa,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unexpected format `{}`", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported version {}",
                file.version
            )));
        }
        let sizes = &file.layer_sizes;
        if sizes.len() < 2
            || file.weights.len() != sizes.len() - 1
            || file.biases.len() != sizes.len() - 1
        {
            return Err(Error::Model("layer count mismatch".into()));
        }
        let mut params = MlpParams::zeros(sizes);
        params.activation = file.activation;
        for (l, rows) in file.weights.iter().enumerate() {
            let (out, inp) = (sizes[l + 1], sizes[l]);
            if rows.len() != out || rows.iter().any(|r| r.len() != inp) {
                return Err(Error::Model(format!("layer {l} weight shape mismatch")));
            }
            params.weights[l] = Array2::from_shape_vec((out, inp), rows.concat())
                .map_err(|e| Error::Model(e.to_string()))?;
            if file.biases[l].len() != out {
                return Err(Error::Model(format!("layer {l} bias length mismatch")));
            }
            params.biases[l] = Array1::from(file.biases[l].clone());
        }
        if !params.is_finite() {
            return Err(Error::Model("non-finite parameter".into()));
        }
        Ok(Self {
            params,
            input_scale: file.input_scale,
            kappa: file.kappa,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
