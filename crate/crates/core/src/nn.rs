//! Four-layer ReLU network with a sigmoid output, trained on summed binary
//! cross-entropy with exact backpropagation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before taking logs.
pub const PROB_EPS: f64 = 1e-12;

pub const DEFAULT_HIDDEN: [usize; 3] = [64, 32, 16];

const MODEL_FORMAT: &str = "covhess-mlp";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// `[D, h1, h2, h3, 1]`
    pub layer_dims: Vec<usize>,
    /// `weights[l]` maps layer `l` to layer `l + 1` and has shape `(out, in)`.
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Parameter-shaped gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model.weights.iter().map(|w| Matrix::zeros(w.rows(), w.cols())).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn clear(&mut self) {
        for w in &mut self.weights {
            w.scale_in_place(0.0);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    /// Flattened in the same order as [`MlpModel::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.as_slice());
            out.extend_from_slice(b);
        }
        out
    }
}

struct Trace {
    /// Layer inputs: `acts[0] = x`, `acts[l]` the post-ReLU output of layer `l - 1`.
    acts: Vec<Vec<f64>>,
    /// Pre-activations of every layer.
    pre: Vec<Vec<f64>>,
}

impl Trace {
    fn logit(&self) -> f64 {
        self.pre.last().map_or(0.0, |z| z[0])
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl MlpModel {
    /// Glorot-uniform weights and zero biases from a seeded generator.
    pub fn new(layer_dims: &[usize], seed: u64) -> Result<Self> {
        validate_dims(layer_dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in layer_dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let data = (0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect();
            weights.push(Matrix::from_vec(fan_out, fan_in, data)?);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(MlpModel { layer_dims: layer_dims.to_vec(), weights, biases, seed })
    }

    /// Every weight and bias zero; outputs 0.5 everywhere.
    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        validate_dims(layer_dims)?;
        let weights = layer_dims.windows(2).map(|w| Matrix::zeros(w[1], w[0])).collect();
        let biases = layer_dims[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(MlpModel { layer_dims: layer_dims.to_vec(), weights, biases, seed: 0 })
    }

    pub fn from_parameters(
        layer_dims: &[usize],
        weights: Vec<Matrix>,
        biases: Vec<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        validate_dims(layer_dims)?;
        if weights.len() != 4 || biases.len() != 4 {
            return Err(Error::dims("4 layers", weights.len().max(biases.len())));
        }
        for (l, w) in layer_dims.windows(2).enumerate() {
            if weights[l].shape() != (w[1], w[0]) {
                return Err(Error::dims(
                    format!("layer {l} weights {}x{}", w[1], w[0]),
                    format!("{:?}", weights[l].shape()),
                ));
            }
            if biases[l].len() != w[1] {
                return Err(Error::dims(format!("layer {l} bias of {}", w[1]), biases[l].len()));
            }
        }
        let model = MlpModel { layer_dims: layer_dims.to_vec(), weights, biases, seed };
        if !model.parameters().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "model parameters" });
        }
        Ok(model)
    }

    /// `[d, 64, 32, 16, 1]`
    pub fn default_dims(d: usize) -> Vec<usize> {
        layer_dims_for(d, &DEFAULT_HIDDEN)
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn num_parameters(&self) -> usize {
        self.layer_dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::dims(format!("input of length {}", self.input_dim()), x.len()));
        }
        Ok(())
    }

    fn trace(&self, x: &[f64]) -> Trace {
        let layers = self.weights.len();
        let mut acts = Vec::with_capacity(layers);
        let mut pre = Vec::with_capacity(layers);
        let mut a = x.to_vec();
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z: Vec<f64> = w.row_iter().zip(b).map(|(r, bi)| crate::linalg::dot(r, &a) + bi).collect();
            let next = if l + 1 < layers { z.iter().map(|&v| v.max(0.0)).collect() } else { Vec::new() };
            acts.push(std::mem::replace(&mut a, next));
            pre.push(z);
        }
        Trace { acts, pre }
    }

    /// Pre-sigmoid output.
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.trace(x).logit())
    }

    /// Probability of class 1, clamped to `[PROB_EPS, 1 - PROB_EPS]`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?).clamp(PROB_EPS, 1.0 - PROB_EPS))
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.row_iter().map(|r| self.forward(r)).collect()
    }

    /// `−log p(label | x)` with clamped probability.
    pub fn sample_loss(&self, x: &[f64], label: u8) -> Result<f64> {
        let z = self.logit(x)?;
        Ok(nll_from_logit(z, label))
    }

    /// Summed negative log-likelihood over the dataset.
    pub fn bce_loss(&self, data: &Dataset) -> Result<f64> {
        if data.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for (r, &c) in data.features.row_iter().zip(&data.labels) {
            total += self.sample_loss(r, c)?;
        }
        Ok(total)
    }

    /// Backpropagates one sample into `grads`; returns the input gradient
    /// when `want_input` is set.
    fn backprop(&self, x: &[f64], label: u8, grads: Option<&mut Gradients>, want_input: bool) -> Vec<f64> {
        let t = self.trace(x);
        let p = sigmoid(t.logit());
        let mut delta = vec![p - f64::from(label)];
        let mut grads = grads;
        for l in (0..self.weights.len()).rev() {
            if let Some(g) = grads.as_deref_mut() {
                g.weights[l].add_outer(1.0, &delta, &t.acts[l]);
                for (gb, d) in g.biases[l].iter_mut().zip(&delta) {
                    *gb += d;
                }
            }
            if l == 0 && !want_input {
                break;
            }
            // Wᵀ δ
            let mut back = vec![0.0; self.layer_dims[l]];
            for (row, &d) in self.weights[l].row_iter().zip(&delta) {
                if d == 0.0 {
                    continue;
                }
                for (o, &w) in back.iter_mut().zip(row) {
                    *o += w * d;
                }
            }
            if l == 0 {
                return back;
            }
            for (b, &z) in back.iter_mut().zip(&t.pre[l - 1]) {
                if z <= 0.0 {
                    *b = 0.0;
                }
            }
            delta = back;
        }
        Vec::new()
    }

    /// Exact gradient of the summed loss over `batch` with respect to all parameters.
    pub fn grad_params(&self, batch: &Matrix, labels: &[u8]) -> Result<Gradients> {
        if batch.rows() != labels.len() {
            return Err(Error::LengthMismatch { left: batch.rows(), right: labels.len() });
        }
        if batch.cols() != self.input_dim() {
            return Err(Error::dims(format!("{} columns", self.input_dim()), batch.cols()));
        }
        let mut g = Gradients::zeros_like(self);
        for (r, &c) in batch.row_iter().zip(labels) {
            self.backprop(r, c, Some(&mut g), false);
        }
        Ok(g)
    }

    /// Gradient of `−log p(label | x)` with respect to the input vector.
    pub fn grad_input(&self, x: &[f64], label: u8) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.backprop(x, label, None, true))
    }

    /// All parameters flattened layer by layer: weights row-major, then biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.as_slice());
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_parameters() {
            return Err(Error::dims(format!("{} parameters", self.num_parameters()), params.len()));
        }
        let mut it = params.iter().copied();
        self.for_each_param_mut(|_, v| *v = it.next().unwrap_or(0.0));
        Ok(())
    }

    fn for_each_param_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut k = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            for i in 0..w.rows() {
                for v in w.row_mut(i) {
                    f(k, v);
                    k += 1;
                }
            }
            for v in b.iter_mut() {
                f(k, v);
                k += 1;
            }
        }
    }

    pub fn to_document(&self, config: Option<&TrainConfig>) -> ModelDocument {
        ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            layer_dims: self.layer_dims.clone(),
            weights: self.weights.iter().map(|w| w.as_slice().to_vec()).collect(),
            biases: self.biases.clone(),
            seed: self.seed,
            config: config.cloned(),
        }
    }

    pub fn to_json(&self, config: Option<&TrainConfig>) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document(config))?)
    }

    pub fn from_json(s: &str) -> Result<(Self, Option<TrainConfig>)> {
        let doc: ModelDocument = serde_json::from_str(s)?;
        doc.into_model()
    }
}

fn nll_from_logit(z: f64, label: u8) -> f64 {
    let p = if label == 1 { sigmoid(z) } else { sigmoid(-z) };
    -p.clamp(PROB_EPS, 1.0 - PROB_EPS).ln()
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.len() != 5 {
        return Err(Error::dims("5 layer sizes", dims.len()));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument("layer sizes must be positive".into()));
    }
    if dims[4] != 1 {
        return Err(Error::InvalidArgument("output layer must have one unit".into()));
    }
    Ok(())
}

pub fn layer_dims_for(d: usize, hidden: &[usize; 3]) -> Vec<usize> {
    vec![d, hidden[0], hidden[1], hidden[2], 1]
}

/// Versioned on-disk form of [`MlpModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub layer_dims: Vec<usize>,
    /// Row-major `(out, in)` weight arrays per layer.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<TrainConfig>,
}

impl ModelDocument {
    pub fn into_model(self) -> Result<(MlpModel, Option<TrainConfig>)> {
        if self.format != MODEL_FORMAT || self.version != MODEL_VERSION {
            return Err(Error::Serde(format!(
                "unsupported model document {} v{}",
                self.format, self.version
            )));
        }
        validate_dims(&self.layer_dims)?;
        if self.weights.len() != 4 {
            return Err(Error::dims("4 weight arrays", self.weights.len()));
        }
        let weights = self
            .layer_dims
            .windows(2)
            .zip(self.weights)
            .map(|(w, data)| Matrix::from_vec(w[1], w[0], data))
            .collect::<Result<Vec<_>>>()?;
        let model = MlpModel::from_parameters(&self.layer_dims, weights, self.biases, self.seed)?;
        Ok((model, self.config))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: Optimizer::default(),
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Summed training loss before any update.
    pub initial_loss: f64,
    /// Summed training loss after each epoch.
    pub epoch_losses: Vec<f64>,
    pub final_loss: f64,
}

/// Mini-batch training on the summed loss. Deterministic for a fixed
/// `config.seed`; the model keeps its own initialization seed.
pub fn train(model: &MlpModel, data: &Dataset, config: &TrainConfig) -> Result<(MlpModel, TrainReport)> {
    config.validate()?;
    if data.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    if data.dim() != model.input_dim() {
        return Err(Error::dims(format!("{} features", model.input_dim()), data.dim()));
    }

    let mut model = model.clone();
    let initial_loss = model.bce_loss(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_params = model.num_parameters();
    let mut m = vec![0.0; n_params];
    let mut v = vec![0.0; n_params];
    let mut step = 0i32;
    let mut grads = Gradients::zeros_like(&model);
    let mut order: Vec<usize> = (0..data.n()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for batch in order.chunks(config.batch_size) {
            grads.clear();
            for &i in batch {
                model.backprop(data.features.row(i), data.labels[i], Some(&mut grads), false);
            }
            let g = grads.flatten();
            step += 1;
            let lr = config.learning_rate;
            match config.optimizer {
                Optimizer::Sgd => model.for_each_param_mut(|k, p| *p -= lr * g[k]),
                Optimizer::Adam { beta1, beta2, eps } => {
                    let c1 = 1.0 - beta1.powi(step);
                    let c2 = 1.0 - beta2.powi(step);
                    model.for_each_param_mut(|k, p| {
                        m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                        v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                        *p -= lr * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
                    });
                }
            }
        }
        let loss = model.bce_loss(data)?;
        if !loss.is_finite() || !model.parameters().iter().all(|p| p.is_finite()) {
            return Err(Error::DivergedLoss { epoch });
        }
        epoch_losses.push(loss);
    }
    let final_loss = epoch_losses.last().copied().unwrap_or(initial_loss);
    Ok((model, TrainReport { initial_loss, epoch_losses, final_loss }))
}
