//! A stackable recurrent network for sequence regression.
//!
//! Each recurrent layer applies one shared parameter set at every time step:
//! the state update is `s_t = tanh(U * x_t + W * s_(t-1) + b)` with a zero
//! initial state, deeper layers reading the layer below, and a readout
//! `o_t = V * s_t + c` (optionally softmax). Gradients come from full,
//! untruncated backpropagation through time over a sample's window, with a
//! central-finite-difference twin ([`RnnModel::finite_diff_gradients`]) kept
//! around as an independent check on the analytic path. Training is plain
//! per-sample gradient descent with seeded shuffling and early stopping on
//! validation loss.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use libm::{exp, fabs, sqrt, tanh};

use crate::matrix::Matrix;
use crate::metrics;
use crate::rng::SplitMix64;
use crate::series::SampleSet;

/// How the readout layer presents its activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OutputMode {
    /// Raw affine readout; the regression default.
    Linear,
    /// Softmax over the readout. Degenerate for one output unit (always 1),
    /// kept as a selectable mode.
    Softmax,
}

/// Network architecture. The hidden activation is always tanh, which keeps
/// states bounded on non-stationary inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub output_mode: OutputMode,
}

impl NetSpec {
    pub fn new(
        input_dim: usize,
        hidden_dims: Vec<usize>,
        output_dim: usize,
        output_mode: OutputMode,
    ) -> Result<Self, RnnError> {
        let spec = Self { input_dim, hidden_dims, output_dim, output_mode };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), RnnError> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(RnnError::BadSpec("input and output dims must be at least 1"));
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            return Err(RnnError::BadSpec("hidden_dims must be non-empty with sizes >= 1"));
        }
        Ok(())
    }

    /// Input width of recurrent layer `layer`.
    fn layer_input_dim(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.hidden_dims[layer - 1]
        }
    }

    /// Total number of parameters a model of this shape carries.
    pub fn param_count(&self) -> usize {
        let mut count = 0;
        for (layer, &h) in self.hidden_dims.iter().enumerate() {
            count += h * self.layer_input_dim(layer) + h * h + h;
        }
        let last = *self.hidden_dims.last().expect("validated non-empty");
        count + self.output_dim * last + self.output_dim
    }
}

/// Parameters of one recurrent layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// Input-to-hidden weights, `hidden x layer_input`.
    pub input_weights: Matrix,
    /// Hidden-to-hidden weights, `hidden x hidden`.
    pub recurrent_weights: Matrix,
    /// Hidden bias.
    pub bias: Vec<f64>,
}

impl LayerParams {
    fn zeros(hidden: usize, input: usize) -> Self {
        Self {
            input_weights: Matrix::zeros(hidden, input),
            recurrent_weights: Matrix::zeros(hidden, hidden),
            bias: vec![0.0; hidden],
        }
    }
}

/// A recurrent network: per-layer parameters plus the readout.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnModel {
    spec: NetSpec,
    layers: Vec<LayerParams>,
    output_weights: Matrix,
    output_bias: Vec<f64>,
}

/// Loss gradients, shaped exactly like the model's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerParams>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

impl Gradients {
    fn zeros_for(spec: &NetSpec) -> Self {
        let layers = spec
            .hidden_dims
            .iter()
            .enumerate()
            .map(|(layer, &h)| LayerParams::zeros(h, spec.layer_input_dim(layer)))
            .collect();
        let last = *spec.hidden_dims.last().expect("validated non-empty");
        Self {
            layers,
            output_weights: Matrix::zeros(spec.output_dim, last),
            output_bias: vec![0.0; spec.output_dim],
        }
    }

    /// All gradient entries in the model's flat parameter order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in &self.layers {
            flat.extend_from_slice(layer.input_weights.data());
            flat.extend_from_slice(layer.recurrent_weights.data());
            flat.extend_from_slice(&layer.bias);
        }
        flat.extend_from_slice(self.output_weights.data());
        flat.extend_from_slice(&self.output_bias);
        flat
    }
}

/// Per-step results of a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// One output vector per time step.
    pub outputs: Vec<Vec<f64>>,
    /// `hidden_states[layer][step]` is that layer's state after the step.
    pub hidden_states: Vec<Vec<Vec<f64>>>,
}

/// Gradient-descent training settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Shuffle sample order each epoch (deterministically from `seed`).
    pub shuffle: bool,
    /// Consecutive epochs without validation improvement tolerated before
    /// stopping. Set it at or above `epochs` to disable early stopping.
    pub early_stop_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.01, epochs: 100, seed: 0, shuffle: true, early_stop_patience: 10 }
    }
}

/// Train and validation MSE after one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochLoss {
    pub train_mse: f64,
    pub val_mse: f64,
}

impl RnnModel {
    /// Initializes a model with weights drawn uniformly from
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` per matrix and zero biases.
    /// Deterministic for a given seed.
    pub fn init(spec: NetSpec, seed: u64) -> Result<Self, RnnError> {
        spec.validate()?;
        let mut rng = SplitMix64::new(seed);
        let mut draw = |rows: usize, cols: usize, fan_in: usize| {
            let bound = 1.0 / sqrt(fan_in as f64);
            let data = (0..rows * cols).map(|_| rng.next_range(-bound, bound)).collect();
            Matrix::from_vec(rows, cols, data)
        };
        let mut layers = Vec::with_capacity(spec.hidden_dims.len());
        for (layer, &h) in spec.hidden_dims.iter().enumerate() {
            let input = spec.layer_input_dim(layer);
            layers.push(LayerParams {
                input_weights: draw(h, input, input),
                recurrent_weights: draw(h, h, h),
                bias: vec![0.0; h],
            });
        }
        let last = *spec.hidden_dims.last().expect("validated non-empty");
        let output_weights = draw(spec.output_dim, last, last);
        let output_bias = vec![0.0; spec.output_dim];
        Ok(Self { spec, layers, output_weights, output_bias })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn output_weights(&self) -> &Matrix {
        &self.output_weights
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.output_bias
    }

    /// Every parameter, flattened as: per layer `U` (row-major), `W`
    /// (row-major), bias; then the output weights (row-major) and output
    /// bias. Checkpoints and the finite-difference oracle rely on this
    /// order.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.spec.param_count());
        for layer in &self.layers {
            flat.extend_from_slice(layer.input_weights.data());
            flat.extend_from_slice(layer.recurrent_weights.data());
            flat.extend_from_slice(&layer.bias);
        }
        flat.extend_from_slice(self.output_weights.data());
        flat.extend_from_slice(&self.output_bias);
        flat
    }

    /// Rebuilds a model from [`RnnModel::flat_params`] output.
    pub fn from_flat_params(spec: NetSpec, flat: &[f64]) -> Result<Self, RnnError> {
        spec.validate()?;
        let expected = spec.param_count();
        if flat.len() != expected {
            return Err(RnnError::BadParamCount { expected, got: flat.len() });
        }
        let mut cursor = 0;
        let mut take = |count: usize| {
            let slice = &flat[cursor..cursor + count];
            cursor += count;
            slice.to_vec()
        };
        let mut layers = Vec::with_capacity(spec.hidden_dims.len());
        for (layer, &h) in spec.hidden_dims.iter().enumerate() {
            let input = spec.layer_input_dim(layer);
            layers.push(LayerParams {
                input_weights: Matrix::from_vec(h, input, take(h * input)),
                recurrent_weights: Matrix::from_vec(h, h, take(h * h)),
                bias: take(h),
            });
        }
        let last = *spec.hidden_dims.last().expect("validated non-empty");
        let output_weights = Matrix::from_vec(spec.output_dim, last, take(spec.output_dim * last));
        let output_bias = take(spec.output_dim);
        Ok(Self { spec, layers, output_weights, output_bias })
    }

    fn check_sequence(&self, sequence: &[Vec<f64>]) -> Result<(), RnnError> {
        if sequence.is_empty() {
            return Err(RnnError::EmptySequence);
        }
        for step in sequence {
            if step.len() != self.spec.input_dim {
                return Err(RnnError::ShapeMismatch {
                    expected: self.spec.input_dim,
                    got: step.len(),
                });
            }
        }
        Ok(())
    }

    /// Runs the recurrence over a sequence, returning per-step outputs and
    /// every layer's state trajectory. The same parameters are applied at
    /// every step; initial states are zero.
    pub fn forward(&self, sequence: &[Vec<f64>]) -> Result<ForwardPass, RnnError> {
        self.check_sequence(sequence)?;
        let steps = sequence.len();
        let mut hidden_states: Vec<Vec<Vec<f64>>> =
            self.layers.iter().map(|_| Vec::with_capacity(steps)).collect();
        let mut outputs = Vec::with_capacity(steps);
        for (t, step_input) in sequence.iter().enumerate() {
            let mut layer_input = step_input.clone();
            for (layer_idx, layer) in self.layers.iter().enumerate() {
                let mut pre = layer.input_weights.mul_vec(&layer_input);
                if t > 0 {
                    let recur = layer.recurrent_weights.mul_vec(&hidden_states[layer_idx][t - 1]);
                    for (p, r) in pre.iter_mut().zip(recur) {
                        *p += r;
                    }
                }
                for (p, b) in pre.iter_mut().zip(&layer.bias) {
                    *p = tanh(*p + b);
                }
                layer_input = pre.clone();
                hidden_states[layer_idx].push(pre);
            }
            let mut out = self.output_weights.mul_vec(&layer_input);
            for (o, b) in out.iter_mut().zip(&self.output_bias) {
                *o += b;
            }
            if self.spec.output_mode == OutputMode::Softmax {
                softmax_in_place(&mut out);
            }
            outputs.push(out);
        }
        Ok(ForwardPass { outputs, hidden_states })
    }

    fn require_scalar_linear(&self) -> Result<(), RnnError> {
        if self.spec.output_mode != OutputMode::Linear {
            return Err(RnnError::LinearOutputRequired);
        }
        if self.spec.output_dim != 1 {
            return Err(RnnError::ScalarOutputRequired { output_dim: self.spec.output_dim });
        }
        Ok(())
    }

    /// Squared error of the final step's output against `target`.
    pub fn sample_loss(&self, sequence: &[Vec<f64>], target: f64) -> Result<f64, RnnError> {
        self.require_scalar_linear()?;
        let pass = self.forward(sequence)?;
        let prediction = pass.outputs.last().expect("non-empty sequence")[0];
        let residual = prediction - target;
        Ok(residual * residual)
    }

    /// Exact gradients of the final-step squared error with respect to every
    /// parameter, accumulated over the full unrolled window. Returns the
    /// gradients and the loss value.
    pub fn bptt_gradients(
        &self,
        sequence: &[Vec<f64>],
        target: f64,
    ) -> Result<(Gradients, f64), RnnError> {
        self.require_scalar_linear()?;
        let pass = self.forward(sequence)?;
        let steps = sequence.len();
        let depth = self.layers.len();
        let top = depth - 1;

        let prediction = pass.outputs[steps - 1][0];
        let residual = prediction - target;
        let loss = residual * residual;
        let output_delta = vec![2.0 * residual];

        let mut grads = Gradients::zeros_for(&self.spec);
        grads.output_weights.add_outer(&output_delta, &pass.hidden_states[top][steps - 1]);
        for (g, d) in grads.output_bias.iter_mut().zip(&output_delta) {
            *g += d;
        }

        // carry[layer] is dL/d(state) arriving from step t+1 through W.
        let mut carry: Vec<Vec<f64>> =
            self.spec.hidden_dims.iter().map(|&h| vec![0.0; h]).collect();
        let zero_states: Vec<Vec<f64>> =
            self.spec.hidden_dims.iter().map(|&h| vec![0.0; h]).collect();

        for t in (0..steps).rev() {
            // Gradient entering the top layer at this step; the readout only
            // contributes at the final step.
            let mut from_above = if t == steps - 1 {
                self.output_weights.mul_vec_transposed(&output_delta)
            } else {
                vec![0.0; self.spec.hidden_dims[top]]
            };
            for layer_idx in (0..depth).rev() {
                let layer = &self.layers[layer_idx];
                let state = &pass.hidden_states[layer_idx][t];
                // dL/d(pre-activation) = (carry + from_above) * tanh'
                let delta: Vec<f64> = carry[layer_idx]
                    .iter()
                    .zip(&from_above)
                    .zip(state)
                    .map(|((c, a), s)| (c + a) * (1.0 - s * s))
                    .collect();
                let layer_input: &[f64] = if layer_idx == 0 {
                    &sequence[t]
                } else {
                    &pass.hidden_states[layer_idx - 1][t]
                };
                let prev_state: &[f64] = if t > 0 {
                    &pass.hidden_states[layer_idx][t - 1]
                } else {
                    &zero_states[layer_idx]
                };
                let g = &mut grads.layers[layer_idx];
                g.input_weights.add_outer(&delta, layer_input);
                g.recurrent_weights.add_outer(&delta, prev_state);
                for (gb, d) in g.bias.iter_mut().zip(&delta) {
                    *gb += d;
                }
                carry[layer_idx] = layer.recurrent_weights.mul_vec_transposed(&delta);
                if layer_idx > 0 {
                    from_above = layer.input_weights.mul_vec_transposed(&delta);
                }
            }
        }
        Ok((grads, loss))
    }

    /// Central-difference gradient estimate, `(L(p+e) - L(p-e)) / 2e` per
    /// parameter. Independent of the backpropagation path; used to check it.
    pub fn finite_diff_gradients(
        &self,
        sequence: &[Vec<f64>],
        target: f64,
        epsilon: f64,
    ) -> Result<Gradients, RnnError> {
        assert!(epsilon > 0.0, "epsilon must be positive");
        self.require_scalar_linear()?;
        self.check_sequence(sequence)?;
        let mut flat = self.flat_params();
        let mut grad_flat = Vec::with_capacity(flat.len());
        for i in 0..flat.len() {
            let original = flat[i];
            flat[i] = original + epsilon;
            let plus = RnnModel::from_flat_params(self.spec.clone(), &flat)?
                .sample_loss(sequence, target)?;
            flat[i] = original - epsilon;
            let minus = RnnModel::from_flat_params(self.spec.clone(), &flat)?
                .sample_loss(sequence, target)?;
            flat[i] = original;
            grad_flat.push((plus - minus) / (2.0 * epsilon));
        }
        let shaped = RnnModel::from_flat_params(self.spec.clone(), &grad_flat)?;
        Ok(Gradients {
            layers: shaped.layers,
            output_weights: shaped.output_weights,
            output_bias: shaped.output_bias,
        })
    }

    fn apply_gradients(&mut self, grads: &Gradients, step: f64) {
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            layer.input_weights.add_scaled(&g.input_weights, step);
            layer.recurrent_weights.add_scaled(&g.recurrent_weights, step);
            for (b, gb) in layer.bias.iter_mut().zip(&g.bias) {
                *b += step * gb;
            }
        }
        self.output_weights.add_scaled(&grads.output_weights, step);
        for (b, gb) in self.output_bias.iter_mut().zip(&grads.output_bias) {
            *b += step * gb;
        }
    }

    /// One prediction per sample: the final-step output on the sample's
    /// window. Pure map; sample order does not matter.
    pub fn predict(&self, samples: &SampleSet) -> Result<Vec<f64>, RnnError> {
        if self.spec.output_dim != 1 {
            return Err(RnnError::ScalarOutputRequired { output_dim: self.spec.output_dim });
        }
        samples
            .samples()
            .iter()
            .map(|s| Ok(self.forward(&s.input)?.outputs.last().expect("non-empty window")[0]))
            .collect()
    }

    fn dataset_mse(&self, samples: &SampleSet) -> Result<f64, RnnError> {
        let predictions = self.predict(samples)?;
        Ok(metrics::mse(&predictions, &samples.targets()).expect("equal non-empty lengths"))
    }

    /// Per-sample gradient-descent training with early stopping.
    ///
    /// Consumes the initial model and returns the parameters that achieved
    /// the best validation MSE, along with the per-epoch loss history
    /// (one entry per epoch actually run).
    pub fn train(
        mut self,
        train_set: &SampleSet,
        val_set: &SampleSet,
        cfg: &TrainConfig,
    ) -> Result<(RnnModel, Vec<EpochLoss>), RnnError> {
        self.require_scalar_linear()?;
        if train_set.is_empty() || val_set.is_empty() {
            return Err(RnnError::EmptySampleSet);
        }
        if !cfg.learning_rate.is_finite() || cfg.learning_rate < 0.0 {
            return Err(RnnError::BadLearningRate(cfg.learning_rate));
        }
        if cfg.epochs == 0 {
            return Err(RnnError::BadEpochs);
        }

        let mut rng = SplitMix64::new(cfg.seed);
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        let mut history = Vec::new();
        let mut best = self.clone();
        let mut best_val = f64::INFINITY;
        let mut epochs_since_best = 0usize;

        for epoch in 1..=cfg.epochs {
            if cfg.shuffle {
                // Fisher-Yates, driven entirely by the seeded generator.
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.next_index(i + 1));
                }
            }
            for &idx in &order {
                let sample = &train_set.samples()[idx];
                let (grads, loss) = self.bptt_gradients(&sample.input, sample.target)?;
                if !loss.is_finite() {
                    return Err(RnnError::Diverged { epoch });
                }
                self.apply_gradients(&grads, -cfg.learning_rate);
            }
            let train_mse = self.dataset_mse(train_set)?;
            let val_mse = self.dataset_mse(val_set)?;
            if !train_mse.is_finite() || !val_mse.is_finite() {
                return Err(RnnError::Diverged { epoch });
            }
            history.push(EpochLoss { train_mse, val_mse });
            if val_mse < best_val {
                best_val = val_mse;
                best = self.clone();
                epochs_since_best = 0;
            } else {
                epochs_since_best += 1;
                if epochs_since_best >= cfg.early_stop_patience.max(1) {
                    break;
                }
            }
        }
        Ok((best, history))
    }
}

fn softmax_in_place(values: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = exp(*v - max);
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

/// Entrywise agreement test between two gradient values: within `rel_tol`
/// relative, with an `abs_floor` absolute floor for near-zero entries.
pub fn gradients_agree(analytic: f64, numeric: f64, rel_tol: f64, abs_floor: f64) -> bool {
    let diff = fabs(analytic - numeric);
    if diff <= abs_floor {
        return true;
    }
    diff <= rel_tol * fabs(analytic).max(fabs(numeric))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RnnError {
    BadSpec(&'static str),
    ShapeMismatch { expected: usize, got: usize },
    EmptySequence,
    EmptySampleSet,
    LinearOutputRequired,
    ScalarOutputRequired { output_dim: usize },
    BadParamCount { expected: usize, got: usize },
    BadLearningRate(f64),
    BadEpochs,
    Diverged { epoch: usize },
}

impl fmt::Display for RnnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RnnError::BadSpec(msg) => write!(f, "invalid network spec: {msg}"),
            RnnError::ShapeMismatch { expected, got } => {
                write!(f, "input step has {got} features, model expects {expected}")
            }
            RnnError::EmptySequence => write!(f, "sequence must have at least one step"),
            RnnError::EmptySampleSet => write!(f, "training needs non-empty sample sets"),
            RnnError::LinearOutputRequired => {
                write!(f, "this operation requires the linear output mode")
            }
            RnnError::ScalarOutputRequired { output_dim } => {
                write!(f, "this operation requires output_dim = 1, model has {output_dim}")
            }
            RnnError::BadParamCount { expected, got } => {
                write!(f, "expected {expected} parameters, got {got}")
            }
            RnnError::BadLearningRate(lr) => write!(f, "learning rate {lr} is not usable"),
            RnnError::BadEpochs => write!(f, "epochs must be at least 1"),
            RnnError::Diverged { epoch } => {
                write!(f, "training diverged to a non-finite loss in epoch {epoch}")
            }
        }
    }
}

impl core::error::Error for RnnError {}
