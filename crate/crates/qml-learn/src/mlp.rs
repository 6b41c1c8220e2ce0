//! Multilayer perceptron with configurable activation, output head, and
//! loss, plus exact backpropagation used both as a reference model and as
//! the GAN discriminator.

use qml_core::{Error, Result, RMat, RVec};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Elementwise activation applied after every affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's own output value.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Map applied to the final activation vector to produce the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    Softmax,
    Identity,
}

/// Training loss, averaged over the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `(1/2B) sum_a ||yhat - y||^2`.
    Mse,
    /// `-(1/B) sum_a sum_j [y log p + (1-y) log(1-p)]`, predictions clamped
    /// away from 0 and 1 by 1e-12.
    Bce,
}

const BCE_CLAMP: f64 = 1e-12;

/// Fully connected network `x -> head(act(W_L ... act(W_1 x + b_1) + b_L))`
/// with the activation applied after every layer, the output head last.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    weights: Vec<RMat>,
    biases: Vec<RVec>,
    activation: Activation,
    head: OutputHead,
}

/// Batch gradients together with the loss they were taken at. Input
/// gradients are reported per sample so upstream models (the quantum
/// generator) can continue the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub d_weights: Vec<RMat>,
    pub d_biases: Vec<RVec>,
    pub d_inputs: Vec<Vec<f64>>,
    pub loss: f64,
}

fn softmax(v: &RVec) -> RVec {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
    let total: f64 = exps.iter().sum();
    RVec::from_iterator(v.len(), exps.into_iter().map(|e| e / total))
}

impl Mlp {
    fn validate_dims(dims: &[usize]) -> Result<()> {
        if dims.len() < 2 {
            return Err(Error::InvalidArgument(
                "an MLP needs an input and an output dimension".into(),
            ));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("layer dimensions must be positive".into()));
        }
        Ok(())
    }

    /// All-zero weights and biases over the dimension chain `dims`.
    pub fn zeros(dims: &[usize], activation: Activation, head: OutputHead) -> Result<Self> {
        Self::validate_dims(dims)?;
        let weights = dims
            .windows(2)
            .map(|w| RMat::zeros(w[1], w[0]))
            .collect();
        let biases = dims.windows(2).map(|w| RVec::zeros(w[1])).collect();
        Ok(Self {
            weights,
            biases,
            activation,
            head,
        })
    }

    /// Gaussian weights with variance 1/fan_in, zero biases.
    pub fn random(
        dims: &[usize],
        activation: Activation,
        head: OutputHead,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let mut model = Self::zeros(dims, activation, head)?;
        for w in &mut model.weights {
            let scale = 1.0 / (w.ncols() as f64).sqrt();
            for entry in w.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *entry = scale * g;
            }
        }
        Ok(model)
    }

    pub fn weights(&self) -> &[RMat] {
        &self.weights
    }

    pub fn biases(&self) -> &[RVec] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn head(&self) -> OutputHead {
        self.head
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.last().expect("at least one layer").nrows()
    }

    /// Flat copy of all weights then biases, layer by layer.
    pub fn flat_parameters(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            flat.extend(w.iter());
            flat.extend(b.iter());
        }
        flat
    }

    /// In-place gradient-descent step `p <- p - lr g`.
    pub fn sgd_step(&mut self, gradients: &MlpGradients, learning_rate: f64) {
        for ((w, b), (dw, db)) in self
            .weights
            .iter_mut()
            .zip(&mut self.biases)
            .zip(gradients.d_weights.iter().zip(&gradients.d_biases))
        {
            *w -= dw * learning_rate;
            *b -= db * learning_rate;
        }
    }

    /// Post-activation vectors `x^(0), ..., x^(L)` before the output head.
    fn forward_trace(&self, x: &[f64]) -> Result<Vec<RVec>> {
        if x.len() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut trace = Vec::with_capacity(self.weights.len() + 1);
        trace.push(RVec::from_column_slice(x));
        for (w, b) in self.weights.iter().zip(&self.biases) {
            let z = w * trace.last().expect("trace seeded") + b;
            trace.push(z.map(|v| self.activation.apply(v)));
        }
        Ok(trace)
    }

    fn apply_head(&self, last: &RVec) -> RVec {
        match self.head {
            OutputHead::Softmax => softmax(last),
            OutputHead::Identity => last.clone(),
        }
    }

    /// Prediction for a single input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let trace = self.forward_trace(x)?;
        Ok(self
            .apply_head(trace.last().expect("trace non-empty"))
            .iter()
            .cloned()
            .collect())
    }
}

/// Free-function form of [`Mlp::forward`].
pub fn mlp_forward(mlp: &Mlp, x: &[f64]) -> Result<Vec<f64>> {
    mlp.forward(x)
}

fn loss_and_output_gradient(
    kind: LossKind,
    prediction: &RVec,
    target: &RVec,
    batch: f64,
) -> Result<(f64, RVec)> {
    match kind {
        LossKind::Mse => {
            let diff = prediction - target;
            let loss = 0.5 * diff.norm_squared() / batch;
            Ok((loss, diff / batch))
        }
        LossKind::Bce => {
            let mut loss = 0.0;
            let mut grad = RVec::zeros(prediction.len());
            for j in 0..prediction.len() {
                let y = target[j];
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::InvalidArgument(format!(
                        "cross-entropy target {y} outside [0, 1]"
                    )));
                }
                let p = prediction[j].clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                loss -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
                grad[j] = (p - y) / (p * (1.0 - p)) / batch;
            }
            Ok((loss / batch, grad))
        }
    }
}

/// Backpropagate a batch, returning weight, bias, and per-sample input
/// gradients of the batch-averaged loss.
pub fn mlp_backprop(
    mlp: &Mlp,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    kind: LossKind,
) -> Result<MlpGradients> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("backprop needs a non-empty batch".into()));
    }
    if inputs.len() != targets.len() {
        return Err(Error::InvalidArgument(format!(
            "{} inputs but {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let batch = inputs.len() as f64;
    let mut d_weights: Vec<RMat> = mlp.weights.iter().map(|w| RMat::zeros(w.nrows(), w.ncols())).collect();
    let mut d_biases: Vec<RVec> = mlp.biases.iter().map(|b| RVec::zeros(b.len())).collect();
    let mut d_inputs = Vec::with_capacity(inputs.len());
    let mut total_loss = 0.0;

    for (x, y) in inputs.iter().zip(targets) {
        if y.len() != mlp.output_dim() {
            return Err(Error::InvalidArgument(format!(
                "target has {} entries, network outputs {}",
                y.len(),
                mlp.output_dim()
            )));
        }
        let trace = mlp.forward_trace(x)?;
        let last = trace.last().expect("trace non-empty");
        let prediction = mlp.apply_head(last);
        let target = RVec::from_column_slice(y);
        let (loss, d_prediction) = loss_and_output_gradient(kind, &prediction, &target, batch)?;
        total_loss += loss;

        let mut delta = match mlp.head {
            OutputHead::Softmax => {
                let p = &prediction;
                let dot = p.dot(&d_prediction);
                RVec::from_iterator(
                    p.len(),
                    p.iter()
                        .zip(d_prediction.iter())
                        .map(|(&pi, &gi)| pi * (gi - dot)),
                )
            }
            OutputHead::Identity => d_prediction,
        };

        for layer in (0..mlp.weights.len()).rev() {
            let x_out = &trace[layer + 1];
            let x_in = &trace[layer];
            let delta_z = RVec::from_iterator(
                delta.len(),
                delta
                    .iter()
                    .zip(x_out.iter())
                    .map(|(&d, &o)| d * mlp.activation.derivative_from_output(o)),
            );
            d_weights[layer] += &delta_z * x_in.transpose();
            d_biases[layer] += &delta_z;
            delta = mlp.weights[layer].transpose() * delta_z;
        }
        d_inputs.push(delta.iter().cloned().collect());
    }

    Ok(MlpGradients {
        d_weights,
        d_biases,
        d_inputs,
        loss: total_loss,
    })
}

/// Batch-averaged loss without gradients.
pub fn mlp_loss(mlp: &Mlp, inputs: &[Vec<f64>], targets: &[Vec<f64>], kind: LossKind) -> Result<f64> {
    Ok(mlp_backprop(mlp, inputs, targets, kind)?.loss)
}
