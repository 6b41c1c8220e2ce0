//! Trainable models on the simulator stack: the classical perceptron with
//! its mistake bound, a reference MLP with exact backpropagation (also the
//! GAN discriminator), variational quantum classifiers with parameter-shift
//! gradients, the gradient-variance (barren plateau) experiment, a
//! patch-based quantum GAN, and closed-form capacity diagnostics.
//!
//! Circuits are layouts over flat parameter vectors ([`ParamCircuit`]),
//! instantiated by the hardware-efficient, chained, and convolution-pooling
//! constructors. Training runs are deterministic in their seed and report
//! per-epoch metrics as a [`TrainRecord`].

pub mod bp;
pub mod capacity;
pub mod circuit;
pub mod data;
pub mod mlp;
pub mod optim;
pub mod perceptron;
pub mod qgan;
pub mod qnn;
pub mod record;

pub use bp::{bp_variance_experiment, bp_variance_experiment_with, BpRow, DepthPolicy, ParamInit};
pub use capacity::{capacity_bound_diagnostics, CapacityBounds, COVERING_EPSILON};
pub use circuit::{
    build_hec, build_qcnn, build_rot_chain, CircuitElement, EntanglerKind, ParamCircuit,
    RotationAxis,
};
pub use data::{synth_margin_dataset, LabeledSet, MarginDataset};
pub use mlp::{mlp_backprop, mlp_forward, mlp_loss, Activation, LossKind, Mlp, MlpGradients, OutputHead};
pub use optim::{Optimizer, OptimizerKind};
pub use perceptron::{perceptron_train, PerceptronOutcome, MAX_PASSES};
pub use qgan::{
    patch_probabilities, qgan_generate, qgan_patch_train, QganConfig, QganOutcome,
    POST_SELECTION_FLOOR,
};
pub use qnn::{
    encode_features, parameter_shift_grad, parameter_shift_grad_state, qnn_decision_values,
    qnn_forward, qnn_forward_state, qnn_train_classifier, readout_observable, Encoding, QnnConfig,
};
pub use record::{parameter_hash, EpochStat, TrainRecord};
