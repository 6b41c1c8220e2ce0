//! Patch-based quantum GAN: each of `T` sub-generator circuits turns a
//! shared latent rotation layer into a patch of pixel probabilities by
//! post-selecting the leading ancilla wires on |0>, patches are min-max
//! rescaled and concatenated into an image, and a classical sigmoid MLP
//! plays the discriminator.

use crate::circuit::{build_rot_chain, ParamCircuit};
use crate::mlp::{mlp_backprop, Activation, LossKind, Mlp, OutputHead};
use crate::record::{parameter_hash, EpochStat, TrainRecord};
use qml_core::gates::{apply_gate, ry};
use qml_core::rng::{stream, Prng};
use qml_core::state::StateVector;
use qml_core::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

/// Post-selection probabilities below this are treated as failed latents.
pub const POST_SELECTION_FLOOR: f64 = 1e-9;
/// Guard added to the min-max denominator, as in the reference recipe.
const RESCALE_GUARD: f64 = 1e-8;
/// Latents retried per image before giving up.
const RESAMPLE_CAP: usize = 1000;

/// Patch-GAN training configuration. The image has
/// `sub_generators * 2^(generator_qubits - ancilla_qubits)` pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QganConfig {
    pub sub_generators: usize,
    pub generator_qubits: usize,
    pub ancilla_qubits: usize,
    pub layers: usize,
    pub lr_generator: f64,
    pub lr_discriminator: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

/// Trained GAN state plus the run record. `resampled_latents` counts latent
/// draws discarded for failing post-selection.
#[derive(Debug, Clone)]
pub struct QganOutcome {
    pub generator_params: Vec<Vec<f64>>,
    pub discriminator: Mlp,
    pub record: TrainRecord,
    pub resampled_latents: usize,
}

/// Run one sub-generator at `theta` on the latent rotation layer and return
/// the unnormalized branch probabilities of the non-ancilla wires under the
/// all-zero ancilla outcome, together with their sum (the post-selection
/// probability). The normalized patch is the first component divided by the
/// second.
pub fn patch_probabilities(
    circuit: &ParamCircuit,
    theta: &[f64],
    latent: &[f64],
    ancilla_qubits: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = circuit.num_qubits();
    if ancilla_qubits >= n {
        return Err(Error::InvalidArgument(format!(
            "{ancilla_qubits} ancillas leave no data wires on {n} qubits"
        )));
    }
    if latent.len() != n {
        return Err(Error::InvalidArgument(format!(
            "latent has {} angles, circuit has {n} wires",
            latent.len()
        )));
    }
    let mut state = StateVector::zero(n)?;
    for (wire, &angle) in latent.iter().enumerate() {
        state = apply_gate(&state, &ry(angle), &[wire])?;
    }
    let evolved = circuit.apply(theta, &state)?;
    let probabilities = evolved.probabilities();
    let kept = 1usize << (n - ancilla_qubits);
    let raw = probabilities[..kept].to_vec();
    let post_prob = raw.iter().sum();
    Ok((raw, post_prob))
}

fn extreme_indices(values: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[lo] {
            lo = i;
        }
        if v > values[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

fn min_max_rescale(patch: &[f64]) -> Vec<f64> {
    let (lo, hi) = extreme_indices(patch);
    let denom = patch[hi] - patch[lo] + RESCALE_GUARD;
    patch.iter().map(|p| (p - patch[lo]) / denom).collect()
}

struct PatchForward {
    raw: Vec<f64>,
    post_prob: f64,
    normalized: Vec<f64>,
    rescaled: Vec<f64>,
}

fn forward_patch(
    circuit: &ParamCircuit,
    theta: &[f64],
    latent: &[f64],
    ancilla_qubits: usize,
) -> Result<Option<PatchForward>> {
    let (raw, post_prob) = patch_probabilities(circuit, theta, latent, ancilla_qubits)?;
    if post_prob < POST_SELECTION_FLOOR {
        return Ok(None);
    }
    let normalized: Vec<f64> = raw.iter().map(|r| r / post_prob).collect();
    let rescaled = min_max_rescale(&normalized);
    Ok(Some(PatchForward {
        raw,
        post_prob,
        normalized,
        rescaled,
    }))
}

fn try_image(
    circuit: &ParamCircuit,
    thetas: &[Vec<f64>],
    latent: &[f64],
    ancilla_qubits: usize,
) -> Result<Option<(Vec<f64>, Vec<PatchForward>)>> {
    let mut patches = Vec::with_capacity(thetas.len());
    for theta in thetas {
        match forward_patch(circuit, theta, latent, ancilla_qubits)? {
            Some(patch) => patches.push(patch),
            None => return Ok(None),
        }
    }
    let image: Vec<f64> = patches.iter().flat_map(|p| p.rescaled.iter().copied()).collect();
    Ok(Some((image, patches)))
}

fn sample_latent(num_qubits: usize, rng: &mut Prng) -> Vec<f64> {
    (0..num_qubits).map(|_| rng.gen_range(0.0..TAU)).collect()
}

fn sample_valid_image(
    circuit: &ParamCircuit,
    thetas: &[Vec<f64>],
    ancilla_qubits: usize,
    rng: &mut Prng,
    resampled: &mut usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<PatchForward>)> {
    for _ in 0..RESAMPLE_CAP {
        let latent = sample_latent(circuit.num_qubits(), rng);
        if let Some((image, patches)) = try_image(circuit, thetas, &latent, ancilla_qubits)? {
            return Ok((latent, image, patches));
        }
        *resampled += 1;
    }
    Err(Error::Numeric(format!(
        "post-selection probability stayed below {POST_SELECTION_FLOOR:e} across {RESAMPLE_CAP} latents"
    )))
}

/// Gradient of a scalar function of the rescaled image with respect to one
/// sub-generator's parameters, given the cotangent `d_pixels` on that
/// generator's rescaled patch. Applies the parameter-shift rule to the
/// numerator and denominator of each conditional pixel probability, the
/// quotient rule, and the min-max chain with the extreme indices held fixed.
fn patch_parameter_gradient(
    circuit: &ParamCircuit,
    theta: &[f64],
    latent: &[f64],
    ancilla_qubits: usize,
    patch: &PatchForward,
    d_pixels: &[f64],
) -> Result<Vec<f64>> {
    let p = &patch.normalized;
    let (lo, hi) = extreme_indices(p);
    let denom = p[hi] - p[lo] + RESCALE_GUARD;
    let d = patch.post_prob;

    (0..theta.len())
        .map(|k| {
            let mut plus = theta.to_vec();
            plus[k] += FRAC_PI_2;
            let mut minus = theta.to_vec();
            minus[k] -= FRAC_PI_2;
            let (raw_plus, post_plus) = patch_probabilities(circuit, &plus, latent, ancilla_qubits)?;
            let (raw_minus, post_minus) = patch_probabilities(circuit, &minus, latent, ancilla_qubits)?;
            let d_post = 0.5 * (post_plus - post_minus);
            let dp: Vec<f64> = patch
                .raw
                .iter()
                .zip(raw_plus.iter().zip(&raw_minus))
                .map(|(&n_j, (&r_plus, &r_minus))| {
                    let d_raw = 0.5 * (r_plus - r_minus);
                    (d_raw * d - n_j * d_post) / (d * d)
                })
                .collect();
            let mut total = 0.0;
            for (j, &cotangent) in d_pixels.iter().enumerate() {
                let d_rescaled =
                    (dp[j] - dp[lo]) / denom - (p[j] - p[lo]) * (dp[hi] - dp[lo]) / (denom * denom);
                total += cotangent * d_rescaled;
            }
            Ok(total)
        })
        .collect()
}

fn validate_config(config: &QganConfig) -> Result<usize> {
    if config.sub_generators == 0 {
        return Err(Error::InvalidArgument("need at least one sub-generator".into()));
    }
    if config.generator_qubits == 0 {
        return Err(Error::InvalidArgument("sub-generators need at least one qubit".into()));
    }
    if config.ancilla_qubits >= config.generator_qubits {
        return Err(Error::InvalidArgument(format!(
            "{} ancillas leave no data wires on {} qubits",
            config.ancilla_qubits, config.generator_qubits
        )));
    }
    if config.layers == 0 {
        return Err(Error::InvalidArgument("generator needs at least one layer".into()));
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }
    for (name, lr) in [
        ("generator", config.lr_generator),
        ("discriminator", config.lr_discriminator),
    ] {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} learning rate must be finite and positive, got {lr}"
            )));
        }
    }
    Ok(1usize << (config.generator_qubits - config.ancilla_qubits))
}

fn validate_images(images: &[Vec<f64>], config: &QganConfig, pixels_per_patch: usize) -> Result<usize> {
    if images.is_empty() {
        return Err(Error::InvalidArgument("training set has no images".into()));
    }
    let pixels = images[0].len();
    if pixels == 0 || pixels % config.sub_generators != 0 {
        return Err(Error::InvalidArgument(format!(
            "{pixels} pixels cannot be split into {} patches",
            config.sub_generators
        )));
    }
    if pixels_per_patch * config.sub_generators != pixels {
        return Err(Error::InvalidArgument(format!(
            "{} sub-generators on {} data wires produce {} pixels, images have {pixels}",
            config.sub_generators,
            config.generator_qubits - config.ancilla_qubits,
            pixels_per_patch * config.sub_generators
        )));
    }
    for (i, image) in images.iter().enumerate() {
        if image.len() != pixels {
            return Err(Error::InvalidArgument(format!(
                "image {i} has {} pixels, expected {pixels}",
                image.len()
            )));
        }
        if image.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::Validation(format!(
                "image {i} has pixels outside [0, 1]; rescale inputs first"
            )));
        }
    }
    Ok(pixels)
}

/// Generate `count` images from trained (or initial) generator parameters.
pub fn qgan_generate(
    config: &QganConfig,
    generator_params: &[Vec<f64>],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    validate_config(config)?;
    let circuit = build_rot_chain(config.generator_qubits, config.layers)?;
    if generator_params.len() != config.sub_generators
        || generator_params.iter().any(|t| t.len() != circuit.num_params())
    {
        return Err(Error::InvalidArgument(
            "generator parameters do not match the configured layout".into(),
        ));
    }
    let mut rng = stream(seed, "qgan-generate");
    let mut resampled = 0usize;
    (0..count)
        .map(|_| {
            let (_, image, _) = sample_valid_image(
                &circuit,
                generator_params,
                config.ancilla_qubits,
                &mut rng,
                &mut resampled,
            )?;
            Ok(image)
        })
        .collect()
}

/// Adversarial training on the minimax objective
/// `E_x[log D(x)] + E_z[log(1 - D(G(z)))]`: the discriminator descends the
/// binary cross-entropy with labels 1 for data and 0 for generated images,
/// and the generator descends `E_z[log(1 - D(G(z)))]` through the
/// discriminator, the min-max rescale, and the post-selected patch
/// probabilities.
///
/// Per-epoch record fields: `train_loss` is the discriminator
/// cross-entropy, `test_loss` the generator objective, and
/// `train_accuracy` the discriminator's real-versus-fake accuracy.
pub fn qgan_patch_train(images: &[Vec<f64>], config: &QganConfig) -> Result<QganOutcome> {
    let pixels_per_patch = validate_config(config)?;
    let pixels = validate_images(images, config, pixels_per_patch)?;

    let started = Instant::now();
    let circuit = build_rot_chain(config.generator_qubits, config.layers)?;
    let mut rng = stream(config.seed, "qgan-train");
    let mut thetas: Vec<Vec<f64>> = (0..config.sub_generators)
        .map(|_| (0..circuit.num_params()).map(|_| rng.gen_range(0.0..TAU)).collect())
        .collect();
    let mut discriminator = Mlp::random(
        &[pixels, 64, 32, 1],
        Activation::Sigmoid,
        OutputHead::Identity,
        &mut rng,
    )?;

    let mut resampled = 0usize;
    let mut epochs = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..images.len()).collect();
        order.shuffle(&mut rng);
        let mut d_loss_sum = 0.0;
        let mut g_loss_sum = 0.0;
        let mut accuracy_sum = 0.0;
        let mut batches = 0usize;

        for chunk in order.chunks(config.batch_size) {
            batches += 1;
            let real: Vec<Vec<f64>> = chunk.iter().map(|&i| images[i].clone()).collect();

            let mut fake = Vec::with_capacity(chunk.len());
            for _ in 0..chunk.len() {
                let (_, image, _) =
                    sample_valid_image(&circuit, &thetas, config.ancilla_qubits, &mut rng, &mut resampled)?;
                fake.push(image);
            }
            let mut inputs = real.clone();
            inputs.extend(fake.iter().cloned());
            let mut targets = vec![vec![1.0]; chunk.len()];
            targets.extend(vec![vec![0.0]; chunk.len()]);
            let d_grads = mlp_backprop(&discriminator, &inputs, &targets, LossKind::Bce)?;
            if !d_grads.loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "discriminator loss became non-finite at epoch {epoch}"
                )));
            }
            let mut correct = 0usize;
            for (row, target) in inputs.iter().zip(&targets) {
                let score = discriminator.forward(row)?[0];
                if (score > 0.5) == (target[0] > 0.5) {
                    correct += 1;
                }
            }
            accuracy_sum += correct as f64 / inputs.len() as f64;
            discriminator.sgd_step(&d_grads, config.lr_discriminator);
            d_loss_sum += d_grads.loss;

            let mut samples = Vec::with_capacity(chunk.len());
            for _ in 0..chunk.len() {
                samples.push(sample_valid_image(
                    &circuit,
                    &thetas,
                    config.ancilla_qubits,
                    &mut rng,
                    &mut resampled,
                )?);
            }
            let fake_images: Vec<Vec<f64>> = samples.iter().map(|(_, image, _)| image.clone()).collect();
            let zero_targets = vec![vec![0.0]; samples.len()];
            let g_grads = mlp_backprop(&discriminator, &fake_images, &zero_targets, LossKind::Bce)?;
            let generator_loss = -g_grads.loss;
            if !generator_loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "generator loss became non-finite at epoch {epoch}"
                )));
            }
            g_loss_sum += generator_loss;

            let per_sample: Vec<Vec<Vec<f64>>> = samples
                .par_iter()
                .zip(&g_grads.d_inputs)
                .map(|((latent, _, patches), d_input)| {
                    (0..config.sub_generators)
                        .map(|t| {
                            let window = &d_input[t * pixels_per_patch..(t + 1) * pixels_per_patch];
                            let cotangent: Vec<f64> = window.iter().map(|g| -g).collect();
                            patch_parameter_gradient(
                                &circuit,
                                &thetas[t],
                                latent,
                                config.ancilla_qubits,
                                &patches[t],
                                &cotangent,
                            )
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for sample_grads in &per_sample {
                for (theta, grad) in thetas.iter_mut().zip(sample_grads) {
                    for (parameter, g) in theta.iter_mut().zip(grad) {
                        *parameter -= config.lr_generator * g;
                    }
                }
            }
        }

        let flat: Vec<f64> = thetas.iter().flatten().copied().collect();
        epochs.push(EpochStat {
            epoch,
            train_loss: d_loss_sum / batches as f64,
            test_loss: Some(g_loss_sum / batches as f64),
            train_accuracy: accuracy_sum / batches as f64,
            test_accuracy: None,
            param_hash: parameter_hash(&flat),
        });
    }

    let record = TrainRecord {
        seed: config.seed,
        epochs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    record.validate()?;
    Ok(QganOutcome {
        generator_params: thetas,
        discriminator,
        record,
        resampled_latents: resampled,
    })
}
