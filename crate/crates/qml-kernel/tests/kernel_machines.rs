//! End-to-end checks of the kernel-methods toolkit: Gram validity across
//! every map family, primal/dual agreement, advantage diagnostics against
//! dense oracles, the density-matrix embedding identity, and Fourier
//! structure of angle kernels.

use nalgebra::{DMatrix, DVector};
use qml_core::rng::stream;
use qml_core::RMat;
use qml_kernel::{
    adversarial_dataset, c2qe_embed, c2qe_sample, euclidean_inner_from_states,
    geometric_difference, kernel_fourier_decompose, kernel_matrix, kernel_risk_bounds,
    kernel_vector, quantum_kernel, ridge_fit, ridge_predict, ClassicalKernel, FeatureMapSpec,
    KernelMatrix, KernelSpec, RidgeModel,
};
use rand::Rng;

fn random_points(n: usize, d: usize, lo: f64, hi: f64, label: &str) -> Vec<Vec<f64>> {
    let mut rng = stream(41, label);
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

fn min_eigenvalue(k: &KernelMatrix) -> f64 {
    k.entries()
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn grams_of_every_map_family_are_psd() {
    let mut rng = stream(41, "psd-bits");
    let bits: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..4).map(|_| f64::from(rng.gen_range(0..2u8))).collect())
        .collect();
    let quantum_cases: Vec<(KernelSpec, Vec<Vec<f64>>)> = vec![
        (
            KernelSpec::Quantum(FeatureMapSpec::basis(4).unwrap()),
            bits,
        ),
        (
            KernelSpec::Quantum(FeatureMapSpec::amplitude(4).unwrap()),
            random_points(20, 4, -1.0, 1.0, "psd-amplitude"),
        ),
        (
            KernelSpec::Quantum(FeatureMapSpec::angle_x(3).unwrap()),
            random_points(20, 3, 0.0, 3.0, "psd-angle-x"),
        ),
        (
            KernelSpec::Quantum(FeatureMapSpec::angle_y(2).unwrap()),
            random_points(20, 2, 0.0, 3.0, "psd-angle-y"),
        ),
        (
            KernelSpec::Quantum(FeatureMapSpec::single_qubit_rx()),
            random_points(20, 1, 0.0, 6.0, "psd-rx"),
        ),
        (
            KernelSpec::Classical(ClassicalKernel::Polynomial { degree: 3, constant: 0.5 }),
            random_points(20, 3, -1.0, 1.0, "psd-poly"),
        ),
        (
            KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.2 }),
            random_points(20, 3, -1.0, 1.0, "psd-gauss"),
        ),
    ];
    for (spec, data) in &quantum_cases {
        let k = kernel_matrix(data, spec).unwrap();
        assert!(
            min_eigenvalue(&k) >= -1e-8,
            "Gram under {spec:?} lost positive semidefiniteness"
        );
    }
}

#[test]
fn dual_ridge_agrees_with_the_explicit_primal_solver() {
    let constant = 0.7;
    let spec = KernelSpec::Classical(ClassicalKernel::Polynomial { degree: 2, constant });
    let data = random_points(6, 2, -1.5, 1.5, "primal-train");
    let mut rng = stream(41, "primal-labels");
    let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let lambda = 0.3;

    let k = kernel_matrix(&data, &spec).unwrap();
    let model = ridge_fit(&k, &y, lambda).unwrap();

    // The degree-2 kernel with offset c has the explicit six-dimensional
    // feature map (x1^2, x2^2, sqrt(2) x1 x2, sqrt(2c) x1, sqrt(2c) x2, c).
    let phi = |p: &[f64]| -> DVector<f64> {
        DVector::from_vec(vec![
            p[0] * p[0],
            p[1] * p[1],
            2.0_f64.sqrt() * p[0] * p[1],
            (2.0 * constant).sqrt() * p[0],
            (2.0 * constant).sqrt() * p[1],
            constant,
        ])
    };
    let features = DMatrix::from_rows(
        &data
            .iter()
            .map(|p| phi(p).transpose())
            .collect::<Vec<_>>(),
    );
    let gram_primal = features.transpose() * &features + DMatrix::identity(6, 6) * lambda;
    let weights = gram_primal
        .lu()
        .solve(&(features.transpose() * DVector::from_column_slice(&y)))
        .unwrap();

    for probe in random_points(5, 2, -1.5, 1.5, "primal-probe") {
        let kvec = kernel_vector(&data, &spec, &probe).unwrap();
        let dual = ridge_predict(&model, &kvec).unwrap();
        let primal = weights.dot(&phi(&probe));
        assert!(
            (dual - primal).abs() < 1e-8,
            "dual {dual} vs primal {primal} at {probe:?}"
        );
    }
}

#[test]
fn zero_regularization_interpolates_the_training_targets() {
    let spec = KernelSpec::Quantum(FeatureMapSpec::angle_x(2).unwrap());
    let data = random_points(8, 2, 0.0, 3.0, "interp-train");
    let mut rng = stream(41, "interp-labels");
    let y: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let k = kernel_matrix(&data, &spec).unwrap();
    let model = ridge_fit(&k, &y, 0.0).unwrap();
    for (point, target) in data.iter().zip(&y) {
        let kvec = kernel_vector(&data, &spec, point).unwrap();
        let prediction = ridge_predict(&model, &kvec).unwrap();
        assert!(
            (prediction - target).abs() < 1e-8,
            "prediction {prediction} vs target {target}"
        );
    }
}

fn random_pd_kernel(n: usize, label: &str) -> KernelMatrix {
    let mut rng = stream(41, label);
    let r = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let entries = &r * r.transpose() + RMat::identity(n, n) * 0.5;
    KernelMatrix::new(
        entries,
        KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.0 }),
    )
    .unwrap()
}

#[test]
fn adversarial_datasets_saturate_the_geometric_difference() {
    let kc = random_pd_kernel(8, "adv-classical");
    let kq = random_pd_kernel(8, "adv-quantum");
    let g = geometric_difference(&kc, &kq).unwrap();
    let data = adversarial_dataset(&kc, &kq).unwrap();

    assert!((data.g_squared - g.value * g.value).abs() < 1e-9);
    assert!(
        (data.complexity_ratio - data.g_squared).abs() < 1e-6 * data.g_squared,
        "ratio {} vs g^2 {}",
        data.complexity_ratio,
        data.g_squared
    );

    // Independent oracle: the top eigenvalue of Kq Kc^-1 (trace-normalized)
    // equals g^2, because that product is similar to the symmetric
    // comparison matrix.
    let n = 8.0;
    let tilde_c = kc.entries() * (n / kc.entries().trace());
    let tilde_q = kq.entries() * (n / kq.entries().trace());
    let product = &tilde_q * tilde_c.try_inverse().unwrap();
    let top = product
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (top - data.g_squared).abs() < 1e-8 * top.abs().max(1.0),
        "oracle {top} vs g^2 {}",
        data.g_squared
    );

    let plus = data.signed_labels.iter().filter(|&&s| s > 0.0).count();
    assert_eq!(plus, 4);
    assert_eq!(data.signed_labels.len() - plus, 4);

    let same = adversarial_dataset(&kq, &kq).unwrap();
    assert!((same.complexity_ratio - 1.0).abs() < 1e-8);
}

#[test]
fn embedded_vectors_preserve_inner_products_at_scale() {
    for d in [3usize, 10, 40] {
        let mut rng = stream(41, &format!("embed-{d}"));
        let mut draw = || {
            let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = raw.iter().map(|v| v.abs()).sum();
            raw.iter().map(|v| v / norm).collect::<Vec<f64>>()
        };
        let r = draw();
        let r_prime = draw();
        let expected: f64 = r.iter().zip(&r_prime).map(|(a, b)| a * b).sum();
        let rho = c2qe_embed(&r).unwrap();
        let rho_prime = c2qe_embed(&r_prime).unwrap();
        let recovered = euclidean_inner_from_states(&rho, &rho_prime).unwrap();
        assert!(
            (recovered - expected).abs() < 1e-10,
            "d = {d}: recovered {recovered}, expected {expected}"
        );
    }
}

#[test]
fn sampled_embeddings_track_the_closed_form() {
    let mut rng = stream(41, "embed-sample-r");
    let raw: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm: f64 = raw.iter().map(|v| v.abs()).sum();
    let r: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let exact = c2qe_embed(&r).unwrap();
    let mut draws = stream(41, "embed-sample-draws");
    let sampled = c2qe_sample(&r, 100_000, &mut draws).unwrap();
    assert!(exact.trace_distance(&sampled) < 0.01);
}

#[test]
fn fourier_tables_factor_across_dimensions() {
    let one = kernel_fourier_decompose(&FeatureMapSpec::single_qubit_rx(), 6).unwrap();
    let map_two = FeatureMapSpec::angle_x(2).unwrap();
    let two = kernel_fourier_decompose(&map_two, 4).unwrap();

    for (s, t, c) in two.entries() {
        let factor_a = one.coefficient(&[s[0]], &[t[0]]).unwrap();
        let factor_b = one.coefficient(&[s[1]], &[t[1]]).unwrap();
        let product = factor_a * factor_b;
        assert!(
            (c - product).norm() < 1e-9,
            "coefficient at ({s:?}, {t:?}): {c} vs product {product}"
        );
        let neg_s: Vec<i32> = s.iter().map(|f| -f).collect();
        let neg_t: Vec<i32> = t.iter().map(|f| -f).collect();
        let mirror = two.coefficient(&neg_s, &neg_t).unwrap();
        assert!((c - mirror.conj()).norm() < 1e-10);
    }

    let probes = random_points(6, 2, 0.0, std::f64::consts::TAU, "fourier-heldout");
    for pair in probes.chunks(2) {
        let direct = quantum_kernel(&map_two, &pair[0], &pair[1]).unwrap();
        let series = two.evaluate(&pair[0], &pair[1]).unwrap();
        assert!(
            (direct - series).abs() < 1e-6,
            "held-out point: kernel {direct} vs series {series}"
        );
    }
}

#[test]
fn risk_bounds_and_predictions_respond_to_regularization() {
    // A 2-qubit angle kernel spans a 9-dimensional feature space, so the
    // unregularized Gram stays invertible only up to 9 points.
    let spec = KernelSpec::Quantum(FeatureMapSpec::angle_x(2).unwrap());
    let data = random_points(8, 2, 0.0, 3.0, "risk-train");
    let mut rng = stream(41, "risk-labels");
    let y: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let k = kernel_matrix(&data, &spec).unwrap();

    let zero = kernel_risk_bounds(&k, &y, 0.0, 0.05).unwrap();
    assert_eq!(zero.train_bound, 0.0);
    assert!(zero.gen_bound.is_finite());

    // With the targets reused as the kernel vector, the prediction is the
    // quadratic form y^T (K + lambda I)^-1 y, which must shrink as lambda
    // grows.
    let mut previous_train = 0.0;
    let mut previous_prediction = f64::INFINITY;
    for lambda in [0.0, 0.05, 0.2, 1.0, 4.0] {
        let bounds = kernel_risk_bounds(&k, &y, lambda, 0.05).unwrap();
        assert!(bounds.train_bound >= previous_train);
        previous_train = bounds.train_bound;

        let model = ridge_fit(&k, &y, lambda).unwrap();
        let prediction = ridge_predict(&model, &y).unwrap();
        assert!(prediction < previous_prediction + 1e-12);
        previous_prediction = prediction;
    }
}

#[test]
fn kernel_artifacts_round_trip_through_their_formats() {
    let spec = KernelSpec::Quantum(FeatureMapSpec::angle_y(2).unwrap());
    let data = random_points(5, 2, 0.0, 3.0, "roundtrip");
    let k = kernel_matrix(&data, &spec).unwrap();
    let restored = KernelMatrix::from_csv(&k.to_csv(), spec.clone()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(restored.entries()[(i, j)], k.entries()[(i, j)]);
        }
    }

    let spec_json = serde_json::to_string(&spec).unwrap();
    let spec_back: KernelSpec = serde_json::from_str(&spec_json).unwrap();
    assert_eq!(spec_back, spec);

    let mut rng = stream(41, "roundtrip-labels");
    let y: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let model = ridge_fit(&k, &y, 0.1).unwrap();
    let back = RidgeModel::from_json(&model.to_json()).unwrap();
    assert_eq!(back, model);
}

#[test]
fn digit_style_data_flows_from_csv_to_predictions() {
    let text = "0,8,16,4,1\n16,4,0,12,0\n8,8,8,8,1\n4,0,12,16,0\n12,16,4,0,1\n0,4,8,12,0\n";
    let (features, labels) = qml_kernel::parse_optdigits_csv(text).unwrap();
    assert_eq!(features.len(), 6);
    assert!(features.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));

    let scaled: Vec<Vec<f64>> = features
        .iter()
        .map(|row| row.iter().map(|v| v * std::f64::consts::PI).collect())
        .collect();
    let signed: Vec<f64> = labels.iter().map(|&l| if l > 0.5 { 1.0 } else { -1.0 }).collect();
    let spec = KernelSpec::Quantum(FeatureMapSpec::angle_x(4).unwrap());
    let k = kernel_matrix(&scaled, &spec).unwrap();
    let model = ridge_fit(&k, &signed, 1e-6).unwrap();
    for (point, target) in scaled.iter().zip(&signed) {
        let kvec = kernel_vector(&scaled, &spec, point).unwrap();
        let prediction = ridge_predict(&model, &kvec).unwrap();
        assert_eq!(prediction.signum(), *target);
    }
}
