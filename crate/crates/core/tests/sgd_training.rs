mod common;

use ndarray::Array1;
use rff_sgm::error::Error;
use rff_sgm::loss::huber_hinge_grad_w;
use rff_sgm::rff::FourierFeatureMap;
use rff_sgm::sgm::{self, SgmConfig, SgmModel};

fn features(n: usize, d: usize, components: usize, seed: u64) -> rff_sgm::rff::Features {
    let ds = common::noisy_linear(n, d, 0.1, seed);
    FourierFeatureMap::sample(d, components, 0.2, seed).unwrap().featurize(&ds).unwrap()
}

#[test]
fn separable_blobs_reach_zero_training_error() {
    let ds = common::blobs(100, 3, 2.0, 4);
    let map = FourierFeatureMap::sample(3, 100, 0.1, 4).unwrap();
    let cfg = SgmConfig { eta: 0.5, epochs: 30, ..Default::default() };
    let model = sgm::train(&ds, &map, &cfg).unwrap();
    let risk = sgm::empirical_risk(model.w_bar.view(), &ds, &map).unwrap();
    assert_eq!(risk.zero_one, 0.0);
    for (row, &y) in ds.features.rows().into_iter().zip(ds.labels.iter()) {
        assert_eq!(sgm::predict(&model, &map, row, true).unwrap(), y);
    }
}

#[test]
fn average_equals_mean_of_traced_iterates() {
    let data = features(60, 4, 20, 2);
    let cfg = SgmConfig { eta: 0.1, epochs: 3, trace: usize::MAX, ..Default::default() };
    let model = sgm::train_features(&data, &cfg).unwrap();
    assert_eq!(model.trace.len(), model.t);
    assert_eq!(model.t, 180);
    let mut mean = Array1::<f64>::zeros(data.dim());
    for w in &model.trace {
        mean += w;
    }
    mean /= model.t as f64;
    for (a, b) in mean.iter().zip(model.w_bar.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(model.trace.last().unwrap(), &model.w);
}

#[test]
fn steps_are_bounded_by_lipschitz_times_eta() {
    let data = features(80, 5, 30, 3);
    let eta = 0.25;
    let cfg = SgmConfig { eta, epochs: 2, trace: usize::MAX, ..Default::default() };
    let model = sgm::train_features(&data, &cfg).unwrap();
    let mut prev = Array1::<f64>::zeros(data.dim());
    for w in &model.trace {
        let step = (w - &prev).mapv(|v| v * v).sum().sqrt();
        assert!(step <= 4.0 * eta + 1e-12, "step {step}");
        prev = w.clone();
    }
}

#[test]
fn sampled_gradient_is_unbiased() {
    let data = features(50, 3, 10, 5);
    let w = common::gaussian_matrix(1, data.dim(), 8).row(0).to_owned();
    let mut mean = Array1::<f64>::zeros(data.dim());
    for (z, &y) in data.z.rows().into_iter().zip(data.labels.iter()) {
        mean += &huber_hinge_grad_w(w.view(), z, y);
    }
    mean /= data.n() as f64;
    let full = sgm::full_gradient(w.view(), &data, 0.0);
    for (a, b) in mean.iter().zip(full.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn training_is_deterministic_per_seed() {
    let data = features(70, 4, 25, 6);
    let cfg = SgmConfig { eta: 0.05, epochs: 4, seed: 99, ..Default::default() };
    let a = sgm::train_features(&data, &cfg).unwrap();
    let b = sgm::train_features(&data, &cfg).unwrap();
    assert_eq!(a, b);
    let c = sgm::train_features(&data, &SgmConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.w, c.w);
}

#[test]
fn zero_step_leaves_the_zero_model() {
    let data = features(20, 2, 5, 7);
    let model = sgm::train_features(&data, &SgmConfig { eta: 0.0, epochs: 3, ..Default::default() }).unwrap();
    assert!(model.w.iter().chain(model.w_bar.iter()).all(|&v| v == 0.0));
    let risk = sgm::empirical_risk_features(model.w_bar.view(), &data).unwrap();
    assert_eq!(risk.loss, 1.0);
    assert_eq!(risk.zero_one, data.labels.iter().filter(|&&y| y < 0.0).count() as f64 / 20.0);
}

#[test]
fn absurd_step_size_reports_divergence() {
    let data = features(20, 2, 5, 8);
    let out = sgm::train_features(&data, &SgmConfig { eta: f64::MAX, epochs: 5, ..Default::default() });
    assert!(matches!(out, Err(Error::Diverged { .. })), "{out:?}");
}

#[test]
fn full_batch_minimizer_reaches_stationarity() {
    let data = features(200, 4, 20, 9);
    let min = sgm::minimize_full_batch(&data, 0.0, 1e-8, 200).unwrap();
    assert!(min.grad_norm <= 1e-8, "{}", min.grad_norm);
    let g = sgm::full_gradient(min.w.view(), &data, 0.0);
    assert!(g.dot(&g).sqrt() <= 1e-8);
    // SGD from zero should not beat the full-batch optimum.
    let model = sgm::train_features(&data, &SgmConfig { eta: 0.05, epochs: 20, ..Default::default() }).unwrap();
    let sgd = sgm::empirical_risk_features(model.w_bar.view(), &data).unwrap();
    assert!(sgd.loss >= min.objective - 1e-12);
}

#[test]
fn model_file_round_trips() {
    let ds = common::noisy_linear(40, 3, 0.0, 10);
    let map = FourierFeatureMap::sample(3, 6, 0.5, 10).unwrap();
    let cfg = SgmConfig { eta: 0.1, epochs: 2, ..Default::default() };
    let model = sgm::train(&ds, &map, &cfg).unwrap();
    let back = SgmModel::from_text(&model.to_text(&map, &cfg)).unwrap();
    assert_eq!(back.w, model.w);
    assert_eq!(back.w_bar, model.w_bar);
    assert_eq!(back.t, model.t);
    assert_eq!(back.eta, model.eta);
}

#[test]
fn theory_schedules_need_a_scale() {
    let data = features(30, 2, 5, 11);
    let cfg = SgmConfig { schedule: "single-pass".parse().unwrap(), ..Default::default() };
    assert!(matches!(sgm::train_features(&data, &cfg), Err(Error::Config(_))));
    let model = sgm::train_features(&data, &SgmConfig { b: Some(2.0), ..cfg }).unwrap();
    assert!((model.eta - 2.0 / (4.0 * 30f64.sqrt())).abs() < 1e-15);
}
