#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rff_sgm::data::Dataset;
use rff_sgm::rff::BoxMuller;

/// `$RFF_SGM_DATA_DIR`, else `<workspace>/data`.
pub fn data_dir() -> PathBuf {
    let dir = match std::env::var_os(rff_sgm::cli::DATA_DIR_ENV) {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    };
    dir.canonicalize().unwrap_or(dir)
}

pub fn gaussian_matrix(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut g = BoxMuller::new(seed);
    Array2::from_shape_simple_fn((n, d), || g.next_normal())
}

/// Gaussian inputs labelled by a fixed random hyperplane, each label flipped
/// with probability `noise`.
pub fn noisy_linear(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
    let x = gaussian_matrix(n, d, seed);
    let w = gaussian_matrix(1, d, seed ^ 0xABCD).row(0).to_owned();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let y: Array1<f64> = x
        .rows()
        .into_iter()
        .map(|r| {
            let s = if r.dot(&w) >= 0.0 { 1.0 } else { -1.0 };
            if rng.gen::<f64>() < noise {
                -s
            } else {
                s
            }
        })
        .collect();
    Dataset::new("synthetic", x, y).unwrap()
}

/// Two well-separated Gaussian blobs at `±sep` along every axis.
pub fn blobs(n: usize, d: usize, sep: f64, seed: u64) -> Dataset {
    let mut x = gaussian_matrix(n, d, seed);
    let y: Array1<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    for (mut row, &yi) in x.rows_mut().into_iter().zip(y.iter()) {
        row.mapv_inplace(|v| 0.2 * v + yi * sep);
    }
    Dataset::new("blobs", x, y).unwrap()
}

/// Least-squares slope, intercept and R² of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
