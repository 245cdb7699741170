//! Constant-step stochastic gradient method over RFF-transformed data.
//!
//! Each epoch is one pass over a fresh seeded permutation of the training
//! set. The model keeps both the last iterate and the uniform average of all
//! iterates `w̄_T = (1/T)·Σ_{t=1..T} w_t`, where `w_t` is the weight vector
//! after step `t` and `w_0 = 0`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::loss::{huber_hinge, huber_hinge_derivative, LossConstants};
use crate::rff::{parse_header, FourierFeatureMap, Features};

/// Iterates beyond this count are never kept in a trace.
pub const MAX_TRACE: usize = 10_000;

/// How the constant step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Use `SgmConfig::eta` as given.
    Constant,
    /// `η = B/(L√n)`, the single-pass choice.
    SinglePass,
    /// `η = B·√((1+ε)n) / (L·√(T(n+2T)))`, minimizing the stability-aware bound.
    StabilityOptimal,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Constant => "constant",
            Schedule::SinglePass => "single-pass",
            Schedule::StabilityOptimal => "stability-optimal",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Schedule::Constant),
            "single-pass" => Ok(Schedule::SinglePass),
            "stability-optimal" => Ok(Schedule::StabilityOptimal),
            other => Err(Error::config(format!(
                "unknown schedule {other:?} (expected constant, single-pass or stability-optimal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgmConfig {
    pub eta: f64,
    pub epochs: usize,
    pub lambda: f64,
    pub seed: u64,
    pub schedule: Schedule,
    /// Scale `B` standing in for `‖f*‖₁`; required by the theory schedules.
    pub b: Option<f64>,
    /// Kernel approximation tolerance `ε` used by [`Schedule::StabilityOptimal`].
    pub epsilon: f64,
    pub constants: LossConstants,
    /// Number of leading iterates to record (capped at [`MAX_TRACE`]).
    pub trace: usize,
}

impl Default for SgmConfig {
    fn default() -> Self {
        SgmConfig {
            eta: 0.01,
            epochs: 1,
            lambda: 0.0,
            seed: 0,
            schedule: Schedule::Constant,
            b: None,
            epsilon: 0.0,
            constants: LossConstants::HUBER_HINGE,
            trace: 0,
        }
    }
}

/// Resolves the constant step size for `n` training samples.
///
/// Theory schedules need `config.b`; `T = epochs·n`.
pub fn resolve_eta(config: &SgmConfig, n: usize, lipschitz: f64, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("training set is empty"));
    }
    if config.schedule == Schedule::Constant {
        if !(config.eta >= 0.0 && config.eta.is_finite()) {
            return Err(Error::config(format!("eta must be non-negative, got {}", config.eta)));
        }
        return Ok(config.eta);
    }
    let b = config
        .b
        .ok_or_else(|| Error::config(format!("schedule {} requires B (‖f*‖₁ proxy)", config.schedule)))?;
    if b.is_nan() || b <= 0.0 || lipschitz.is_nan() || lipschitz <= 0.0 {
        return Err(Error::config("B and L must be positive"));
    }
    let n_f = n as f64;
    Ok(match config.schedule {
        Schedule::SinglePass => b / (lipschitz * n_f.sqrt()),
        Schedule::StabilityOptimal => {
            if config.epochs == 0 {
                return Err(Error::config("epochs must be at least 1"));
            }
            let t = (config.epochs * n) as f64;
            b * ((1.0 + epsilon) * n_f).sqrt() / (lipschitz * (t * (n_f + 2.0 * t)).sqrt())
        }
        Schedule::Constant => unreachable!(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgmModel {
    pub w: Array1<f64>,
    pub w_bar: Array1<f64>,
    /// Steps taken.
    pub t: usize,
    /// Resolved step size.
    pub eta: f64,
    /// `w_1, w_2, ...` when tracing was requested.
    pub trace: Vec<Array1<f64>>,
}

impl SgmModel {
    pub fn zeros(dim: usize, eta: f64) -> Self {
        SgmModel {
            w: Array1::zeros(dim),
            w_bar: Array1::zeros(dim),
            t: 0,
            eta,
            trace: Vec::new(),
        }
    }

    pub fn weights(&self, use_average: bool) -> ArrayView1<'_, f64> {
        if use_average {
            self.w_bar.view()
        } else {
            self.w.view()
        }
    }

    /// Flat text record: header, then the `w` and `w_bar` lines.
    pub fn to_text(&self, map: &FourierFeatureMap, config: &SgmConfig) -> String {
        let join = |a: &Array1<f64>| a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "rff-sgm-model t={} eta={} epochs={} lambda={} seed={} schedule={} map_d={} map_D={} map_gamma={} map_seed={}\nw {}\nw_bar {}\n",
            self.t,
            self.eta,
            config.epochs,
            config.lambda,
            config.seed,
            config.schedule,
            map.input_dim(),
            map.components(),
            map.gamma(),
            map.seed(),
            join(&self.w),
            join(&self.w_bar),
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::domain("empty model file"))?;
        let fields = parse_header(header, "rff-sgm-model")?;
        let field = |key: &str| fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let t = field("t").and_then(|v| v.parse().ok()).ok_or_else(|| Error::domain("model lacks t"))?;
        let eta = field("eta").and_then(|v| v.parse().ok()).ok_or_else(|| Error::domain("model lacks eta"))?;

        let mut vector = |tag: &str| -> Result<Array1<f64>> {
            let line = lines.next().ok_or_else(|| Error::domain(format!("model lacks {tag}")))?;
            let mut toks = line.split_whitespace();
            if toks.next() != Some(tag) {
                return Err(Error::domain(format!("expected {tag} line")));
            }
            toks.map(|s| s.parse::<f64>().map_err(|_| Error::domain(format!("bad weight {s:?}"))))
                .collect::<Result<Vec<_>>>()
                .map(Array1::from)
        };
        let w = vector("w")?;
        let w_bar = vector("w_bar")?;
        if w.len() != w_bar.len() {
            return Err(Error::domain("w and w_bar lengths differ"));
        }
        Ok(SgmModel {
            w,
            w_bar,
            t,
            eta,
            trace: Vec::new(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>, map: &FourierFeatureMap, config: &SgmConfig) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text(map, config)).map_err(|e| Error::io(path, e))
    }
}

/// Trains on a raw dataset, featurizing it with `map` first.
pub fn train(train: &Dataset, map: &FourierFeatureMap, config: &SgmConfig) -> Result<SgmModel> {
    if train.d() != map.input_dim() {
        return Err(Error::domain(format!(
            "feature map expects d = {}, training data has d = {}",
            map.input_dim(),
            train.d()
        )));
    }
    train_features(&map.featurize(train)?, config)
}

/// Trains on pre-transformed features. `T = epochs·n` steps.
pub fn train_features(data: &Features, config: &SgmConfig) -> Result<SgmModel> {
    let n = data.n();
    if n == 0 {
        return Err(Error::domain("training set is empty"));
    }
    if config.epochs == 0 {
        return Err(Error::config("epochs must be at least 1"));
    }
    if config.lambda < 0.0 {
        return Err(Error::config("lambda must be non-negative"));
    }
    let eta = resolve_eta(config, n, config.constants.lipschitz, config.epsilon)?;
    let dim = data.dim();
    let trace_limit = config.trace.min(MAX_TRACE);

    let mut model = SgmModel::zeros(dim, eta);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let z = &data.z;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let zi = z.row(i);
            let y = data.labels[i];
            let u = y * model.w.dot(&zi);
            if !u.is_finite() {
                return Err(Error::Diverged { step: model.t, eta });
            }
            let g = huber_hinge_derivative(u) * y;
            let shrink = 1.0 - eta * config.lambda;
            let step = eta * g;
            model
                .w
                .zip_mut_with(&zi, |w, &zv| *w = shrink * *w - step * zv);

            model.t += 1;
            let inv_t = 1.0 / model.t as f64;
            model
                .w_bar
                .zip_mut_with(&model.w, |avg, &w| *avg += (w - *avg) * inv_t);
            if model.trace.len() < trace_limit {
                model.trace.push(model.w.clone());
            }
        }
    }
    if model.w.iter().any(|v| !v.is_finite()) || model.w_bar.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged { step: model.t, eta });
    }
    Ok(model)
}

/// `sign(wᵀz(x))` with `sign(0) = +1`.
pub fn predict(model: &SgmModel, map: &FourierFeatureMap, x: ArrayView1<f64>, use_average: bool) -> Result<f64> {
    let z = map.transform(x)?;
    let w = model.weights(use_average);
    if w.len() != z.len() {
        return Err(Error::domain("model and feature map dimensions differ"));
    }
    Ok(sign(w.dot(&z)))
}

pub(crate) fn sign(score: f64) -> f64 {
    if score >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Mean huber-hinge loss and 0/1 error of `w` on transformed data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Risk {
    pub loss: f64,
    pub zero_one: f64,
}

pub fn empirical_risk_features(w: ArrayView1<f64>, data: &Features) -> Result<Risk> {
    if data.n() == 0 {
        return Err(Error::domain("risk over an empty set"));
    }
    if data.dim() != w.len() {
        return Err(Error::domain("weights and features dimensions differ"));
    }
    let scores = data.z.dot(&w);
    let (mut loss, mut wrong) = (0.0, 0usize);
    for (&s, &y) in scores.iter().zip(data.labels.iter()) {
        loss += huber_hinge(y * s);
        if sign(s) != y {
            wrong += 1;
        }
    }
    let n = data.n() as f64;
    Ok(Risk {
        loss: loss / n,
        zero_one: wrong as f64 / n,
    })
}

pub fn empirical_risk(w: ArrayView1<f64>, data: &Dataset, map: &FourierFeatureMap) -> Result<Risk> {
    empirical_risk_features(w, &map.featurize(data)?)
}

/// Full-batch gradient of `λ/2‖w‖² + mean l(y·wᵀz)`.
pub fn full_gradient(w: ArrayView1<f64>, data: &Features, lambda: f64) -> Array1<f64> {
    let margins = data.z.dot(&w) * &data.labels;
    let coeffs: Array1<f64> = margins
        .iter()
        .zip(data.labels.iter())
        .map(|(&u, &y)| huber_hinge_derivative(u) * y / data.n() as f64)
        .collect();
    data.z.t().dot(&coeffs) + &w.mapv(|v| lambda * v)
}

/// Output of [`minimize_full_batch`].
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub w: Array1<f64>,
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Minimizes the (optionally regularized) empirical huber-hinge risk by a
/// generalized Newton method with Armijo backtracking.
///
/// The loss is piecewise quadratic, so the Hessian on the active set
/// `{i : |u_i| ≤ 1}` is exact between breakpoints. Stops once the gradient
/// norm is at most `tol`.
pub fn minimize_full_batch(data: &Features, lambda: f64, tol: f64, max_iter: usize) -> Result<Minimizer> {
    let n = data.n();
    if n == 0 {
        return Err(Error::domain("empty training set"));
    }
    let dim = data.dim();
    let objective = |w: &Array1<f64>| -> f64 {
        let margins = data.z.dot(w) * &data.labels;
        0.5 * lambda * w.dot(w) + margins.iter().map(|&u| huber_hinge(u)).sum::<f64>() / n as f64
    };

    let mut w = Array1::<f64>::zeros(dim);
    let mut f = objective(&w);
    for iter in 0..max_iter {
        let g = full_gradient(w.view(), data, lambda);
        let gnorm = g.dot(&g).sqrt();
        if gnorm <= tol {
            return Ok(Minimizer {
                w,
                objective: f,
                grad_norm: gnorm,
                iterations: iter,
            });
        }

        let margins = data.z.dot(&w) * &data.labels;
        let mut hessian = Array2::<f64>::eye(dim) * lambda;
        for (i, &u) in margins.iter().enumerate() {
            if (-1.0..=1.0).contains(&u) {
                let zi = data.z.row(i);
                let c = 2.0 / n as f64;
                for a in 0..dim {
                    let za = c * zi[a];
                    if za == 0.0 {
                        continue;
                    }
                    for b in 0..dim {
                        hessian[[a, b]] += za * zi[b];
                    }
                }
            }
        }
        let trace = hessian.diag().sum() / dim as f64;
        let direction = newton_direction(&hessian, &g, trace.max(1e-12))
            .filter(|p| p.dot(&g) < 0.0)
            .unwrap_or_else(|| g.mapv(|v| -v));

        let slope = direction.dot(&g);
        let mut step = 1.0;
        loop {
            let candidate = &w + &(&direction * step);
            let fc = objective(&candidate);
            if fc <= f + 1e-4 * step * slope || step < 1e-20 {
                w = candidate;
                f = fc;
                break;
            }
            step *= 0.5;
        }
    }
    let g = full_gradient(w.view(), data, lambda);
    Ok(Minimizer {
        grad_norm: g.dot(&g).sqrt(),
        objective: f,
        w,
        iterations: max_iter,
    })
}

/// Solves `(H + μI)p = -g` by Cholesky, raising `μ` until `H + μI` factors.
fn newton_direction(h: &Array2<f64>, g: &Array1<f64>, scale: f64) -> Option<Array1<f64>> {
    let dim = g.len();
    let mut jitter = 0.0;
    for _ in 0..12 {
        let mut m = h.clone();
        for i in 0..dim {
            m[[i, i]] += jitter;
        }
        if let Some(l) = cholesky(&m) {
            let rhs = g.mapv(|v| -v);
            return Some(cholesky_solve(&l, &rhs));
        }
        jitter = if jitter == 0.0 { 1e-12 * scale } else { jitter * 100.0 };
    }
    None
}

fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if diag.is_nan() || diag <= 0.0 {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in j + 1..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = b.len();
    let mut y = b.clone();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[[i, k]] * y[k];
        }
        y[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[[k, i]] * y[k];
        }
        y[i] /= l[[i, i]];
    }
    y
}
