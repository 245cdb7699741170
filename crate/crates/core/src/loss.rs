//! Huber-hinge loss on the margin `u = y·wᵀz`:
//!
//! ```text
//! l(u) = -4u        if u < -1
//!        (1 - u)²   if -1 ≤ u ≤ 1
//!        0          if u > 1
//! ```
//!
//! With unit-norm features the loss is 4-Lipschitz in `w` and its gradient is
//! 2-Lipschitz.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Lipschitz constant `L` and smoothness constant `β` of the loss in `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConstants {
    pub lipschitz: f64,
    pub smoothness: f64,
}

impl LossConstants {
    /// Constants for the huber-hinge loss under `‖z(x)‖ = 1`.
    pub const HUBER_HINGE: LossConstants = LossConstants {
        lipschitz: 4.0,
        smoothness: 2.0,
    };
}

impl Default for LossConstants {
    fn default() -> Self {
        Self::HUBER_HINGE
    }
}

pub fn huber_hinge(u: f64) -> f64 {
    if u < -1.0 {
        -4.0 * u
    } else if u <= 1.0 {
        (1.0 - u) * (1.0 - u)
    } else {
        0.0
    }
}

/// `dl/du`. At `u = ±1` the quadratic branch is used; it agrees with both
/// neighbours there.
pub fn huber_hinge_derivative(u: f64) -> f64 {
    if u < -1.0 {
        -4.0
    } else if u <= 1.0 {
        -2.0 * (1.0 - u)
    } else {
        0.0
    }
}

/// Gradient of `l(y·wᵀz)` with respect to `w`: `l'(u)·y·z`.
pub fn huber_hinge_grad_w(w: ArrayView1<f64>, z: ArrayView1<f64>, y: f64) -> Array1<f64> {
    let u = y * w.dot(&z);
    let scale = huber_hinge_derivative(u) * y;
    z.mapv(|v| scale * v)
}

/// `λ/2·‖w‖² + mean_i l(y_i·wᵀz_i)` over the rows of `z`.
pub fn regularized_objective(
    w: ArrayView1<f64>,
    z: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
) -> Result<f64> {
    if z.nrows() == 0 {
        return Err(Error::domain("objective over an empty batch"));
    }
    if lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be non-negative, got {lambda}")));
    }
    if z.nrows() != y.len() || z.ncols() != w.len() {
        return Err(Error::domain("batch shape does not match weights/labels"));
    }
    let margins = z.dot(&w) * y;
    let mean_loss = margins.iter().map(|&u| huber_hinge(u)).sum::<f64>() / z.nrows() as f64;
    Ok(0.5 * lambda * w.dot(&w) + mean_loss)
}
