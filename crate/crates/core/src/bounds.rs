//! Closed-form bound calculators for RFF + constant-step SGD.
//!
//! Notation used throughout: `n` training samples, `T` SGD steps, step size
//! `η`, Lipschitz constant `L`, kernel approximation tolerance `ε`, input
//! dimension `d`, `D` Fourier components, spectral scale `σ_p`, domain
//! diameter `diam`, and `B` standing in for `‖f*‖₁`.
//!
//! The formulas are evaluated as stated. In particular the stability-aware
//! excess risk
//!
//! ```text
//! (1+ε)B²/(2Tη) + ηL²/2 + TL²η/n
//! ```
//!
//! is minimized at `η* = B·√((1+ε)n) / (L·√(T(n+2T)))`, where it equals
//! `B·L·√(1+ε)/√n · √((n+2T)/T)`.

use std::fmt::Write as _;

use ndarray::{ArrayView2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    /// Total SGD steps `T`.
    pub steps: usize,
    pub eta: f64,
    pub lipschitz: f64,
    pub epsilon: f64,
    pub d: usize,
    /// Number of Fourier components `D`.
    pub components: usize,
    pub sigma_p: f64,
    pub diam: f64,
    /// `B`, the `‖f*‖₁` proxy.
    pub b: f64,
    /// `‖w*‖²`, when known.
    pub w_star_norm_sq: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            n: 0,
            steps: 0,
            eta: 0.0,
            lipschitz: 4.0,
            epsilon: 0.0,
            d: 0,
            components: 0,
            sigma_p: 0.0,
            diam: 0.0,
            b: 0.0,
            w_star_norm_sq: 0.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be non-negative, got {v}")))
    }
}

fn count(name: &str, v: usize) -> Result<f64> {
    if v == 0 {
        Err(Error::domain(format!("{name} must be at least 1")))
    } else {
        Ok(v as f64)
    }
}

/// Success probability of the uniform kernel approximation guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    /// `1 − 2⁸(σ_p·diam/ε)²·exp(−Dε²/(4(d+2)))`, possibly negative.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub clamped: f64,
}

pub fn rff_probability(inputs: &BoundInputs) -> Result<Probability> {
    let sigma = positive("sigma_p", inputs.sigma_p)?;
    let diam = positive("diam", inputs.diam)?;
    let eps = positive("epsilon", inputs.epsilon)?;
    let d = count("d", inputs.d)?;
    let big_d = count("D", inputs.components)?;
    let ratio = sigma * diam / eps;
    let raw = 1.0 - 256.0 * ratio * ratio * (-big_d * eps * eps / (4.0 * (d + 2.0))).exp();
    Ok(Probability {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// `⌈c·(d/ε²)·ln(σ_p·diam/ε)⌉`; when the log argument is at most 1 the log
/// factor is dropped and `⌈c·d/ε²⌉` is returned.
pub fn required_components(inputs: &BoundInputs, c: f64) -> Result<u64> {
    let c = positive("c", c)?;
    let sigma = positive("sigma_p", inputs.sigma_p)?;
    let diam = positive("diam", inputs.diam)?;
    let eps = positive("epsilon", inputs.epsilon)?;
    let d = count("d", inputs.d)?;
    let arg = sigma * diam / eps;
    let base = c * d / (eps * eps);
    let value = if arg > 1.0 { base * arg.ln() } else { base };
    Ok(value.ceil() as u64)
}

/// `R* + ‖w*‖²/(2Tη) + ηL²/2`.
pub fn averaged_iterate_bound(inputs: &BoundInputs, r_star: f64) -> Result<f64> {
    let t = count("T", inputs.steps)?;
    let eta = positive("eta", inputs.eta)?;
    let l = positive("L", inputs.lipschitz)?;
    let w2 = non_negative("w_star_norm_sq", inputs.w_star_norm_sq)?;
    Ok(r_star + w2 / (2.0 * t * eta) + 0.5 * eta * l * l)
}

/// Optimization error bound `(1+ε)B²/(2Tη) + ηL²/2`.
pub fn opt_error_bound(inputs: &BoundInputs) -> Result<f64> {
    let t = count("T", inputs.steps)?;
    let eta = positive("eta", inputs.eta)?;
    let l = positive("L", inputs.lipschitz)?;
    let b = positive("B", inputs.b)?;
    let eps = non_negative("epsilon", inputs.epsilon)?;
    Ok((1.0 + eps) * b * b / (2.0 * t * eta) + 0.5 * eta * l * l)
}

/// Convergence bound for the approximated problem:
/// `R* + (1+ε)B²/(2Tη) + ηL²/2`, plus `ε·L·B` when `include_eps_term` is set.
///
/// The extra `ε·L·B` term appears in one intermediate form of the argument
/// and is absent from every later step; it is off by default.
pub fn approx_convergence_bound(inputs: &BoundInputs, r_star: f64, include_eps_term: bool) -> Result<f64> {
    let base = r_star + opt_error_bound(inputs)?;
    Ok(if include_eps_term {
        base + inputs.epsilon * inputs.lipschitz * inputs.b
    } else {
        base
    })
}

/// Uniform stability bound `TL²η/n`.
pub fn stability_bound(inputs: &BoundInputs) -> Result<f64> {
    let t = count("T", inputs.steps)?;
    let n = count("n", inputs.n)?;
    let eta = non_negative("eta", inputs.eta)?;
    let l = positive("L", inputs.lipschitz)?;
    Ok(t * l * l * eta / n)
}

/// Single-pass (`T = n`) bound `R* + (2+ε)·B·L/(2√n)`.
pub fn single_pass_bound(inputs: &BoundInputs, r_star: f64) -> Result<f64> {
    let n = count("n", inputs.n)?;
    let l = positive("L", inputs.lipschitz)?;
    let b = positive("B", inputs.b)?;
    let eps = non_negative("epsilon", inputs.epsilon)?;
    Ok(r_star + (2.0 + eps) * b * l / (2.0 * n.sqrt()))
}

/// Right-hand side of the risk decomposition at step size `eta`:
/// optimization error bound plus stability bound.
pub fn stability_aware_excess(inputs: &BoundInputs, eta: f64) -> Result<f64> {
    let at = BoundInputs { eta, ..*inputs };
    Ok(opt_error_bound(&at)? + stability_bound(&at)?)
}

/// `η* = B·√((1+ε)n) / (L·√(T(n+2T)))`.
pub fn optimal_eta(inputs: &BoundInputs) -> Result<f64> {
    let n = count("n", inputs.n)?;
    let t = count("T", inputs.steps)?;
    let l = positive("L", inputs.lipschitz)?;
    let b = positive("B", inputs.b)?;
    let eps = non_negative("epsilon", inputs.epsilon)?;
    Ok(b * ((1.0 + eps) * n).sqrt() / (l * (t * (n + 2.0 * t)).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizationBound {
    pub bound: f64,
    /// `B·L·√(1+ε)/√n · √((n+2T)/T)`.
    pub excess: f64,
    pub optimal_eta: f64,
}

/// Stability-aware generalization bound at the optimal step size.
pub fn generalization_bound(inputs: &BoundInputs, empirical_min: f64) -> Result<GeneralizationBound> {
    let n = count("n", inputs.n)?;
    let t = count("T", inputs.steps)?;
    let l = positive("L", inputs.lipschitz)?;
    let b = positive("B", inputs.b)?;
    let eps = non_negative("epsilon", inputs.epsilon)?;
    let excess = b * l * (1.0 + eps).sqrt() / n.sqrt() * ((n + 2.0 * t) / t).sqrt();
    Ok(GeneralizationBound {
        bound: empirical_min + excess,
        excess,
        optimal_eta: optimal_eta(inputs)?,
    })
}

/// Diagonal length of the axis-aligned bounding box of the rows of `x`.
pub fn bounding_box_diameter(x: ArrayView2<f64>) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    x.axis_iter(Axis(1))
        .map(|col| {
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            (hi - lo) * (hi - lo)
        })
        .sum::<f64>()
        .sqrt()
}

/// One named value in a [`BoundTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub name: &'static str,
    pub value: Option<f64>,
    pub note: String,
}

/// Every calculator evaluated on one set of inputs. Calculators whose inputs
/// are missing produce an empty value with the reason in `note`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn compute(inputs: &BoundInputs, r_star: f64, c: f64, include_eps_term: bool) -> Self {
        let mut rows = Vec::new();
        let mut push = |name: &'static str, r: Result<f64>, note: String| {
            let (value, note) = match r {
                Ok(v) => (Some(v), note),
                Err(e) => (None, e.to_string()),
            };
            rows.push(BoundRow { name, value, note });
        };

        let prob = rff_probability(inputs);
        push(
            "rff_probability",
            prob.as_ref().map(|p| p.clamped).map_err(clone_err),
            String::new(),
        );
        push("rff_probability_raw", prob.map(|p| p.raw), String::new());
        push(
            "required_D",
            required_components(inputs, c).map(|v| v as f64),
            format!("c={c}"),
        );
        push("averaged_iterate_bound", averaged_iterate_bound(inputs, r_star), format!("R*={r_star}"));
        push("opt_error_bound", opt_error_bound(inputs), String::new());
        push(
            "convergence_bound",
            approx_convergence_bound(inputs, r_star, include_eps_term),
            format!("eps_L_B_term={}", if include_eps_term { "on" } else { "off" }),
        );
        push("stability_bound", stability_bound(inputs), String::new());
        push("single_pass_bound", single_pass_bound(inputs, r_star), format!("R*={r_star}"));
        let thm = generalization_bound(inputs, r_star);
        push(
            "generalization_bound",
            thm.as_ref().map(|g| g.bound).map_err(clone_err),
            format!("empirical_min={r_star}"),
        );
        push(
            "generalization_excess",
            thm.as_ref().map(|g| g.excess).map_err(clone_err),
            String::new(),
        );
        push("optimal_eta", thm.map(|g| g.optimal_eta), String::new());
        BoundTable { rows }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.name == name).and_then(|r| r.value)
    }

    /// `bound,value,note`, one row per calculator.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bound,value,note\n");
        for row in &self.rows {
            let value = row.value.map(|v| v.to_string()).unwrap_or_default();
            let note = if row.note.contains([',', '"']) {
                format!("\"{}\"", row.note.replace('"', "\"\""))
            } else {
                row.note.clone()
            };
            writeln!(s, "{},{},{}", row.name, value, note).unwrap();
        }
        s
    }
}

fn clone_err(e: &Error) -> Error {
    Error::Domain(match e {
        Error::Domain(m) => m.clone(),
        other => other.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn probability_limits() {
        let mut inp = BoundInputs {
            sigma_p: 1.0,
            diam: 1.0,
            epsilon: 1.0,
            d: 2,
            components: 100_000,
            ..BoundInputs::default()
        };
        assert_eq!(rff_probability(&inp).unwrap().raw, 1.0);

        // Exponent −Dε²/(4(d+2)) = −ln 2⁸ makes the raw value exactly zero.
        inp.components = 1;
        let d_cross = 4.0 * 4.0 * 256f64.ln();
        let p = 1.0 - 256.0 * (-d_cross / 16.0f64).exp();
        assert!(close(p, 0.0, 1e-15));
        inp.components = d_cross.ceil() as usize;
        let above = rff_probability(&inp).unwrap();
        inp.components = d_cross.floor() as usize;
        let below = rff_probability(&inp).unwrap();
        assert!(above.raw > 0.0 && below.raw < 0.0);
        assert_eq!(below.clamped, 0.0);
    }

    #[test]
    fn required_components_examples() {
        let inp = BoundInputs {
            sigma_p: std::f64::consts::E,
            diam: 1.0,
            epsilon: 1.0,
            d: 4,
            ..BoundInputs::default()
        };
        assert_eq!(required_components(&inp, 1.0).unwrap(), 4);

        let small = BoundInputs { sigma_p: 0.5, ..inp };
        assert_eq!(required_components(&small, 1.0).unwrap(), 4);

        let wide = BoundInputs { sigma_p: 30.0, ..inp };
        let half = BoundInputs { epsilon: 0.5, ..wide };
        assert!(required_components(&half, 1.0).unwrap() >= 4 * required_components(&wide, 1.0).unwrap());
    }

    #[test]
    fn averaged_iterate_examples() {
        let inp = BoundInputs {
            steps: 100,
            eta: 0.05774,
            lipschitz: 1.0,
            w_star_norm_sq: 1.0,
            ..BoundInputs::default()
        };
        assert!(close(averaged_iterate_bound(&inp, 0.0).unwrap(), 0.115465, 1e-5));

        let zero = BoundInputs { w_star_norm_sq: 0.0, ..inp };
        assert!(close(averaged_iterate_bound(&zero, 0.3).unwrap(), 0.3 + 0.05774 / 2.0, 1e-15));

        // η* = ‖w*‖/(L√T) balances the two terms.
        let w = 1.7f64;
        let tuned = BoundInputs {
            eta: w / (2.0 * 100f64.sqrt()),
            lipschitz: 2.0,
            w_star_norm_sq: w * w,
            ..inp
        };
        assert!(close(averaged_iterate_bound(&tuned, 0.0).unwrap(), w * 2.0 / 10.0, 1e-14));
    }

    #[test]
    fn opt_error_examples() {
        let inp = BoundInputs {
            b: 1.0,
            epsilon: 0.1,
            steps: 1000,
            eta: 0.01,
            lipschitz: 4.0,
            ..BoundInputs::default()
        };
        assert!(close(opt_error_bound(&inp).unwrap(), 0.135, 1e-12));
        let longer = BoundInputs { steps: 2000, ..inp };
        assert!(opt_error_bound(&longer).unwrap() < opt_error_bound(&inp).unwrap());

        let exact = BoundInputs { epsilon: 0.0, w_star_norm_sq: 1.0, ..inp };
        assert!(close(opt_error_bound(&exact).unwrap(), averaged_iterate_bound(&exact, 0.0).unwrap(), 1e-15));

        let with_term = approx_convergence_bound(&inp, 0.0, true).unwrap();
        assert!(close(with_term - approx_convergence_bound(&inp, 0.0, false).unwrap(), 0.4, 1e-12));
    }

    #[test]
    fn stability_examples() {
        let single = BoundInputs {
            n: 100,
            steps: 100,
            lipschitz: 4.0,
            eta: 0.025,
            ..BoundInputs::default()
        };
        assert!(close(stability_bound(&single).unwrap(), 0.4, 1e-15));
        let doubled = BoundInputs { steps: 200, ..single };
        assert!(close(stability_bound(&doubled).unwrap(), 0.8, 1e-15));
        let inp = BoundInputs {
            n: 1000,
            steps: 5000,
            lipschitz: 4.0,
            eta: 0.001,
            ..BoundInputs::default()
        };
        assert!(close(stability_bound(&inp).unwrap(), 0.08, 1e-15));
    }

    #[test]
    fn single_pass_examples() {
        let inp = BoundInputs {
            n: 400,
            b: 1.0,
            lipschitz: 4.0,
            epsilon: 0.1,
            ..BoundInputs::default()
        };
        assert!(close(single_pass_bound(&inp, 0.0).unwrap(), 0.21, 1e-15));
        let exact = BoundInputs { epsilon: 0.0, ..inp };
        assert!(close(single_pass_bound(&exact, 0.5).unwrap(), 0.5 + 4.0 / 20.0, 1e-15));
        let more = BoundInputs { n: 1600, ..exact };
        assert!(close(single_pass_bound(&more, 0.0).unwrap(), 0.1, 1e-15));
    }

    #[test]
    fn generalization_examples() {
        let inp = BoundInputs {
            n: 100,
            steps: 100,
            lipschitz: 1.0,
            b: 1.0,
            epsilon: 0.0,
            ..BoundInputs::default()
        };
        let g = generalization_bound(&inp, 0.0).unwrap();
        assert!(close(g.optimal_eta, 0.0577350269, 1e-9));
        assert!(close(g.excess, 3f64.sqrt() / 10.0, 1e-15));

        // Large T: excess tends to B·L·√(2(1+ε))/√n.
        let long = BoundInputs { steps: 100_000_000, epsilon: 0.3, ..inp };
        let g = generalization_bound(&long, 0.0).unwrap();
        assert!(close(g.excess, (2.0 * 1.3f64).sqrt() / 10.0, 1e-6));

        // Closed form equals the decomposition evaluated at η*.
        for (n, t, eps) in [(100, 100, 0.0), (768, 3000, 0.2), (50, 7, 1.0)] {
            let inp = BoundInputs { n, steps: t, epsilon: eps, lipschitz: 4.0, b: 2.5, ..inp };
            let g = generalization_bound(&inp, 0.0).unwrap();
            let at_opt = stability_aware_excess(&inp, g.optimal_eta).unwrap();
            assert!(close(at_opt, g.excess, 1e-10 * g.excess.max(1.0)));
        }
    }

    #[test]
    fn diameter_of_box() {
        let x = array![[0.0, 0.0], [3.0, -1.0], [1.0, 3.0]];
        assert_eq!(bounding_box_diameter(x.view()), 5.0);
    }

    #[test]
    fn table_reports_missing_inputs() {
        let inp = BoundInputs {
            n: 100,
            steps: 100,
            lipschitz: 1.0,
            b: 1.0,
            ..BoundInputs::default()
        };
        let table = BoundTable::compute(&inp, 0.0, 4.0, false);
        assert!(close(table.get("optimal_eta").unwrap(), 0.0577350269, 1e-9));
        assert_eq!(table.get("rff_probability"), None);
        let csv = table.to_csv();
        assert!(csv.starts_with("bound,value,note\n"));
        assert_eq!(csv.lines().count(), table.rows.len() + 1);
    }
}
