//! Random Fourier features for the Gaussian RBF kernel
//! `k(x, y) = exp(-γ‖x − y‖²)`.
//!
//! A map with `D` frequencies produces `2D` features, a cos/sin pair per
//! frequency, scaled by `1/√D` so that every transformed vector has unit norm.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(KernelParams { gamma })
    }
}

/// Exact RBF kernel value.
pub fn exact_kernel(params: KernelParams, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "kernel arguments have dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    let sq: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-params.gamma * sq).exp())
}

/// `σ_p = √(2γd)`, the root second moment of the RBF spectral density.
pub fn derived_sigma_p(params: KernelParams, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok((2.0 * params.gamma * d as f64).sqrt())
}

/// Source of standard normal deviates: Box–Muller over a ChaCha8 stream.
///
/// Both outputs of each transform are used. The sequence depends only on the
/// seed, so frequency matrices reproduce across platforms.
pub struct BoxMuller {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl BoxMuller {
    pub fn new(seed: u64) -> Self {
        BoxMuller {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Sampled frequency matrix defining `z: R^d → R^{2D}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFeatureMap {
    /// `D × d`, rows drawn from `N(0, 2γ I)`. Unscaled.
    frequencies: Array2<f64>,
    gamma: f64,
    seed: u64,
}

impl FourierFeatureMap {
    /// Draws `components` frequencies for inputs of dimension `d`.
    pub fn sample(d: usize, components: usize, gamma: f64, seed: u64) -> Result<Self> {
        if components == 0 {
            return Err(Error::domain("number of Fourier components must be at least 1"));
        }
        if d == 0 {
            return Err(Error::domain("input dimension must be at least 1"));
        }
        let params = KernelParams::new(gamma)?;
        let scale = (2.0 * params.gamma).sqrt();
        let mut normals = BoxMuller::new(seed);
        let frequencies = Array2::from_shape_simple_fn((components, d), || scale * normals.next_normal());
        Ok(FourierFeatureMap {
            frequencies,
            gamma,
            seed,
        })
    }

    /// Builds a map from an explicit frequency matrix.
    pub fn from_frequencies(frequencies: Array2<f64>, gamma: f64, seed: u64) -> Result<Self> {
        KernelParams::new(gamma)?;
        if frequencies.nrows() == 0 || frequencies.ncols() == 0 {
            return Err(Error::domain("frequency matrix must be non-empty"));
        }
        if frequencies.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("frequency matrix has non-finite entries"));
        }
        Ok(FourierFeatureMap {
            frequencies,
            gamma,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.frequencies.ncols()
    }

    /// Number of frequencies `D`.
    pub fn components(&self) -> usize {
        self.frequencies.nrows()
    }

    /// Length of a transformed vector, `2D`.
    pub fn output_dim(&self) -> usize {
        2 * self.components()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequencies(&self) -> ArrayView2<'_, f64> {
        self.frequencies.view()
    }

    pub fn kernel(&self) -> KernelParams {
        KernelParams { gamma: self.gamma }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.input_dim() {
            return Err(Error::domain(format!(
                "feature map expects d = {}, got {got}",
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// `z(x) = (1/√D)·[cos ω_iᵀx, sin ω_iᵀx]_{i=1..D}`, pairs interleaved.
    pub fn transform(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_dim(x.len())?;
        let mut out = Array1::zeros(self.output_dim());
        self.transform_into(x, out.as_slice_mut().expect("fresh array is contiguous"));
        Ok(out)
    }

    /// Writes `z(x)` into `out` (length `2D`). Dimensions are not checked.
    pub(crate) fn transform_into(&self, x: ArrayView1<f64>, out: &mut [f64]) {
        let scale = 1.0 / (self.components() as f64).sqrt();
        for (omega, pair) in self.frequencies.rows().into_iter().zip(out.chunks_exact_mut(2)) {
            let (s, c) = omega.dot(&x).sin_cos();
            pair[0] = scale * c;
            pair[1] = scale * s;
        }
    }

    /// Transforms every row of `x`; returns an `n × 2D` matrix.
    pub fn transform_rows(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(x.ncols())?;
        let mut out = Array2::zeros((x.nrows(), self.output_dim()));
        for (row, mut z) in x.rows().into_iter().zip(out.rows_mut()) {
            self.transform_into(row, z.as_slice_mut().expect("row of standard-layout array"));
        }
        Ok(out)
    }

    /// Transforms a whole dataset, keeping its labels.
    pub fn featurize(&self, ds: &Dataset) -> Result<Features> {
        Ok(Features {
            z: self.transform_rows(ds.features.view())?,
            labels: ds.labels.clone(),
        })
    }

    /// Plain-text dump: a header line followed by one line per frequency.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "rff-map d={} D={} gamma={} seed={}",
            self.input_dim(),
            self.components(),
            self.gamma,
            self.seed
        )
        .unwrap();
        for row in self.frequencies.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::domain("empty feature-map file"))?;
        let fields = parse_header(header, "rff-map")?;
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::domain(format!("feature-map header lacks {key}")))
        };
        let bad = |key: &str| Error::domain(format!("bad {key} in feature-map header"));
        let d: usize = get("d")?.parse().map_err(|_| bad("d"))?;
        let components: usize = get("D")?.parse().map_err(|_| bad("D"))?;
        let gamma: f64 = get("gamma")?.parse().map_err(|_| bad("gamma"))?;
        let seed: u64 = get("seed")?.parse().map_err(|_| bad("seed"))?;

        let mut values = Vec::with_capacity(d * components);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            for tok in line.split_whitespace() {
                values.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::domain(format!("bad frequency value {tok:?}")))?,
                );
            }
        }
        let frequencies = Array2::from_shape_vec((components, d), values)
            .map_err(|_| Error::domain("frequency count does not match d × D"))?;
        Self::from_frequencies(frequencies, gamma, seed)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Parses `tag key=value key=value ...`.
pub(crate) fn parse_header<'a>(line: &'a str, tag: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(Error::domain(format!("expected a {tag} header, got {line:?}")));
    }
    parts
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| Error::domain(format!("malformed header field {kv:?}")))
        })
        .collect()
}

/// A dataset after the feature map: `n × 2D` rows with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    pub z: Array2<f64>,
    pub labels: Array1<f64>,
}

impl Features {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    pub fn select(&self, indices: &[usize]) -> Features {
        Features {
            z: self.z.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Median-heuristic bandwidth `γ = 1/(2·m²)`, where `m` is the median
/// pairwise Euclidean distance over at most `max_points` rows chosen with
/// `seed`.
pub fn median_heuristic_gamma(x: ArrayView2<f64>, max_points: usize, seed: u64) -> Result<f64> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::domain("median heuristic needs at least two points"));
    }
    let rows: Vec<usize> = if n > max_points.max(2) {
        let mut picked = index::sample(&mut ChaCha8Rng::seed_from_u64(seed), n, max_points.max(2)).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..n).collect()
    };

    let mut dists = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            let sq: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j).iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            dists.push(sq.sqrt());
        }
    }
    let mid = dists.len() / 2;
    let (_, &mut upper, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if dists.len() % 2 == 1 {
        upper
    } else {
        let lower = dists[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if median <= 0.0 {
        return Err(Error::domain("median pairwise distance is zero"));
    }
    Ok(1.0 / (2.0 * median * median))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn shapes() {
        let map = FourierFeatureMap::sample(3, 5, 1.0, 0).unwrap();
        assert_eq!(map.frequencies().dim(), (5, 3));
        assert_eq!(map.output_dim(), 10);
        assert_eq!(map.transform(array![1.0, 2.0, 3.0].view()).unwrap().len(), 10);
    }

    #[test]
    fn same_seed_same_frequencies() {
        let a = FourierFeatureMap::sample(4, 20, 0.3, 99).unwrap();
        let b = FourierFeatureMap::sample(4, 20, 0.3, 99).unwrap();
        assert_eq!(a.frequencies(), b.frequencies());
        let c = FourierFeatureMap::sample(4, 20, 0.3, 100).unwrap();
        assert_ne!(a.frequencies(), c.frequencies());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(FourierFeatureMap::sample(3, 0, 1.0, 0).is_err());
        assert!(FourierFeatureMap::sample(3, 4, 0.0, 0).is_err());
        assert!(FourierFeatureMap::sample(3, 4, -1.0, 0).is_err());
        let map = FourierFeatureMap::sample(3, 4, 1.0, 0).unwrap();
        assert!(matches!(map.transform(array![1.0, 2.0].view()), Err(Error::Domain(_))));
        let k = KernelParams::new(1.0).unwrap();
        assert!(exact_kernel(k, array![1.0].view(), array![1.0, 2.0].view()).is_err());
    }

    #[test]
    fn zero_frequency_gives_unit_cosine() {
        let map = FourierFeatureMap::from_frequencies(array![[0.0, 0.0]], 1.0, 0).unwrap();
        let z = map.transform(array![3.0, -7.5].view()).unwrap();
        assert_eq!(z, array![1.0, 0.0]);
    }

    #[test]
    fn frequency_variance_is_two_gamma() {
        let map = FourierFeatureMap::sample(1, 10_000, 0.5, 5).unwrap();
        let f = map.frequencies();
        let mean = f.sum() / 10_000.0;
        let var = f.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 9_999.0;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn exact_kernel_values() {
        let k = KernelParams::new(1.0).unwrap();
        let x = array![0.3, -1.2];
        assert_eq!(exact_kernel(k, x.view(), x.view()).unwrap(), 1.0);
        let y = array![0.3 + 2f64.ln().sqrt(), -1.2];
        assert!((exact_kernel(k, x.view(), y.view()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sigma_p_values() {
        let k = KernelParams::new(0.5).unwrap();
        assert_eq!(derived_sigma_p(k, 1).unwrap(), 1.0);
        assert_eq!(derived_sigma_p(k, 4).unwrap(), 2.0);
        let k = KernelParams::new(1.0).unwrap();
        assert!((derived_sigma_p(k, 57).unwrap() - 114f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sigma_p_matches_sampled_second_moment() {
        let k = KernelParams::new(1.0).unwrap();
        let map = FourierFeatureMap::sample(57, 4000, 1.0, 11).unwrap();
        let second_moment =
            map.frequencies().rows().into_iter().map(|r| r.dot(&r)).sum::<f64>() / 4000.0;
        let sigma = derived_sigma_p(k, 57).unwrap();
        assert!((second_moment.sqrt() / sigma - 1.0).abs() < 0.02);
    }

    #[test]
    fn text_round_trip() {
        let map = FourierFeatureMap::sample(3, 7, 0.123, 42).unwrap();
        let back = FourierFeatureMap::from_text(&map.to_text()).unwrap();
        assert_eq!(map, back);
        assert!(FourierFeatureMap::from_text("rff-map d=2 D=2 gamma=1 seed=0\n1 2 3\n").is_err());
    }

    #[test]
    fn median_heuristic_on_line() {
        // Pairwise distances of {0, 1, 3}: 1, 2, 3; median 2.
        let x = array![[0.0], [1.0], [3.0]];
        let g = median_heuristic_gamma(x.view(), 1000, 0).unwrap();
        assert!((g - 1.0 / 8.0).abs() < 1e-15);
        // {0, 1, 2, 3}: sorted distances 1,1,1,2,2,3, even count, median 1.5.
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let g = median_heuristic_gamma(x.view(), 1000, 0).unwrap();
        assert!((g - 1.0 / 4.5).abs() < 1e-15);
        assert!(median_heuristic_gamma(array![[1.0], [1.0]].view(), 10, 0).is_err());
    }
}
