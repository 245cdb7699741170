//! Binary-classification datasets: loading, standardization and splitting.
//!
//! Everything is stored densely. Labels are always `+1.0` or `-1.0`; on load
//! the smaller of the two raw label values becomes `-1`.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense feature matrix with `±1` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// `n × d`, one sample per row.
    pub features: Array2<f64>,
    pub labels: Array1<f64>,
}

impl Dataset {
    /// Builds a dataset, checking the label and finiteness invariants.
    pub fn new(name: impl Into<String>, features: Array2<f64>, labels: Array1<f64>) -> Result<Self> {
        let (n, d) = features.dim();
        if labels.len() != n {
            return Err(Error::domain(format!(
                "{} labels for {} feature rows",
                labels.len(),
                n
            )));
        }
        if n == 0 || d == 0 {
            return Err(Error::domain(format!("empty dataset ({n}×{d})")));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::domain(format!("label {bad} is not ±1")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("features contain NaN or infinite values"));
        }
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }

    /// Rows `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Row-wise concatenation of two datasets with equal dimension.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.d() != other.d() {
            return Err(Error::domain(format!(
                "cannot concatenate d={} with d={}",
                self.d(),
                other.d()
            )));
        }
        let features = ndarray::concatenate(Axis(0), &[self.features.view(), other.features.view()])
            .expect("column counts checked");
        let labels = self.labels.iter().chain(other.labels.iter()).copied().collect();
        Ok(Dataset {
            name: self.name.clone(),
            features,
            labels,
        })
    }

    /// Fraction of samples labelled `-1`.
    pub fn negative_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&y| y < 0.0).count() as f64 / self.n() as f64
    }
}

/// Maps two distinct raw label values onto `{-1, +1}`.
fn remap_labels(raw: &[f64]) -> Result<Array1<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &v in raw {
        if !distinct.contains(&v) {
            distinct.push(v);
            if distinct.len() > 2 {
                return Err(Error::domain(format!(
                    "more than two classes in label column (saw {distinct:?})"
                )));
            }
        }
    }
    if distinct.len() != 2 {
        return Err(Error::domain(format!(
            "expected exactly two classes, found {}",
            distinct.len()
        )));
    }
    let low = distinct[0].min(distinct[1]);
    Ok(raw.iter().map(|&v| if v == low { -1.0 } else { 1.0 }).collect())
}

fn parse_number(path: &Path, line: usize, token: &str) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("not a number: {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("non-finite value {token:?}"),
        });
    }
    Ok(v)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads a LIBSVM file (`label idx:val idx:val ...`, 1-based indices).
///
/// The dimension is the largest index seen. Blank lines and `#` comments are
/// skipped.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw = parse_libsvm(path, &text)?;
    build_libsvm(path, vec![raw])
}

struct RawLibsvm {
    labels: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    d: usize,
}

fn parse_libsvm(path: &Path, text: &str) -> Result<RawLibsvm> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d = 0usize;

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        raw_labels.push(parse_number(path, lineno, label)?);

        let mut row = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| perr(lineno, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| perr(lineno, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(perr(lineno, "feature indices are 1-based".into()));
            }
            if idx <= prev {
                return Err(perr(lineno, format!("index {idx} not ascending")));
            }
            prev = idx;
            d = d.max(idx);
            row.push((idx - 1, parse_number(path, lineno, val)?));
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::domain(format!("{}: no samples", path.display())));
    }
    Ok(RawLibsvm { labels: raw_labels, rows, d })
}

/// Stacks parsed files; the dimension is the largest index in any of them.
fn build_libsvm(path: &Path, parts: Vec<RawLibsvm>) -> Result<Dataset> {
    let d = parts.iter().map(|p| p.d).max().unwrap_or(0);
    let n: usize = parts.iter().map(|p| p.rows.len()).sum();
    let mut features = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let mut r = 0;
    for part in parts {
        labels.extend(part.labels);
        for row in part.rows {
            for (c, v) in row {
                features[[r, c]] = v;
            }
            r += 1;
        }
    }
    Dataset::new(dataset_name(path), features, remap_labels(&labels)?)
}

/// Writes `ds` in LIBSVM format with labels `+1`/`-1`.
///
/// Zero entries are omitted except the last column, which is always written
/// so that reloading recovers the same dimension.
pub fn write_libsvm(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let d = ds.d();
    for (row, &y) in ds.features.rows().into_iter().zip(ds.labels.iter()) {
        out.push_str(if y > 0.0 { "+1" } else { "-1" });
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 || j + 1 == d {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
}

/// Reads a numeric CSV file. A first line containing any non-numeric field
/// is treated as a header.
pub fn load_csv(path: impl AsRef<Path>, label_column: LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::io(path, source),
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("{other:?}"),
            },
        })?;

    let mut raw_labels = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut label_idx = 0usize;

    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let lineno = record.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        match width {
            None => {
                if record.len() < 2 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno,
                        message: "need at least one feature and a label".into(),
                    });
                }
                label_idx = match label_column {
                    LabelColumn::Last => record.len() - 1,
                    LabelColumn::Index(k) if k < record.len() => k,
                    LabelColumn::Index(k) => {
                        return Err(Error::config(format!(
                            "label column {k} out of range for {} columns",
                            record.len()
                        )))
                    }
                };
                width = Some(record.len());
            }
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("ragged row: {} fields, expected {w}", record.len()),
                });
            }
            Some(_) => {}
        }
        for (j, field) in record.iter().enumerate() {
            let v = parse_number(path, lineno, field)?;
            if j == label_idx {
                raw_labels.push(v);
            } else {
                values.push(v);
            }
        }
    }

    let Some(w) = width else {
        return Err(Error::domain(format!("{}: no samples", path.display())));
    };
    let features = Array2::from_shape_vec((raw_labels.len(), w - 1), values)
        .expect("row widths checked");
    Dataset::new(dataset_name(path), features, remap_labels(&raw_labels)?)
}

/// Per-feature affine transform fitted on a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Array1<f64>,
    /// Population standard deviation; zero for constant columns.
    pub std: Array1<f64>,
}

impl Standardizer {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        if ds.n() < 2 {
            return Err(Error::domain("standardization needs at least two samples"));
        }
        let mean = ds.features.mean_axis(Axis(0)).expect("n >= 2");
        let std = ds.features.std_axis(Axis(0), 0.0);
        Ok(Standardizer { mean, std })
    }

    /// Applies the fitted transform. Zero-variance columns map to 0.
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.d() != self.mean.len() {
            return Err(Error::domain(format!(
                "standardizer fitted on d={}, applied to d={}",
                self.mean.len(),
                ds.d()
            )));
        }
        let mut features = ds.features.clone();
        for (mut col, (&m, &s)) in features
            .columns_mut()
            .into_iter()
            .zip(self.mean.iter().zip(self.std.iter()))
        {
            if s > 0.0 {
                col.mapv_inplace(|v| (v - m) / s);
            } else {
                col.fill(0.0);
            }
        }
        Ok(Dataset {
            name: ds.name.clone(),
            features,
            labels: ds.labels.clone(),
        })
    }
}

/// Standardizes every column to mean 0 and population std 1.
pub fn standardize(ds: &Dataset) -> Result<(Dataset, Standardizer)> {
    let st = Standardizer::fit(ds)?;
    Ok((st.apply(ds)?, st))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            seed: 0,
            shuffle: true,
        }
    }
}

/// Result of [`split`]; the index vectors are sorted and partition `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Number of test samples for `n` rows: `⌊fraction·n⌋`.
pub fn test_size(n: usize, fraction: f64) -> usize {
    // The epsilon absorbs products like 0.3 * 10 = 2.9999999999999996.
    (fraction * n as f64 + 1e-9).floor() as usize
}

/// Seeded train/test split with `⌊test_fraction·n⌋` test rows.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<Split> {
    let n = ds.n();
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::domain(format!(
            "test fraction {} not in (0, 1)",
            spec.test_fraction
        )));
    }
    let n_test = test_size(n, spec.test_fraction);
    if n_test == 0 || n_test >= n {
        return Err(Error::domain(format!(
            "test fraction {} leaves an empty side for n = {n}",
            spec.test_fraction
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    }
    let (test_part, train_part) = order.split_at(n_test);
    let mut test_indices = test_part.to_vec();
    let mut train_indices = train_part.to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();

    Ok(Split {
        train: ds.select(&train_indices),
        test: ds.select(&test_indices),
        train_indices,
        test_indices,
    })
}

/// Standard-normal points labelled `+1` inside the sphere holding about half
/// the mass and `-1` outside, with each label flipped with probability
/// `noise`. Not linearly separable, so a kernel is needed.
pub fn synthetic_sphere(n: usize, d: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=0.5).contains(&noise) {
        return Err(Error::domain(format!("label noise must lie in [0, 0.5], got {noise}")));
    }
    let mut normal = crate::rff::BoxMuller::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEECE66D);
    let features = Array2::from_shape_simple_fn((n, d), || normal.next_normal());
    // Wilson-Hilferty median of a chi-square with d degrees of freedom.
    let k = d as f64;
    let radius_sq = k * (1.0 - 2.0 / (9.0 * k)).powi(3);
    let labels = features
        .rows()
        .into_iter()
        .map(|r| {
            let y = if r.dot(&r) < radius_sq { 1.0 } else { -1.0 };
            if rng.gen::<f64>() < noise {
                -y
            } else {
                y
            }
        })
        .collect();
    Dataset::new("sphere", features, labels)
}

/// The four benchmark datasets and the file names they are looked up under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// `spambase.data`, comma-separated, label last.
    Spambase,
    /// `german.numer`, LIBSVM.
    German,
    /// `svmguide3`, LIBSVM; `svmguide3.t` is appended when present.
    Svmguide3,
    /// `pima-indians-diabetes.csv`, comma-separated, label last.
    Pima,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::Spambase, Benchmark::German, Benchmark::Svmguide3, Benchmark::Pima];

    pub fn file_name(self) -> &'static str {
        match self {
            Benchmark::Spambase => "spambase.data",
            Benchmark::German => "german.numer",
            Benchmark::Svmguide3 => "svmguide3",
            Benchmark::Pima => "pima-indians-diabetes.csv",
        }
    }

    /// Published `(n, d)`.
    pub fn expected_shape(self) -> (usize, usize) {
        match self {
            Benchmark::Spambase => (4601, 57),
            Benchmark::German => (1000, 24),
            Benchmark::Svmguide3 => (1284, 21),
            Benchmark::Pima => (768, 8),
        }
    }

    pub fn load(self, dir: impl AsRef<Path>) -> Result<Dataset> {
        let path = dir.as_ref().join(self.file_name());
        match self {
            Benchmark::Spambase | Benchmark::Pima => load_csv(&path, LabelColumn::Last),
            Benchmark::German => load_libsvm(&path),
            Benchmark::Svmguide3 => {
                let mut parts = Vec::new();
                for p in [path.clone(), path.with_extension("t")] {
                    if p == path || p.exists() {
                        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                        parts.push(parse_libsvm(&p, &text)?);
                    }
                }
                build_libsvm(&path, parts)
            }
        }
    }
}
