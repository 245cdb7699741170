//! Generalization-gap measurement and the parameter sweeps built on it.
//!
//! A sweep cell is one parameter value evaluated over a list of seeds. For
//! every seed the same split, bandwidth and SGD permutation stream are used
//! across all cells, so cells are paired comparisons. Cells and seeds run in
//! parallel on the current rayon pool; results come back in grid order.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{self, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::loss::huber_hinge;
use crate::rff::{median_heuristic_gamma, FourierFeatureMap, Features};
use crate::sgm::{empirical_risk_features, train_features, SgmConfig};

/// Train/test risks of the averaged iterate and their absolute differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub train_loss: f64,
    pub test_loss: f64,
    pub train_zero_one: f64,
    pub test_zero_one: f64,
    pub gap_loss: f64,
    pub gap_zero_one: f64,
    pub seed: u64,
    pub eta: f64,
    pub epochs: usize,
}

/// Trains once on `train` and evaluates `w̄_T` on both sets.
pub fn measure_gap(train: &Dataset, test: &Dataset, map: &FourierFeatureMap, config: &SgmConfig) -> Result<GapReport> {
    measure_gap_features(&map.featurize(train)?, &map.featurize(test)?, config)
}

pub fn measure_gap_features(train: &Features, test: &Features, config: &SgmConfig) -> Result<GapReport> {
    let model = train_features(train, config)?;
    let tr = empirical_risk_features(model.w_bar.view(), train)?;
    let te = empirical_risk_features(model.w_bar.view(), test)?;
    Ok(GapReport {
        train_loss: tr.loss,
        test_loss: te.loss,
        train_zero_one: tr.zero_one,
        test_zero_one: te.zero_one,
        gap_loss: (te.loss - tr.loss).abs(),
        gap_zero_one: (te.zero_one - tr.zero_one).abs(),
        seed: config.seed,
        eta: model.eta,
        epochs: config.epochs,
    })
}

/// Two training sets that differ in exactly one row.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPair {
    pub base: Dataset,
    pub neighbor: Dataset,
    pub replaced_index: usize,
}

impl PerturbationPair {
    pub fn new(base: Dataset, neighbor: Dataset, replaced_index: usize) -> Result<Self> {
        if base.n() != neighbor.n() || base.d() != neighbor.d() {
            return Err(Error::domain(format!(
                "pair sizes differ: {}×{} vs {}×{}",
                base.n(),
                base.d(),
                neighbor.n(),
                neighbor.d()
            )));
        }
        if replaced_index >= base.n() {
            return Err(Error::domain("replaced index out of range"));
        }
        let differing: Vec<usize> = (0..base.n())
            .filter(|&i| base.features.row(i) != neighbor.features.row(i) || base.labels[i] != neighbor.labels[i])
            .collect();
        if differing.iter().any(|&i| i != replaced_index) {
            return Err(Error::domain("datasets differ outside the replaced index"));
        }
        Ok(PerturbationPair {
            base,
            neighbor,
            replaced_index,
        })
    }

    /// Replaces a seeded random row of `base` with a seeded random row of
    /// `pool`.
    pub fn replace_from_pool(base: &Dataset, pool: &Dataset, seed: u64) -> Result<Self> {
        if pool.d() != base.d() {
            return Err(Error::domain("pool dimension differs from base"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(0..base.n());
        let j = rng.gen_range(0..pool.n());
        let mut neighbor = base.clone();
        neighbor.features.row_mut(i).assign(&pool.features.row(j));
        neighbor.labels[i] = pool.labels[j];
        Ok(PerturbationPair {
            base: base.clone(),
            neighbor,
            replaced_index: i,
        })
    }
}

/// Mean over `seeds` of `max_{probe} |l(w̄_base) − l(w̄_neighbor)|`.
///
/// Both runs of a seed share the permutation stream, so their sample-index
/// sequences coincide and only the replaced row differs.
pub fn empirical_stability(
    pair: &PerturbationPair,
    probe: &Dataset,
    map: &FourierFeatureMap,
    config: &SgmConfig,
    seeds: &[u64],
) -> Result<f64> {
    if pair.base.n() != pair.neighbor.n() {
        return Err(Error::domain("perturbation pair sizes differ"));
    }
    if seeds.is_empty() {
        return Err(Error::domain("need at least one seed"));
    }
    let base = map.featurize(&pair.base)?;
    let neighbor = map.featurize(&pair.neighbor)?;
    let probe = map.featurize(probe)?;

    let per_seed: Vec<f64> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = SgmConfig { seed, ..config.clone() };
            let a = train_features(&base, &cfg)?;
            let b = train_features(&neighbor, &cfg)?;
            let sa = probe.z.dot(&a.w_bar);
            let sb = probe.z.dot(&b.w_bar);
            Ok(sa
                .iter()
                .zip(sb.iter())
                .zip(probe.labels.iter())
                .map(|((&p, &q), &y)| (huber_hinge(y * p) - huber_hinge(y * q)).abs())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(per_seed.iter().sum::<f64>() / per_seed.len() as f64)
}

/// How the RBF bandwidth is chosen for each seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Median heuristic on the standardized training split.
    Median,
    Fixed(f64),
}

/// Points used by the median heuristic.
pub const MEDIAN_SUBSAMPLE: usize = 1000;

/// Everything a sweep holds fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    pub test_fraction: f64,
    pub standardize: bool,
    pub bandwidth: Bandwidth,
    /// Fourier components `D` (ignored by the Fourier sweep).
    pub components: usize,
    /// SGD settings; `seed` is replaced per run.
    pub sgm: SgmConfig,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentSetup {
    fn default() -> Self {
        ExperimentSetup {
            test_fraction: 0.2,
            standardize: true,
            bandwidth: Bandwidth::Median,
            components: 200,
            sgm: SgmConfig::default(),
            seeds: vec![0],
        }
    }
}

/// Independent sub-streams of one experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Split = 1,
    Bandwidth = 2,
    Map = 3,
    Sgm = 4,
    Subsample = 5,
    Perturb = 6,
}

/// SplitMix64 finalizer over `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: Stream) -> u64 {
    let mut z = seed ^ (stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The split, preprocessing and bandwidth of one experiment seed.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub seed: u64,
    pub train: Dataset,
    pub test: Dataset,
    pub gamma: f64,
}

impl PreparedRun {
    pub fn new(ds: &Dataset, setup: &ExperimentSetup, seed: u64) -> Result<Self> {
        let parts = data::split(
            ds,
            &SplitSpec {
                test_fraction: setup.test_fraction,
                seed: derive_seed(seed, Stream::Split),
                shuffle: true,
            },
        )?;
        let (train, test) = if setup.standardize {
            let (train, st) = data::standardize(&parts.train)?;
            let test = st.apply(&parts.test)?;
            (train, test)
        } else {
            (parts.train, parts.test)
        };
        let gamma = match setup.bandwidth {
            Bandwidth::Fixed(g) => g,
            Bandwidth::Median => median_heuristic_gamma(
                train.features.view(),
                MEDIAN_SUBSAMPLE,
                derive_seed(seed, Stream::Bandwidth),
            )?,
        };
        Ok(PreparedRun { seed, train, test, gamma })
    }

    pub fn sample_map(&self, components: usize) -> Result<FourierFeatureMap> {
        FourierFeatureMap::sample(self.train.d(), components, self.gamma, derive_seed(self.seed, Stream::Map))
    }

    pub fn sgm_config(&self, base: &SgmConfig) -> SgmConfig {
        SgmConfig {
            seed: derive_seed(self.seed, Stream::Sgm),
            ..base.clone()
        }
    }
}

/// Result of one training run inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// `None` when training diverged.
    pub report: Option<GapReport>,
    pub wall_ms: f64,
}

fn timed_gap(train: &Features, test: &Features, config: &SgmConfig, started: Instant) -> Result<RunOutcome> {
    let report = match measure_gap_features(train, test, config) {
        Ok(r) => Some(r),
        Err(Error::Diverged { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RunOutcome {
        report,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// One row of sweep output: statistics over seeds for one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_param: String,
    pub value: f64,
    /// Seeds whose run finished without diverging.
    pub seed_count: usize,
    pub mean_train_loss: f64,
    pub mean_test_loss: f64,
    pub mean_gap_loss: f64,
    pub std_gap_loss: f64,
    pub mean_train_01: f64,
    pub mean_test_01: f64,
    pub mean_gap_01: f64,
    pub std_gap_01: f64,
    pub mean_wall_ms: f64,
    /// Seeds whose run diverged.
    pub diverged: usize,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; 0 for a single value.
fn std_dev(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => f64::NAN,
        1 => 0.0,
        k => {
            let m = mean(xs);
            (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1) as f64).sqrt()
        }
    }
}

impl SweepRecord {
    pub fn aggregate(sweep_param: impl Into<String>, value: f64, runs: &[RunOutcome]) -> Self {
        let ok: Vec<&GapReport> = runs.iter().filter_map(|r| r.report.as_ref()).collect();
        let col = |f: fn(&GapReport) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<f64>>();
        let gap_loss = col(|r| r.gap_loss);
        let gap_01 = col(|r| r.gap_zero_one);
        SweepRecord {
            sweep_param: sweep_param.into(),
            value,
            seed_count: ok.len(),
            mean_train_loss: mean(&col(|r| r.train_loss)),
            mean_test_loss: mean(&col(|r| r.test_loss)),
            mean_gap_loss: mean(&gap_loss),
            std_gap_loss: std_dev(&gap_loss),
            mean_train_01: mean(&col(|r| r.train_zero_one)),
            mean_test_01: mean(&col(|r| r.test_zero_one)),
            mean_gap_01: mean(&gap_01),
            std_gap_01: std_dev(&gap_01),
            mean_wall_ms: mean(&runs.iter().map(|r| r.wall_ms).collect::<Vec<_>>()),
            diverged: runs.len() - ok.len(),
        }
    }
}

pub const CSV_HEADER: &str = "sweep_param,value,seed_count,mean_train_loss,mean_test_loss,mean_gap_loss,std_gap_loss,mean_train_01,mean_test_01,mean_gap_01,std_gap_01,mean_wall_ms,diverged";

/// Renders records as CSV. Wall time is machine-dependent, so it is written
/// only when `with_timing` is set and left empty otherwise; every other cell
/// is a deterministic function of the inputs.
pub fn records_to_csv(records: &[SweepRecord], with_timing: bool) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let wall = if with_timing { r.mean_wall_ms.to_string() } else { String::new() };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.sweep_param,
            r.value,
            r.seed_count,
            r.mean_train_loss,
            r.mean_test_loss,
            r.mean_gap_loss,
            r.std_gap_loss,
            r.mean_train_01,
            r.mean_test_01,
            r.mean_gap_01,
            r.std_gap_01,
            wall,
            r.diverged
        )
        .unwrap();
    }
    s
}

fn prepare_all(ds: &Dataset, setup: &ExperimentSetup) -> Result<Vec<PreparedRun>> {
    if setup.seeds.is_empty() {
        return Err(Error::config("need at least one seed"));
    }
    setup.seeds.par_iter().map(|&s| PreparedRun::new(ds, setup, s)).collect()
}

/// Test-error sweep over the number of Fourier components. A fresh map is
/// drawn for every `(D, seed)`.
pub fn sweep_fourier(ds: &Dataset, components: &[usize], setup: &ExperimentSetup) -> Result<Vec<SweepRecord>> {
    if components.is_empty() || components.contains(&0) {
        return Err(Error::config("component grid must be non-empty with every D ≥ 1"));
    }
    let runs = prepare_all(ds, setup)?;
    components
        .par_iter()
        .map(|&d_comp| {
            let outcomes = runs
                .par_iter()
                .map(|run| {
                    let started = Instant::now();
                    let map = run.sample_map(d_comp)?;
                    let train = map.featurize(&run.train)?;
                    let test = map.featurize(&run.test)?;
                    timed_gap(&train, &test, &run.sgm_config(&setup.sgm), started)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRecord::aggregate("D", d_comp as f64, &outcomes))
        })
        .collect()
}

/// Number of rows kept for a subsample fraction (at least one).
pub fn subsample_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Gap over an `epochs × training-fraction` grid, one record per cell in
/// row-major order (fractions outer, epochs inner). Smaller fractions are
/// prefixes of one seeded order, so subsamples nest.
pub fn sweep_epochs_and_size(
    ds: &Dataset,
    epoch_values: &[usize],
    fractions: &[f64],
    setup: &ExperimentSetup,
) -> Result<Vec<SweepRecord>> {
    if epoch_values.is_empty() || epoch_values.contains(&0) {
        return Err(Error::config("epoch grid must be non-empty with every value ≥ 1"));
    }
    if fractions.is_empty() || fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::config("training fractions must lie in (0, 1]"));
    }
    let runs = prepare_all(ds, setup)?;
    let featurized = runs
        .par_iter()
        .map(|run| {
            let map = run.sample_map(setup.components)?;
            let train = map.featurize(&run.train)?;
            let test = map.featurize(&run.test)?;
            let mut order: Vec<usize> = (0..train.n()).collect();
            rand::seq::SliceRandom::shuffle(
                order.as_mut_slice(),
                &mut ChaCha8Rng::seed_from_u64(derive_seed(run.seed, Stream::Subsample)),
            );
            Ok((train, test, order))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(f64, usize)> = fractions
        .iter()
        .flat_map(|&f| epoch_values.iter().map(move |&e| (f, e)))
        .collect();
    cells
        .par_iter()
        .map(|&(fraction, epochs)| {
            let outcomes = runs
                .par_iter()
                .zip(featurized.par_iter())
                .map(|(run, (train, test, order))| {
                    let started = Instant::now();
                    let keep = subsample_size(train.n(), fraction);
                    let sub = train.select(&order[..keep]);
                    let cfg = SgmConfig {
                        epochs,
                        ..run.sgm_config(&setup.sgm)
                    };
                    timed_gap(&sub, test, &cfg, started)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRecord::aggregate(
                format!("epochs[fraction={fraction}]"),
                epochs as f64,
                &outcomes,
            ))
        })
        .collect()
}

/// Gap for each step size, in the order given. Diverged runs are counted in
/// the `diverged` column rather than dropped.
pub fn sweep_learning_rate(ds: &Dataset, etas: &[f64], setup: &ExperimentSetup) -> Result<Vec<SweepRecord>> {
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::config("learning rates must be positive"));
    }
    let runs = prepare_all(ds, setup)?;
    let featurized = runs
        .par_iter()
        .map(|run| {
            let map = run.sample_map(setup.components)?;
            Ok((map.featurize(&run.train)?, map.featurize(&run.test)?))
        })
        .collect::<Result<Vec<_>>>()?;
    etas.par_iter()
        .map(|&eta| {
            let outcomes = runs
                .par_iter()
                .zip(featurized.par_iter())
                .map(|(run, (train, test))| {
                    let started = Instant::now();
                    let cfg = SgmConfig {
                        eta,
                        schedule: crate::sgm::Schedule::Constant,
                        ..run.sgm_config(&setup.sgm)
                    };
                    timed_gap(train, test, &cfg, started)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRecord::aggregate("eta", eta, &outcomes))
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spearman needs paired samples");
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};

    fn blobs(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Array2::zeros((n, 2));
        let mut labels = Array1::zeros(n);
        for i in 0..n {
            let y = if i % 2 == 0 { 1.0 } else { -1.0 };
            features[[i, 0]] = y * 1.5 + rng.gen_range(-1.0..1.0);
            features[[i, 1]] = rng.gen_range(-1.0..1.0);
            labels[i] = y;
        }
        Dataset::new("blobs", features, labels).unwrap()
    }

    #[test]
    fn gap_is_zero_on_identical_sets() {
        let ds = blobs(40, 1);
        let map = FourierFeatureMap::sample(2, 20, 0.5, 2).unwrap();
        let cfg = SgmConfig { epochs: 3, eta: 0.05, ..SgmConfig::default() };
        let r = measure_gap(&ds, &ds, &map, &cfg).unwrap();
        assert_eq!(r.gap_loss, 0.0);
        assert_eq!(r.gap_zero_one, 0.0);
    }

    #[test]
    fn zero_step_gives_zero_loss_gap() {
        let ds = blobs(40, 1);
        let other = blobs(30, 9);
        let map = FourierFeatureMap::sample(2, 20, 0.5, 2).unwrap();
        let cfg = SgmConfig { eta: 0.0, ..SgmConfig::default() };
        let r = measure_gap(&ds, &other, &map, &cfg).unwrap();
        assert_eq!((r.train_loss, r.test_loss, r.gap_loss), (1.0, 1.0, 0.0));
        assert_eq!(r.gap_loss, (r.test_loss - r.train_loss).abs());
        assert_eq!(r.gap_zero_one, (r.test_zero_one - r.train_zero_one).abs());
    }

    #[test]
    fn stability_zero_for_identical_pair_or_zero_step() {
        let ds = blobs(30, 4);
        let map = FourierFeatureMap::sample(2, 10, 0.5, 2).unwrap();
        let pair = PerturbationPair::new(ds.clone(), ds.clone(), 0).unwrap();
        let cfg = SgmConfig { eta: 0.1, epochs: 2, ..SgmConfig::default() };
        assert_eq!(empirical_stability(&pair, &ds, &map, &cfg, &[1, 2, 3]).unwrap(), 0.0);

        let pool = blobs(10, 8);
        let pair = PerturbationPair::replace_from_pool(&ds, &pool, 5).unwrap();
        let still = SgmConfig { eta: 0.0, ..cfg.clone() };
        assert_eq!(empirical_stability(&pair, &ds, &map, &still, &[1, 2]).unwrap(), 0.0);
        assert!(empirical_stability(&pair, &ds, &map, &cfg, &[1, 2]).unwrap() > 0.0);
    }

    #[test]
    fn pair_validation() {
        let a = blobs(10, 1);
        let b = blobs(12, 1);
        assert!(PerturbationPair::new(a.clone(), b, 0).is_err());
        let mut c = a.clone();
        c.labels[3] = -c.labels[3];
        assert!(PerturbationPair::new(a.clone(), c.clone(), 2).is_err());
        assert!(PerturbationPair::new(a, c, 3).is_ok());
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let s: Vec<u64> = [Stream::Split, Stream::Bandwidth, Stream::Map, Stream::Sgm, Stream::Subsample, Stream::Perturb]
            .iter()
            .map(|&st| derive_seed(7, st))
            .collect();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_ne!(derive_seed(7, Stream::Map), derive_seed(8, Stream::Map));
    }

    #[test]
    fn single_seed_record_has_zero_std() {
        let ds = blobs(50, 3);
        let setup = ExperimentSetup {
            components: 10,
            sgm: SgmConfig { eta: 0.05, ..SgmConfig::default() },
            ..ExperimentSetup::default()
        };
        let recs = sweep_fourier(&ds, &[10], &setup).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].seed_count, 1);
        assert_eq!(recs[0].std_gap_loss, 0.0);
        assert_eq!(recs[0].std_gap_01, 0.0);
    }

    #[test]
    fn diverged_runs_are_flagged() {
        let runs = vec![
            RunOutcome { report: None, wall_ms: 1.0 },
            RunOutcome {
                report: Some(GapReport {
                    train_loss: 0.5,
                    test_loss: 0.7,
                    train_zero_one: 0.1,
                    test_zero_one: 0.2,
                    gap_loss: 0.2,
                    gap_zero_one: 0.1,
                    seed: 0,
                    eta: 0.1,
                    epochs: 1,
                }),
                wall_ms: 3.0,
            },
        ];
        let r = SweepRecord::aggregate("eta", 0.1, &runs);
        assert_eq!((r.seed_count, r.diverged), (1, 1));
        assert_eq!(r.mean_wall_ms, 2.0);
        let csv = records_to_csv(&[r], false);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,1"));
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 0.0]), -1.0);
        // Ties get average ranks: x ranks [1.5, 1.5, 3].
        let r = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!((r - 0.8660254037844386).abs() < 1e-12);
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn subsample_sizes() {
        assert_eq!(subsample_size(100, 0.25), 25);
        assert_eq!(subsample_size(10, 0.01), 1);
        assert_eq!(subsample_size(7, 1.0), 7);
        assert_eq!(subsample_size(10, 0.33), 4);
    }

    #[test]
    fn pool_replacement_changes_one_row() {
        let base = blobs(20, 1);
        let pool = Dataset::new("pool", array![[100.0, 100.0]], array![-1.0]).unwrap();
        let pair = PerturbationPair::replace_from_pool(&base, &pool, 3).unwrap();
        let i = pair.replaced_index;
        assert_eq!(pair.neighbor.features.row(i).to_vec(), vec![100.0, 100.0]);
        assert!(PerturbationPair::new(pair.base.clone(), pair.neighbor.clone(), i).is_ok());
    }
}
