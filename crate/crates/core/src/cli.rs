//! Command-line front end shared by the `rff-sgm` binary and the tests.
//!
//! Every CSV written starts with a `#` comment line holding the resolved
//! configuration. Output files are written only after all computation has
//! succeeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, BoundInputs, BoundTable};
use crate::data::{self, Dataset, LabelColumn};
use crate::error::{Error, Result};
use crate::loss::LossConstants;
use crate::rff::{derived_sigma_p, KernelParams};
use crate::sgm::{self, SgmConfig};
use crate::stability::{
    self, derive_seed, Bandwidth, ExperimentSetup, PerturbationPair, PreparedRun, Stream, SweepRecord,
};

/// Directory searched for relative `--data` paths that do not exist as given.
pub const DATA_DIR_ENV: &str = "RFF_SGM_DATA_DIR";

pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Io { .. } => EXIT_PARSE,
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::Diverged { .. } => EXIT_NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rff-sgm", version, about = "Random Fourier feature SVMs trained by SGD: training, bounds and stability sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train once per seed and report risks, gap and bounds as CSV.
    Train(TrainArgs),
    /// Print every bound for the given inputs as CSV.
    Bounds(BoundsArgs),
    /// Run a generalization-gap sweep.
    Sweep(SweepArgs),
    /// Write the RFF-transformed dataset as CSV.
    Featurize(FeaturizeArgs),
    /// Perturb-one-sample stability estimate.
    Stability(StabilityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Auto,
    Libsvm,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset path; relative paths are also looked up under $RFF_SGM_DATA_DIR.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// CSV label column: a 0-based index or `last`.
    #[arg(long, default_value = "last")]
    pub label_column: String,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// RBF bandwidth, or `median` for the median heuristic.
    #[arg(long, default_value = "median")]
    pub gamma: String,
    /// Number of Fourier components D.
    #[arg(long = "D", alias = "components", default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub components: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    /// constant, single-pass or stability-optimal.
    #[arg(long, default_value = "constant")]
    pub schedule: String,
    /// Scale B standing in for the dual-coefficient norm; needed by theory schedules.
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Kernel approximation tolerance; defaults to 1/sqrt(n_train).
    #[arg(long = "eps")]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Disable feature standardization.
    #[arg(long)]
    pub no_standardize: bool,
    /// Seeds: `7`, `0,1,5` or `0..10` (end exclusive).
    #[arg(long, default_value = "0")]
    pub seeds: String,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Write the model of the first seed here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Write the feature map of the first seed here.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
    /// Constant c in the required-D formula.
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long = "T")]
    pub steps: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "L", default_value_t = 4.0)]
    pub lipschitz: f64,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long = "eps")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long = "D", value_parser = clap::value_parser!(u64).range(1..))]
    pub components: Option<u64>,
    #[arg(long)]
    pub sigma_p: Option<f64>,
    #[arg(long)]
    pub diam: Option<f64>,
    #[arg(long)]
    pub w_star_norm_sq: Option<f64>,
    /// Reference risk R* (or the minimum empirical risk).
    #[arg(long, default_value_t = 0.0)]
    pub r_star: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    /// Add the ε·L·B term to the convergence bound.
    #[arg(long)]
    pub include_eps_term: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Fourier,
    Epochs,
    Lr,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Fourier => "fourier",
            SweepKind::Epochs => "epochs",
            SweepKind::Lr => "lr",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub kind: SweepKind,
    /// `a:b:step` (inclusive), `a:b:log10` (decades) or a comma list.
    #[arg(long)]
    pub grid: String,
    /// Training-set fractions for the epochs sweep.
    #[arg(long, default_value = "1.0")]
    pub sizes: String,
    #[command(flatten)]
    pub run: RunArgs,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Fill the mean_wall_ms column (makes the output machine-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FeaturizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "median")]
    pub gamma: String,
    #[arg(long = "D", alias = "components", default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub components: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub map_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

/// Fully resolved configuration of a `train`, `sweep` or `stability` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: PathBuf,
    pub format: Format,
    pub label_column: LabelColumn,
    pub bandwidth: Bandwidth,
    pub components: usize,
    pub sgm: SgmConfig,
    pub epsilon: Option<f64>,
    pub test_fraction: f64,
    pub standardize: bool,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let sgm = SgmConfig {
            eta: args.eta,
            epochs: args.epochs as usize,
            lambda: args.lambda,
            seed: 0,
            schedule: args.schedule.parse()?,
            b: args.b,
            epsilon: args.epsilon.unwrap_or(0.0),
            constants: LossConstants::HUBER_HINGE,
            trace: 0,
        };
        if !(args.eta >= 0.0 && args.eta.is_finite()) {
            return Err(Error::config("--eta must be non-negative"));
        }
        if args.lambda < 0.0 {
            return Err(Error::config("--lambda must be non-negative"));
        }
        Ok(RunConfig {
            data: args.data.data.clone(),
            format: args.data.format,
            label_column: parse_label_column(&args.data.label_column)?,
            bandwidth: parse_bandwidth(&args.gamma)?,
            components: args.components as usize,
            sgm,
            epsilon: args.epsilon,
            test_fraction: args.test_fraction,
            standardize: !args.no_standardize,
            seeds: parse_seeds(&args.seeds)?,
            out: args.out.clone(),
        })
    }

    pub fn setup(&self) -> ExperimentSetup {
        ExperimentSetup {
            test_fraction: self.test_fraction,
            standardize: self.standardize,
            bandwidth: self.bandwidth,
            components: self.components,
            sgm: self.sgm.clone(),
            seeds: self.seeds.clone(),
        }
    }

    /// One-line description used as the CSV comment header.
    pub fn describe(&self) -> String {
        let gamma = match self.bandwidth {
            Bandwidth::Median => "median".to_string(),
            Bandwidth::Fixed(g) => g.to_string(),
        };
        let label = match self.label_column {
            LabelColumn::Last => "last".to_string(),
            LabelColumn::Index(i) => i.to_string(),
        };
        format!(
            "data={} format={:?} label_column={} gamma={} D={} epochs={} eta={} schedule={} B={} lambda={} eps={} test_fraction={} standardize={} seeds={}",
            self.data.display(),
            self.format,
            label,
            gamma,
            self.components,
            self.sgm.epochs,
            self.sgm.eta,
            self.sgm.schedule,
            self.sgm.b.map(|b| b.to_string()).unwrap_or_else(|| "none".into()),
            self.sgm.lambda,
            self.epsilon.map(|e| e.to_string()).unwrap_or_else(|| "1/sqrt(n_train)".into()),
            self.test_fraction,
            self.standardize,
            self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"),
        )
    }
}

pub fn parse_label_column(s: &str) -> Result<LabelColumn> {
    if s == "last" {
        return Ok(LabelColumn::Last);
    }
    s.parse()
        .map(LabelColumn::Index)
        .map_err(|_| Error::config(format!("label column must be an index or `last`, got {s:?}")))
}

pub fn parse_bandwidth(s: &str) -> Result<Bandwidth> {
    if s == "median" {
        return Ok(Bandwidth::Median);
    }
    let g: f64 = s
        .parse()
        .map_err(|_| Error::config(format!("gamma must be a number or `median`, got {s:?}")))?;
    KernelParams::new(g).map_err(|e| Error::config(e.to_string()))?;
    Ok(Bandwidth::Fixed(g))
}

/// `7`, `0,1,5` or `0..10` (end exclusive).
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::config(format!("bad seed list {s:?}"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        (a..b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Grid syntax: `a:b:step` (inclusive of `b` up to rounding), `a:b:log10`
/// (one point per decade) or a comma-separated list. The result is sorted
/// ascending.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::config(format!("bad grid {s:?}: {why}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let mut values: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        if b < a {
            return Err(bad("stop below start"));
        }
        if parts[2].trim() == "log10" {
            if a.is_nan() || a <= 0.0 {
                return Err(bad("log grid needs positive bounds"));
            }
            let (la, lb) = (a.log10(), b.log10());
            let k = ((lb - la) + 1e-9).floor() as i32;
            (0..=k).map(|i| 10f64.powf(la + i as f64)).collect()
        } else {
            let step = num(parts[2])?;
            if step.is_nan() || step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            let k = ((b - a) / step + 1e-9).floor() as usize;
            (0..=k).map(|i| a + i as f64 * step).collect()
        }
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(bad("empty"));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn integer_grid(values: &[f64], what: &str) -> Result<Vec<usize>> {
    values
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::config(format!("{what} grid values must be positive integers, got {v}")))
            }
        })
        .collect()
}

fn resolve_data_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}

pub fn load_dataset(path: &Path, format: Format, label_column: LabelColumn) -> Result<Dataset> {
    let path = resolve_data_path(path);
    let is_csv = match format {
        Format::Csv => true,
        Format::Libsvm => false,
        Format::Auto => path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("data"))
            .unwrap_or(false),
    };
    if is_csv {
        data::load_csv(&path, label_column)
    } else {
        data::load_libsvm(&path)
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const TRAIN_CSV_HEADER: &str = "dataset,seed,n_train,n_test,d,D,gamma,eta,epochs,lambda,epsilon,diam,sigma_p,train_loss,test_loss,gap_loss,train_01,test_01,gap_01,stability_bound,opt_error_bound,single_pass_bound,generalization_bound,optimal_eta,rff_probability,required_D";

/// `train`: returns the CSV text it wrote.
pub fn cmd_train(args: &TrainArgs) -> Result<String> {
    let cfg = RunConfig::from_args(&args.run)?;
    let ds = load_dataset(&cfg.data, cfg.format, cfg.label_column)?;
    let setup = cfg.setup();

    let mut csv = format!("# rff-sgm train {}\n{TRAIN_CSV_HEADER}\n", cfg.describe());
    let mut first: Option<(sgm::SgmModel, crate::rff::FourierFeatureMap, SgmConfig)> = None;

    for &seed in &cfg.seeds {
        let run = PreparedRun::new(&ds, &setup, seed)?;
        let map = run.sample_map(cfg.components)?;
        let n_train = run.train.n();
        let epsilon = cfg.epsilon.unwrap_or(1.0 / (n_train as f64).sqrt());
        let sgm_cfg = SgmConfig {
            epsilon,
            ..run.sgm_config(&cfg.sgm)
        };
        let train_z = map.featurize(&run.train)?;
        let test_z = map.featurize(&run.test)?;
        let model = sgm::train_features(&train_z, &sgm_cfg)?;
        let tr = sgm::empirical_risk_features(model.w_bar.view(), &train_z)?;
        let te = sgm::empirical_risk_features(model.w_bar.view(), &test_z)?;

        let diam = bounds::bounding_box_diameter(run.train.features.view());
        let sigma_p = derived_sigma_p(map.kernel(), run.train.d())?;
        let inputs = BoundInputs {
            n: n_train,
            steps: model.t,
            eta: model.eta,
            lipschitz: sgm_cfg.constants.lipschitz,
            epsilon,
            d: run.train.d(),
            components: cfg.components,
            sigma_p,
            diam,
            b: sgm_cfg.b.unwrap_or(0.0),
            w_star_norm_sq: 0.0,
        };
        let table = BoundTable::compute(&inputs, 0.0, args.c, false);

        log::info!(
            "seed {seed}: eta={} gamma={} D={} diam={diam} train_loss={} test_loss={} gap_01={}",
            model.eta,
            map.gamma(),
            cfg.components,
            tr.loss,
            te.loss,
            (te.zero_one - tr.zero_one).abs()
        );
        for row in &table.rows {
            log::info!("  {} = {}", row.name, csv_cell(row.value));
        }

        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            ds.name,
            seed,
            n_train,
            run.test.n(),
            run.train.d(),
            cfg.components,
            map.gamma(),
            model.eta,
            sgm_cfg.epochs,
            sgm_cfg.lambda,
            epsilon,
            diam,
            sigma_p,
            tr.loss,
            te.loss,
            (te.loss - tr.loss).abs(),
            tr.zero_one,
            te.zero_one,
            (te.zero_one - tr.zero_one).abs(),
            csv_cell(table.get("stability_bound")),
            csv_cell(table.get("opt_error_bound")),
            csv_cell(table.get("single_pass_bound")),
            csv_cell(table.get("generalization_bound")),
            csv_cell(table.get("optimal_eta")),
            csv_cell(table.get("rff_probability")),
            csv_cell(table.get("required_D")),
        )
        .unwrap();
        if first.is_none() {
            first = Some((model, map, sgm_cfg));
        }
    }

    if let Some((model, map, sgm_cfg)) = &first {
        if let Some(p) = &args.model_out {
            model.save(p, map, sgm_cfg)?;
        }
        if let Some(p) = &args.map_out {
            map.save(p)?;
        }
    }
    write_output(cfg.out.as_deref(), &csv)?;
    Ok(csv)
}

/// `bounds`: returns the CSV text it wrote.
pub fn cmd_bounds(args: &BoundsArgs) -> Result<String> {
    let inputs = BoundInputs {
        n: args.n.unwrap_or(0) as usize,
        steps: args.steps.unwrap_or(0) as usize,
        eta: args.eta.unwrap_or(0.0),
        lipschitz: args.lipschitz,
        epsilon: args.epsilon.unwrap_or(0.0),
        d: args.d.unwrap_or(0) as usize,
        components: args.components.unwrap_or(0) as usize,
        sigma_p: args.sigma_p.unwrap_or(0.0),
        diam: args.diam.unwrap_or(0.0),
        b: args.b.unwrap_or(0.0),
        w_star_norm_sq: args.w_star_norm_sq.unwrap_or(0.0),
    };
    if inputs.n == 0 && inputs.steps == 0 && inputs.components == 0 {
        return Err(Error::config("give at least --n/--T or --D to evaluate any bound"));
    }
    let table = BoundTable::compute(&inputs, args.r_star, args.c, args.include_eps_term);
    let csv = format!(
        "# rff-sgm bounds n={} T={} eta={} L={} B={} eps={} d={} D={} sigma_p={} diam={} w_star_norm_sq={} r_star={} c={} eps_term={}\n{}",
        inputs.n,
        inputs.steps,
        inputs.eta,
        inputs.lipschitz,
        inputs.b,
        inputs.epsilon,
        inputs.d,
        inputs.components,
        inputs.sigma_p,
        inputs.diam,
        inputs.w_star_norm_sq,
        args.r_star,
        args.c,
        args.include_eps_term,
        table.to_csv()
    );
    write_output(args.out.as_deref(), &csv)?;
    Ok(csv)
}

/// `sweep`: returns the records and the CSV text it wrote.
pub fn cmd_sweep(args: &SweepArgs) -> Result<(Vec<SweepRecord>, String)> {
    let cfg = RunConfig::from_args(&args.run)?;
    let grid = parse_grid(&args.grid)?;
    let ds = load_dataset(&cfg.data, cfg.format, cfg.label_column)?;
    let setup = cfg.setup();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let started = Instant::now();
    let (records, extra) = pool.install(|| -> Result<_> {
        Ok(match args.kind {
            SweepKind::Fourier => (
                stability::sweep_fourier(&ds, &integer_grid(&grid, "D")?, &setup)?,
                String::new(),
            ),
            SweepKind::Epochs => {
                let sizes = parse_grid(&args.sizes)?;
                (
                    stability::sweep_epochs_and_size(&ds, &integer_grid(&grid, "epochs")?, &sizes, &setup)?,
                    format!(" sizes={}", args.sizes),
                )
            }
            SweepKind::Lr => (stability::sweep_learning_rate(&ds, &grid, &setup)?, String::new()),
        })
    })?;
    log::info!(
        "sweep {}: {} rows in {:.1} s",
        args.kind.name(),
        records.len(),
        started.elapsed().as_secs_f64()
    );

    if !records.is_empty() && records.iter().all(|r| r.seed_count == 0) {
        return Err(Error::Diverged {
            step: 0,
            eta: cfg.sgm.eta,
        });
    }
    let csv = format!(
        "# rff-sgm sweep {} grid={}{} {}\n{}",
        args.kind.name(),
        args.grid,
        extra,
        cfg.describe(),
        stability::records_to_csv(&records, args.timing)
    );
    write_output(cfg.out.as_deref(), &csv)?;
    Ok((records, csv))
}

/// `featurize`: writes `label,z_1,...,z_2D` rows.
pub fn cmd_featurize(args: &FeaturizeArgs) -> Result<()> {
    let label_column = parse_label_column(&args.data.label_column)?;
    let ds = load_dataset(&args.data.data, args.data.format, label_column)?;
    let ds = if args.no_standardize { ds } else { data::standardize(&ds)?.0 };
    let gamma = match parse_bandwidth(&args.gamma)? {
        Bandwidth::Fixed(g) => g,
        Bandwidth::Median => crate::rff::median_heuristic_gamma(
            ds.features.view(),
            stability::MEDIAN_SUBSAMPLE,
            derive_seed(args.seed, Stream::Bandwidth),
        )?,
    };
    let map = crate::rff::FourierFeatureMap::sample(ds.d(), args.components as usize, gamma, args.seed)?;
    let feats = map.featurize(&ds)?;

    let mut csv = format!(
        "# rff-sgm featurize data={} gamma={} D={} seed={} standardize={}\nlabel",
        args.data.data.display(),
        gamma,
        args.components,
        args.seed,
        !args.no_standardize
    );
    for j in 1..=feats.dim() {
        write!(csv, ",z{j}").unwrap();
    }
    csv.push('\n');
    for (row, &y) in feats.z.rows().into_iter().zip(feats.labels.iter()) {
        csv.push_str(if y > 0.0 { "1" } else { "-1" });
        for v in row {
            write!(csv, ",{v}").unwrap();
        }
        csv.push('\n');
    }
    if let Some(p) = &args.map_out {
        map.save(p)?;
    }
    fs::write(&args.out, csv).map_err(|e| Error::io(&args.out, e))
}

/// `stability`: per seed, replaces one training row with a test row and
/// measures the loss change on the test set.
pub fn cmd_stability(args: &StabilityArgs) -> Result<String> {
    let cfg = RunConfig::from_args(&args.run)?;
    let ds = load_dataset(&cfg.data, cfg.format, cfg.label_column)?;
    let setup = cfg.setup();
    let mut csv = format!(
        "# rff-sgm stability {}\nseed,n_train,eta,steps,empirical_stability,stability_bound\n",
        cfg.describe()
    );
    for &seed in &cfg.seeds {
        let run = PreparedRun::new(&ds, &setup, seed)?;
        let map = run.sample_map(cfg.components)?;
        let pair = PerturbationPair::replace_from_pool(&run.train, &run.test, derive_seed(seed, Stream::Perturb))?;
        let sgm_cfg = run.sgm_config(&cfg.sgm);
        let eta = sgm::resolve_eta(&sgm_cfg, run.train.n(), sgm_cfg.constants.lipschitz, sgm_cfg.epsilon)?;
        let measured = stability::empirical_stability(&pair, &run.test, &map, &sgm_cfg, &[sgm_cfg.seed])?;
        let steps = sgm_cfg.epochs * run.train.n();
        let bound = bounds::stability_bound(&BoundInputs {
            n: run.train.n(),
            steps,
            eta,
            lipschitz: sgm_cfg.constants.lipschitz,
            ..BoundInputs::default()
        })?;
        writeln!(csv, "{seed},{},{eta},{steps},{measured},{bound}", run.train.n()).unwrap();
    }
    write_output(cfg.out.as_deref(), &csv)?;
    Ok(csv)
}

/// Splices `--config FILE` (lines of `key = value`, `#` comments) into the
/// argument list right after the subcommand. Keys also given as flags are
/// dropped so the flags win.
pub fn expand_config_file(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let mut args = args;
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err(Error::config("--config needs a path"));
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let given: Vec<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut injected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: PathBuf::from(&path),
            line: i + 1,
            message: format!("expected key = value, got {line:?}"),
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if given.contains(&key) {
            continue;
        }
        injected.push(format!("--{key}"));
        if value != "true" {
            injected.push(value.to_string());
        }
    }
    let insert_at = match args.get(1).map(String::as_str) {
        Some("sweep") => 3,
        Some(_) => 2,
        None => 1,
    }
    .min(args.len());
    args.splice(insert_at..insert_at, injected);
    Ok(args)
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => cmd_train(&a).map(|_| ()),
        Command::Bounds(a) => cmd_bounds(&a).map(|_| ()),
        Command::Sweep(a) => cmd_sweep(&a).map(|_| ()),
        Command::Featurize(a) => cmd_featurize(&a),
        Command::Stability(a) => cmd_stability(&a).map(|_| ()),
    }
}
