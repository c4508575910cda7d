//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stabconf_core::bounds::{
    balanced_m, bian_barber_cv_bound, cv_plus_bound, full_conformal_bound, jackknife_plus_bound,
    liang_barber_bound, locate_crossover, rate_comparison_table, BoundInputs, LiangBarberVariant, RateTable,
};
use stabconf_core::conformal::{
    cv_plus, full_conformal, jackknife_baseline, jackknife_plus, jackknife_plus_inflated, split_conformal,
    GridRegion, GridSpec, IntervalRegion,
};
use stabconf_core::ridge::stability_constants;
use stabconf_core::{Dataset, Domain, MeanTrainer, Parameterization, RidgeConfig, StabilityProfile, Trainer};

use crate::config::{seed_override, ExperimentConfig, SEED_ENV};
use crate::dataset::load_dataset;
use crate::error::{CliError, CliResult};
use crate::format::{csv_num, ext_real, human};
use crate::runner;

#[derive(Debug, Parser)]
#[command(name = "stabconf", version, about = "Conformal prediction regions and training-conditional coverage bounds")]
pub struct Cli {
    /// Print errors to stderr as JSON objects.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prediction region at one feature vector.
    Predict(PredictArgs),
    /// Evaluate a coverage bound.
    Bound(BoundArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Rate table of the stability bounds against the (m, n)-stability bound.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Split,
    Full,
    Jackknife,
    #[value(name = "jackknife+")]
    JackknifePlus,
    #[value(name = "jackknife+eps")]
    JackknifePlusEps,
    #[value(name = "cv+")]
    CvPlus,
}

impl MethodName {
    fn label(self) -> &'static str {
        match self {
            MethodName::Split => "split",
            MethodName::Full => "full",
            MethodName::Jackknife => "jackknife",
            MethodName::JackknifePlus => "jackknife+",
            MethodName::JackknifePlusEps => "jackknife+eps",
            MethodName::CvPlus => "cv+",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainerName {
    Ridge,
    /// Predicts the mean training label everywhere.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamName {
    PerSample,
    FixedTotal,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_enum)]
    pub method: MethodName,
    #[arg(long)]
    pub alpha: f64,
    /// CSV file with header `x1,...,xp,y`.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated feature vector.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, value_enum, default_value = "ridge")]
    pub trainer: TrainerName,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "per-sample")]
    pub parameterization: ParamName,
    /// Interval inflation for `jackknife+eps`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of folds for `cv+`.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Calibration size for `split` (default: half, taken from the end).
    #[arg(long)]
    pub n_cal: Option<usize>,
    /// Candidate grid for `full` as `lo:hi:points`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Feature radius b; rows outside the ball are rejected.
    #[arg(long)]
    pub feature_radius: Option<f64>,
    /// Response bound B; rows with |y| > B are rejected.
    #[arg(long)]
    pub response_bound: Option<f64>,
    /// Write the region JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundName {
    /// Jackknife+ stability bound.
    Theorem1,
    /// Full-conformal stability bound.
    Theorem2,
    /// CV+ stability bound.
    Corollary1,
    BianBarber,
    LiangBarber,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantName {
    #[value(name = "jackknife+")]
    JackknifePlus,
    Full,
}

#[derive(Debug, Args, Clone)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1.0)]
    pub feature_radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub response_bound: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Bound L on the density of absolute residuals.
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub name: BoundName,
    /// Sample size, a comma list, or a decade range `lo:hi` such as `1e3:1e7`.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Fold size (CV bounds) or augmentation size (liang-barber).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "jackknife+")]
    pub variant: VariantName,
    #[command(flatten)]
    pub constants: ConstantsArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Sample sizes, a comma list or a decade range `lo:hi`.
    #[arg(long, default_value = "1e3:1e7")]
    pub n: String,
    #[command(flatten)]
    pub constants: ConstantsArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Directory for `<config stem>.json` and `<config stem>.csv`; without
    /// it the JSON report goes to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses a positive integer written plainly or in scientific notation.
fn parse_count(s: &str) -> CliResult<usize> {
    let s = s.trim();
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 1.0 && v.fract() == 0.0 && v < 1e18 => Ok(v as usize),
        _ => Err(CliError::config("n", format!("`{s}` is not a positive integer"))),
    }
}

/// `"1000"`, `"10,100"` or decade range `"1e3:1e7"`.
pub fn parse_n_list(s: &str) -> CliResult<Vec<usize>> {
    let list = if let Some((lo, hi)) = s.split_once(':') {
        let (lo, hi) = (parse_count(lo)?, parse_count(hi)?);
        if lo > hi {
            return Err(CliError::config("n", "range start exceeds its end"));
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n = n.checked_mul(10).unwrap_or(usize::MAX);
        }
        out
    } else {
        s.split(',').map(parse_count).collect::<CliResult<Vec<_>>>()?
    };
    if list.is_empty() || list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("n", "sample sizes must be strictly increasing"));
    }
    Ok(list)
}

fn parse_vector(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config("x", format!("`{v}` is not a finite number")))
        })
        .collect()
}

fn parse_grid(s: &str) -> CliResult<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::config("grid", format!("expected lo:hi:points, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    let points = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
    Ok(GridSpec::new(lo, hi, points).map_err(|e| CliError::from(e).in_field("grid"))?)
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::config("out", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::internal(e.to_string()))
        }
    }
}

/// Region JSON: `{method, alpha, lo, hi}` for intervals (`empty: true` and
/// null endpoints when empty), `{method, alpha, grid, accepted}` for grids.
pub fn interval_json(method: &str, alpha: f64, region: &IntervalRegion) -> Value {
    match region.endpoints() {
        Some((lo, hi)) => json!({ "method": method, "alpha": alpha, "lo": ext_real(lo), "hi": ext_real(hi) }),
        None => json!({ "method": method, "alpha": alpha, "empty": true, "lo": null, "hi": null }),
    }
}

pub fn grid_json(method: &str, alpha: f64, region: &GridRegion) -> Value {
    json!({ "method": method, "alpha": alpha, "grid": region.grid, "accepted": region.accepted })
}

enum Computed {
    Interval(IntervalRegion),
    Grid(GridRegion),
}

fn compute_region<T: Trainer>(args: &PredictArgs, data: &Dataset, x: &[f64], trainer: &T) -> CliResult<Computed> {
    let alpha = args.alpha;
    Ok(match args.method {
        MethodName::Split => {
            let n_cal = args.n_cal.unwrap_or(data.len() / 2);
            if n_cal == 0 || n_cal >= data.len() {
                return Err(CliError::config("n_cal", "training and calibration parts must be non-empty"));
            }
            let (train, cal) = data.split_at(data.len() - n_cal)?;
            Computed::Interval(split_conformal(&train, &cal, x, alpha, trainer)?)
        }
        MethodName::Full => {
            let grid = match &args.grid {
                Some(g) => parse_grid(g)?,
                None => default_grid(data)?,
            };
            Computed::Grid(full_conformal(data, x, alpha, trainer, &grid)?)
        }
        MethodName::Jackknife => Computed::Interval(jackknife_baseline(data, x, alpha, trainer)?),
        MethodName::JackknifePlus => Computed::Interval(jackknife_plus(data, x, alpha, trainer)?),
        MethodName::JackknifePlusEps => {
            let eps = args
                .epsilon
                .ok_or_else(|| CliError::config("epsilon", "required for jackknife+eps"))?;
            Computed::Interval(jackknife_plus_inflated(data, x, alpha, eps, trainer)?)
        }
        MethodName::CvPlus => {
            let k = args
                .folds
                .ok_or_else(|| CliError::config("folds", "required for cv+"))?;
            Computed::Interval(cv_plus(data, x, alpha, k, trainer)?)
        }
    })
}

/// `[-B - 4s, B + 4s]` with 2001 points, where `B` is the response bound
/// (largest observed `|y|` when unbounded) and `s` the label standard
/// deviation.
fn default_grid(data: &Dataset) -> CliResult<GridSpec> {
    let ys: Vec<f64> = data.points().iter().map(|p| p.y).collect();
    let b = match data.domain().response_bound {
        b if b.is_finite() => b,
        _ => ys.iter().fold(0.0f64, |m, y| m.max(y.abs())),
    };
    let s = stabconf_core::stats::std_dev(&ys);
    let margin = if s > 0.0 { 4.0 * s } else { 1.0 };
    Ok(GridSpec::covering(b, margin, GridSpec::DEFAULT_POINTS)?)
}

pub fn cmd_predict(args: &PredictArgs) -> CliResult<()> {
    let domain = match (args.feature_radius, args.response_bound) {
        (None, None) => Domain::unbounded(),
        (b, r) => Domain::new(b.unwrap_or(f64::INFINITY), r.unwrap_or(f64::INFINITY))?,
    };
    let x = parse_vector(&args.x)?;
    let data = load_dataset(&args.data, domain)?;
    if x.len() != data.dim() {
        return Err(CliError::config(
            "x",
            format!("has {} entries but the data has {} features", x.len(), data.dim()),
        ));
    }
    let region = match args.trainer {
        TrainerName::Mean => compute_region(args, &data, &x, &MeanTrainer)?,
        TrainerName::Ridge => {
            let param = match args.parameterization {
                ParamName::PerSample => Parameterization::PerSample,
                ParamName::FixedTotal => Parameterization::FixedTotal,
            };
            let ridge = RidgeConfig::new(args.lambda, param).map_err(|e| CliError::from(e).in_field("lambda"))?;
            compute_region(args, &data, &x, &ridge)?
        }
    };
    let label = args.method.label();
    let (doc, summary) = match &region {
        Computed::Interval(r) => {
            let text = match r.endpoints() {
                Some((lo, hi)) => format!("[{}, {}]", human(lo), human(hi)),
                None => "empty".into(),
            };
            if r.is_unbounded() {
                eprintln!(
                    "warning: region is unbounded; alpha = {} is below 1/(n+1) = {}",
                    human(args.alpha),
                    human(1.0 / (data.len() as f64 + 1.0))
                );
            }
            (interval_json(label, args.alpha, r), text)
        }
        Computed::Grid(g) => {
            let text = match g.hull() {
                Some((lo, hi)) => format!(
                    "{} of {} grid labels accepted, hull [{}, {}], step {}",
                    g.accepted_count(),
                    g.grid.len(),
                    human(lo),
                    human(hi),
                    human(g.step())
                ),
                None => "no grid label accepted".into(),
            };
            (grid_json(label, args.alpha, g), text)
        }
    };
    let mut body = serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))?;
    body.push('\n');
    write_output(args.out.as_deref(), &body)?;
    let line = format!("{label} (alpha {}, n {}): {summary}", human(args.alpha), data.len());
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn profile(c: &ConstantsArgs) -> CliResult<StabilityProfile> {
    if !(c.density > 0.0 && c.density.is_finite()) {
        return Err(CliError::config("density", "must be positive and finite"));
    }
    Ok(
        stability_constants(c.p, c.feature_radius, c.response_bound, c.lambda, Parameterization::PerSample)?
            .with_density_bound(c.density),
    )
}

fn bound_json(args: &BoundArgs, n: usize, profile: &StabilityProfile) -> CliResult<Value> {
    let c = &args.constants;
    let inputs = BoundInputs::new(c.alpha, c.eps, c.delta, n, *profile);
    let with_fold = |inputs: BoundInputs| match (args.m, args.folds) {
        (Some(m), _) => Ok(inputs.with_m(m)),
        (None, Some(k)) => Ok(inputs.with_folds(k)),
        (None, None) => Err(CliError::config("folds", "give --folds or --m")),
    };
    let report = match args.name {
        BoundName::Theorem1 => jackknife_plus_bound(&inputs)?,
        BoundName::Theorem2 => full_conformal_bound(&inputs)?,
        BoundName::Corollary1 => cv_plus_bound(&with_fold(inputs)?)?,
        BoundName::LiangBarber => {
            let variant = match args.variant {
                VariantName::JackknifePlus => LiangBarberVariant::JackknifePlus,
                VariantName::Full => LiangBarberVariant::FullConformal,
            };
            let m = args.m.unwrap_or_else(|| balanced_m(n));
            liang_barber_bound(&inputs.with_m(m).with_gamma(c.gamma), variant)?
        }
        BoundName::BianBarber => {
            let k = args
                .folds
                .ok_or_else(|| CliError::config("folds", "required for bian-barber"))?;
            if k == 0 || n % k != 0 {
                return Err(CliError::config("folds", format!("{k} folds do not divide n = {n}")));
            }
            let t = bian_barber_cv_bound(c.alpha, k, args.m.unwrap_or(n / k), c.delta)?;
            return Ok(json!({
                "name": "bian-barber",
                "n": n,
                "folds": k,
                "threshold": ext_real(t),
                "failure_prob": c.delta,
                "vacuous": !(t < 1.0 && c.delta < 1.0),
            }));
        }
        BoundName::Compare => unreachable!("handled by cmd_bound"),
    };
    serde_json::to_value(&report).map_err(|e| CliError::internal(e.to_string()))
}

pub fn cmd_bound(args: &BoundArgs) -> CliResult<()> {
    let ns = parse_n_list(&args.n)?;
    if args.name == BoundName::Compare {
        return compare(&ns, &args.constants);
    }
    let profile = profile(&args.constants)?;
    let reports = ns
        .iter()
        .map(|&n| bound_json(args, n, &profile))
        .collect::<CliResult<Vec<_>>>()?;
    for r in &reports {
        let mut line = format!(
            "{} n={}: threshold {}, failure probability {}",
            r["name"].as_str().unwrap_or(""),
            r["inputs"]["n"].as_u64().or(r["n"].as_u64()).unwrap_or(0),
            human(r["threshold"].as_f64().unwrap_or(f64::INFINITY)),
            human(r["failure_prob"].as_f64().unwrap_or(f64::NAN)),
        );
        if r["vacuous"] == json!(true) {
            line += " (vacuous)";
        }
        eprintln!("{line}");
    }
    let doc = if reports.len() == 1 {
        reports.into_iter().next().unwrap()
    } else {
        Value::Array(reports)
    };
    let body = serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))? + "\n";
    write_output(args.constants.out.as_deref(), &body)
}

/// CSV form of [`RateTable`], 17 significant digits.
pub fn rate_csv(table: &RateTable) -> String {
    let mut out = String::from(RateTable::CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        out += &format!(
            "{},{},{},{},{}\n",
            r.n,
            csv_num(r.ours_jplus),
            csv_num(r.ours_fc),
            csv_num(r.lb_slack),
            csv_num(r.lb_q)
        );
    }
    out
}

fn compare(ns: &[usize], c: &ConstantsArgs) -> CliResult<()> {
    let profile = profile(c)?;
    let table = rate_comparison_table(ns, &profile, c.alpha, c.eps, c.delta, c.gamma)?;
    let n_max = *ns.last().unwrap();
    let fine = locate_crossover(&profile, c.alpha, c.eps, c.delta, c.gamma, n_max)?;
    let show = |v: Option<usize>| v.map_or("none".to_owned(), |n| n.to_string());
    eprintln!(
        "crossover n*: {} among tabulated n, {} by fine scan up to {}",
        show(table.crossover),
        show(fine),
        n_max
    );
    write_output(c.out.as_deref(), &rate_csv(&table))
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    compare(&parse_n_list(&args.n)?, &args.constants)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> CliResult<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let env = std::env::var(SEED_ENV).ok();
    let seed = seed_override(env.as_deref())?;
    let out = runner::run(&config, seed, args.workers)?;
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::config("out_dir", format!("cannot create {}: {e}", dir.display())))?;
            let stem = args
                .config
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("experiment");
            write_output(Some(&dir.join(format!("{stem}.json"))), &out.json)?;
            write_output(Some(&dir.join(format!("{stem}.csv"))), &out.csv)?;
            print!("{}", out.summary);
        }
        None => {
            write_output(None, &out.json)?;
            eprint!("{}", out.summary);
        }
    }
    if seed.is_some() {
        eprintln!("base seed {} taken from {SEED_ENV}", out.provenance.base_seed);
    }
    Ok(())
}

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Predict(a) => cmd_predict(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn report_error(err: &CliError, json_errors: bool) {
    if json_errors {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("error: {err}");
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return 0;
            }
            if json_errors {
                let field = e.get(clap::error::ContextKind::InvalidArg).map(|v| v.to_string());
                let err = CliError::new(crate::error::ErrorKind::Config, field.as_deref(), e.kind().to_string());
                report_error(&err, true);
            } else {
                let _ = e.print();
            }
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e, cli.json_errors);
            e.exit_code()
        }
    }
}
