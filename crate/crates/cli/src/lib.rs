//! Command-line driver for the `cvcensus` experiments.
//!
//! Results go to standard output (or `--out`) as CSV, JSON or an aligned
//! table; progress and timing go to standard error only.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use cvcensus::criteria::write_dump;
use cvcensus::fidelity::{cross_validate_marginals, linspace};
use cvcensus::measures::MetricKind;
use cvcensus::montecarlo::{
    run_bures_census, run_classical_census, run_entropy_probe, run_one_mode_classicality, BuresConfig,
    CensusResult, MeasureLabel, RunOptions, SamplerConfig,
};
use cvcensus::{CensusError, Tolerances};

pub mod render;
pub mod settings;

use render::{Cell, Table};
use settings::{
    default_workers, grid_plan, metrics_from_config, optional_path, pick, ConfigFile, Format, GridKindChoice,
    List, MetricChoice, Range, Robust, SettingsError,
};

pub const EXIT_IO: i32 = 1;
pub const EXIT_ORACLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

pub const CENSUS_HEADER: [&str; 9] =
    ["k", "l", "samples", "accepted", "separable", "classical", "prob_sep", "prob_classical", "seed"];

/// Reference census settings: `(samples, k, l)`.
pub const TABLE1_ROWS: [(u64, f64, f64); 5] = [
    (500_000, 10.0, 5.0),
    (1_900_000, 500.0, 250.0),
    (5_200_000, 20.0, 10.0),
    (8_100_000, 30.0, 20.0),
    (10_000_000, 15.0, 15.0),
];

#[derive(Debug, Parser)]
#[command(name = "cvcensus", version, about = "Separability and classicality census of two-mode Gaussian states")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Upper bound of the diagonal entries.
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Half-width of the off-diagonal entries.
    #[arg(long, global = true)]
    pub l: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to $CVCENSUS_WORKERS, then 1.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// csv, json or table.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also require M + iΩ ⪰ 0 in the filter chain.
    #[arg(long, global = true)]
    pub strict_physical: bool,
    /// Where to write the matrix that made the two separability tests disagree.
    #[arg(long, global = true)]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jeffreys census at five reference settings.
    Table1 {
        /// Multiply every row's sample count by this factor.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Jeffreys-weighted census for one (k, l).
    Census,
    /// Monotone-metric census on discretized kernels.
    Bures {
        /// fisher, bures, kubo-mori or maximal; repeatable.
        #[arg(long = "metric")]
        metric: Vec<MetricChoice>,
        /// regular or random.
        #[arg(long)]
        grid: Option<GridKindChoice>,
        #[arg(long)]
        grid_size: Option<usize>,
        #[arg(long)]
        n_grids: Option<usize>,
        /// lo,hi for random grid coordinates.
        #[arg(long, allow_hyphen_values = true)]
        grid_range: Option<Range>,
        /// none (regular grid), median or trimmed-mean.
        #[arg(long)]
        robust: Option<Robust>,
    },
    /// One-mode classicality probability along a schedule of k.
    OneMode {
        /// Comma-separated k values.
        #[arg(long)]
        ks: Option<List>,
        /// l = l_ratio · k.
        #[arg(long)]
        l_ratio: Option<f64>,
    },
    /// Entropic separability condition on separable sampled states.
    Entropy,
    /// Finite-difference metric against the closed-form marginals.
    FidelityCheck {
        /// Relative finite-difference step.
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Oracle(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Oracle(_) => EXIT_ORACLE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Oracle(m) => m,
        }
    }
}

impl From<SettingsError> for Failure {
    fn from(e: SettingsError) -> Self {
        match e {
            SettingsError::Usage(m) => Failure::Usage(m),
            SettingsError::Io(m) => Failure::Io(m),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            if matches!(f, Failure::Usage(_)) {
                eprintln!("run with --help for usage");
            }
            f.code()
        }
    }
}

struct Shared {
    config: ConfigFile,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    dump_dir: PathBuf,
    opts: RunOptions,
}

fn shared(common: &Common, config: ConfigFile) -> Result<Shared, Failure> {
    let workers = pick(common.workers, &config, "workers", default_workers()?)?;
    if workers == 0 {
        return Err(Failure::Usage("workers must be at least 1".into()));
    }
    let strict = common.strict_physical || pick(None, &config, "strict_physical", false)?;
    Ok(Shared {
        seed: pick(common.seed, &config, "seed", 1)?,
        format: pick(common.format, &config, "format", Format::Csv)?,
        out: optional_path(common.out.clone(), &config, "out"),
        dump_dir: optional_path(common.dump_dir.clone(), &config, "dump_dir").unwrap_or_else(|| PathBuf::from(".")),
        opts: RunOptions { tolerances: Tolerances::default(), strict_physical: strict, workers },
        config,
    })
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let config = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let s = shared(&cli.common, config)?;
    let c = &cli.common;
    let table = match &cli.command {
        Command::Table1 { scale } => {
            let scale = pick(*scale, &s.config, "scale", 1.0)?;
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Failure::Usage(format!("scale must be positive, got {scale}")));
            }
            let mut t = Table::new(CENSUS_HEADER.to_vec());
            for (samples, k, l) in TABLE1_ROWS {
                let n = ((samples as f64 * scale).round() as u64).max(1);
                let cfg = SamplerConfig::two_mode(k, l, n, s.seed);
                t.push(census_row(&timed_census(&cfg, &s)?));
            }
            t
        }
        Command::Census => {
            let cfg = SamplerConfig::two_mode(
                pick(c.k, &s.config, "k", 10.0)?,
                pick(c.l, &s.config, "l", 5.0)?,
                pick(c.samples, &s.config, "samples", 100_000)?,
                s.seed,
            );
            let mut t = Table::new(CENSUS_HEADER.to_vec());
            t.push(census_row(&timed_census(&cfg, &s)?));
            t
        }
        Command::Bures { metric, grid, grid_size, n_grids, grid_range, robust } => {
            let cfg = SamplerConfig::two_mode(
                pick(c.k, &s.config, "k", 15.0)?,
                pick(c.l, &s.config, "l", 15.0)?,
                pick(c.samples, &s.config, "samples", 100_000)?,
                s.seed,
            );
            let choices = if metric.is_empty() {
                metrics_from_config(&s.config)?.unwrap_or_else(|| vec![MetricChoice::Volume(MetricKind::Bures)])
            } else {
                metric.clone()
            };
            let kind = pick(*grid, &s.config, "grid", GridKindChoice::Random)?;
            let plan = grid_plan(
                kind,
                pick(*grid_size, &s.config, "grid_size", 5)?,
                pick(*n_grids, &s.config, "n_grids", 5)?,
                pick(*grid_range, &s.config, "grid_range", Range(-2.0, 2.0))?,
            );
            let robust: Option<Robust> = match robust {
                Some(r) => Some(*r),
                None => s.config.raw("robust").map(|v| v.parse().map_err(Failure::Usage)).transpose()?,
            };
            bures_table(&cfg, &choices, plan, robust, &s)?
        }
        Command::OneMode { ks, l_ratio } => {
            let ks = pick(ks.clone(), &s.config, "ks", List(vec![10.0, 100.0, 1000.0]))?;
            let l_ratio = pick(*l_ratio, &s.config, "l_ratio", 0.5)?;
            let samples = pick(c.samples, &s.config, "samples", 1_000_000)?;
            let start = Instant::now();
            let points = run_one_mode_classicality(&ks.0, l_ratio, samples, s.seed, &s.opts).map_err(census_failure(&s))?;
            log::info!("one-mode: {} points in {:.2?}", points.len(), start.elapsed());
            let mut t = Table::new(vec!["k", "l", "samples", "accepted", "classical", "prob_classical", "se_classical", "seed"]);
            for p in points {
                t.push(vec![
                    Cell::Param(p.config.k),
                    Cell::Param(p.config.l),
                    Cell::Int(p.config.samples),
                    Cell::Int(p.accepted),
                    Cell::Int(p.classical),
                    Cell::real(p.prob_classical()),
                    Cell::real(p.standard_error()),
                    Cell::Int(p.config.seed),
                ]);
            }
            t
        }
        Command::Entropy => {
            let cfg = SamplerConfig::two_mode(
                pick(c.k, &s.config, "k", 10.0)?,
                pick(c.l, &s.config, "l", 5.0)?,
                pick(c.samples, &s.config, "samples", 100_000)?,
                s.seed,
            );
            let start = Instant::now();
            let rep = run_entropy_probe(&cfg, &s.opts).map_err(census_failure(&s))?;
            log::info!("entropy probe: {} samples in {:.2?}", rep.generated, start.elapsed());
            let mut t = Table::new(vec![
                "k", "l", "samples", "accepted", "separable", "violations", "seed", "example_1", "example_2", "example_3",
            ]);
            let mut row = vec![
                Cell::Param(cfg.k),
                Cell::Param(cfg.l),
                Cell::Int(rep.generated),
                Cell::Int(rep.accepted),
                Cell::Int(rep.separable),
                Cell::Int(rep.violations),
                Cell::Int(cfg.seed),
            ];
            for i in 0..3 {
                row.push(Cell::Text(rep.examples.get(i).map_or(String::new(), |e| {
                    let entries: Vec<String> = e.matrix.matrix().iter().map(|x| format!("{x:.16e}")).collect();
                    format!("{} {}", e.index, entries.join(" "))
                })));
            }
            t.push(row);
            t
        }
        Command::FidelityCheck { step } => {
            let h = pick(*step, &s.config, "step", 1e-4)?;
            let cv = cross_validate_marginals(&linspace(2.0, 6.0, 5), &linspace(0.1, 0.9, 5), h)
                .map_err(|e| Failure::Usage(format!("fidelity check: {e}")))?;
            let (lo, hi) = cv
                .points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.2), b.max(p.2)));
            let mut t = Table::new(vec!["points", "mean_ratio", "min_ratio", "max_ratio", "relative_spread"]);
            t.push(vec![
                Cell::Int(cv.points.len() as u64),
                Cell::real(cv.mean),
                Cell::real(lo),
                Cell::real(hi),
                Cell::real(cv.relative_spread),
            ]);
            t
        }
    };
    emit(&table, s.format, s.out.as_deref())
}

fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(format!("cannot write output: {e}"));
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock).map_err(io_err)?;
            lock.flush().map_err(io_err)
        }
    }
}

fn census_failure(s: &Shared) -> impl Fn(CensusError) -> Failure + '_ {
    move |e| match e {
        CensusError::OracleDisagreement { index, ref matrix, margin_sep, margin_ppt } => {
            let path = s.dump_dir.join(format!("disagreement-{}-{index}.txt", s.seed));
            match write_dump(&path, matrix, margin_sep, margin_ppt) {
                Ok(()) => Failure::Oracle(format!("{e}; matrix written to {}", path.display())),
                Err(io) => Failure::Oracle(format!("{e}; could not write {}: {io}", path.display())),
            }
        }
        CensusError::InvalidConfig(m) => Failure::Usage(m),
        CensusError::EmptyCensus => Failure::Usage(e.to_string()),
    }
}

fn log_summary(label: &str, r: &CensusResult) {
    let secs = r.wall_time.as_secs_f64();
    let c = &r.counts;
    log::info!(
        "{label} k={} l={}: {} samples in {:.2}s ({:.0} samples/s), acceptance {:.6}, solver failures {}, unphysical accepted {}",
        r.config.k,
        r.config.l,
        c.generated,
        secs,
        c.generated as f64 / secs.max(1e-9),
        c.accepted as f64 / (c.generated as f64).max(1.0),
        c.solver_failures,
        c.unphysical_accepted
    );
}

fn timed_census(cfg: &SamplerConfig, s: &Shared) -> Result<CensusResult, Failure> {
    let r = run_classical_census(cfg, &s.opts).map_err(census_failure(s))?;
    log_summary("census", &r);
    Ok(r)
}

fn census_row(r: &CensusResult) -> Vec<Cell> {
    let est = r.fisher().ok();
    vec![
        Cell::Param(r.config.k),
        Cell::Param(r.config.l),
        Cell::Int(r.counts.generated),
        Cell::Int(r.counts.accepted),
        Cell::Int(r.counts.separable),
        Cell::Int(r.counts.classical),
        Cell::Real(est.map(|e| e.prob_sep)),
        Cell::Real(est.map(|e| e.prob_classical)),
        Cell::Int(r.config.seed),
    ]
}

fn bures_table(
    cfg: &SamplerConfig,
    choices: &[MetricChoice],
    plan: cvcensus::measures::GridPlan,
    robust: Option<Robust>,
    s: &Shared,
) -> Result<Table, Failure> {
    let mut metrics: Vec<MetricKind> = Vec::new();
    for c in choices {
        if let MetricChoice::Volume(m) = c {
            if !metrics.contains(m) {
                metrics.push(*m);
            }
        }
    }
    let want_fisher = choices.contains(&MetricChoice::Fisher);
    let print_volumes = !metrics.is_empty();
    if metrics.is_empty() {
        metrics.push(MetricKind::Bures);
    }
    let bures = BuresConfig { plan, metrics };
    if let Some(r) = robust {
        if !bures.estimators().contains(&r.estimator()) {
            return Err(Failure::Usage(format!(
                "estimator {:?} does not apply to {} grids",
                r,
                if matches!(plan, cvcensus::measures::GridPlan::Regular { .. }) { "regular" } else { "random" }
            )));
        }
    }
    let r = run_bures_census(cfg, &bures, &s.opts).map_err(census_failure(s))?;
    log_summary("bures census", &r);
    let c = &r.counts;
    log::info!(
        "bures census: survived {}, discarded {} (+{} singular), numerical faults {}, ordering violations {}",
        c.survived,
        c.discarded_grids,
        c.singular_kernels,
        c.numerical_faults,
        c.ordering_violations
    );
    let mut t = Table::new(vec![
        "measure",
        "k",
        "l",
        "samples",
        "accepted",
        "survived",
        "discarded",
        "numerical_faults",
        "ordering_violations",
        "prob_sep",
        "prob_classical",
        "seed",
    ]);
    for (label, est) in &r.measures {
        let keep = match label {
            MeasureLabel::Fisher => want_fisher,
            MeasureLabel::Volume { estimator, .. } => {
                print_volumes && robust.is_none_or(|r| r.estimator() == *estimator)
            }
        };
        if !keep {
            continue;
        }
        t.push(vec![
            Cell::Text(label.to_string()),
            Cell::Param(cfg.k),
            Cell::Param(cfg.l),
            Cell::Int(c.generated),
            Cell::Int(c.accepted),
            Cell::Int(c.survived),
            Cell::Int(c.discarded_grids + c.singular_kernels),
            Cell::Int(c.numerical_faults),
            Cell::Int(c.ordering_violations),
            Cell::Real(est.map(|e| e.prob_sep)),
            Cell::Real(est.map(|e| e.prob_classical)),
            Cell::Int(cfg.seed),
        ]);
    }
    Ok(t)
}
