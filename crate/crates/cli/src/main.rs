//! `qtms-lr`: Monte Carlo and theoretical ROC experiments for the
//! likelihood-ratio and D1 radar detectors.
//!
//! Settings are resolved as defaults, then the `--config` file, then flags.
//! Exit codes: 0 success, 2 invalid arguments, 3 numeric validity error,
//! 4 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qtms_lr::csvio::{read_samples, write_hist_table, write_roc_table, write_scores};
use qtms_lr::detectors;
use qtms_lr::experiment::{
    compare_experiment, hist_experiment, roc_experiment, simulate, HistTable, InvalidApprox, RocTable, RunOptions,
};
use qtms_lr::plan::{ConfigFile, Hypothesis};
use qtms_lr::sigmodel::stats_from_samples;
use qtms_lr::{svg, DetectorKind, Error, PfaGrid, RadarKind, RocSource, SimulationPlan};

/// Config keys that are not plan fields.
const EXTRA_KEYS: [&str; 8] = [
    "grid",
    "theory",
    "detectors",
    "bins",
    "range",
    "null",
    "allow-mixed",
    "invalid-approx",
];

#[derive(Parser)]
#[command(
    name = "qtms-lr",
    version,
    about = "Detector simulations and ROC curves for QTMS and noise radar"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one detector score per trial.
    Simulate(SimulateArgs),
    /// Empirical ROC curve, optionally with the theoretical curve.
    Roc(RocArgs),
    /// Empirical ROC curves of several detectors or plans on one grid.
    Compare(CompareArgs),
    /// Histogram of scores with the theoretical density.
    Hist(HistArgs),
    /// Score a CSV of I/Q samples (`i1,q1,i2,q2`) with every detector.
    Detect(DetectArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Flat `key = value` experiment file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Samples integrated per trial.
    #[arg(long)]
    n: Option<String>,
    /// Correlation coefficient under the alternative, in [0, 1).
    #[arg(long)]
    rho: Option<String>,
    /// Monte Carlo trials per hypothesis (accepts e.g. 1e6).
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// lr, lr-approx or d1.
    #[arg(long)]
    detector: Option<String>,
    #[arg(long)]
    sigma1: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    /// Phase shift in radians.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// qtms or noise.
    #[arg(long)]
    kind: Option<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Approximate detector on trials with P_tot <= 2: fallback (score with
    /// the exact detector), miss (score 0) or error (exit 3).
    #[arg(long)]
    invalid_approx: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Also simulate the null hypothesis (rho = 0).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    null: Option<bool>,
    /// Where null scores go (default: `<out stem>.null.csv`).
    #[arg(long)]
    null_out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// p_fa grid: default, log:LO:HI:COUNT, lin:LO:HI:COUNT, list:P1,P2,...
    /// joined with `+`.
    #[arg(long)]
    grid: Option<String>,
    /// Add theoretical curves.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    theory: Option<bool>,
    /// Also render the curves as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Detectors to compare under the shared plan, e.g. `lr,d1` (default).
    #[arg(long)]
    detectors: Option<String>,
    /// Plan files, each overlaid on the shared plan; replaces --detectors.
    #[arg(long = "plan")]
    plans: Vec<PathBuf>,
    /// Allow plans with different n or rho.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    allow_mixed: Option<bool>,
}

#[derive(Args)]
struct HistArgs {
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Number of bins (default 100).
    #[arg(long)]
    bins: Option<usize>,
    /// Bin range `LO:HI` (default: data range).
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Also render the histogram as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    /// CSV of samples with header `i1,q1,i2,q2`.
    #[arg(long)]
    samples: PathBuf,
    /// qtms or noise.
    #[arg(long, default_value = "qtms")]
    kind: String,
    #[command(flatten)]
    out: OutArgs,
}

/// A resolved plan plus the config extras that apply to it.
struct Setup {
    plan: SimulationPlan,
    config: ConfigFile,
    opts: RunOptions,
}

impl Setup {
    fn extra(&self, key: &str) -> Option<&str> {
        self.config.get(key)
    }

    fn flag_or_extra<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .extra(key)
                .map(|raw| {
                    raw.parse::<T>().map_err(|e| Error::Parse {
                        location: format!("config key `{key}`"),
                        message: e.to_string(),
                    })
                })
                .transpose(),
        }
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, Error> {
    let text = std::fs::read_to_string(path)?;
    let config: ConfigFile = text.parse()?;
    if let Some(key) = config.extra.keys().find(|k| !EXTRA_KEYS.contains(&k.as_str())) {
        return Err(Error::Parse {
            location: path.display().to_string(),
            message: format!("unknown key `{key}`"),
        });
    }
    Ok(config)
}

fn resolve(args: &PlanArgs) -> Result<Setup, Error> {
    let config = match &args.config {
        Some(path) => read_config(path)?,
        None => ConfigFile::default(),
    };
    let mut plan = config.apply(SimulationPlan::default())?;
    let flags = [
        ("n", &args.n),
        ("rho", &args.rho),
        ("trials", &args.trials),
        ("seed", &args.seed),
        ("detector", &args.detector),
        ("sigma1", &args.sigma1),
        ("sigma2", &args.sigma2),
        ("phi", &args.phi),
        ("kind", &args.kind),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            plan.set(key, value)?;
        }
    }
    plan.validate()?;
    let mut setup = Setup {
        plan,
        config,
        opts: RunOptions {
            workers: args.workers,
            ..RunOptions::default()
        },
    };
    setup.opts.invalid_approx = setup
        .flag_or_extra(args.invalid_approx.clone(), "invalid-approx")?
        .map(|s| s.parse::<InvalidApprox>())
        .transpose()?
        .unwrap_or_default();
    Ok(setup)
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn with_output(out: &OutArgs, write: impl FnOnce(&mut dyn Write) -> Result<(), Error>) -> Result<(), Error> {
    match &out.out {
        Some(path) => {
            let mut file = create(path)?;
            write(&mut file)?;
            file.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            write(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn report_undefined(count: u64, policy: InvalidApprox) {
    if count > 0 {
        let action = match policy {
            InvalidApprox::Fallback => "scored with the exact LR detector",
            InvalidApprox::Miss => "scored 0",
            InvalidApprox::Reject => "rejected",
        };
        eprintln!("note: {count} trials had P_tot <= 2, where the approximate detector is undefined; {action}");
    }
}

fn grid(setup: &Setup, args: &GridArgs) -> Result<PfaGrid, Error> {
    match setup.flag_or_extra(args.grid.clone(), "grid")? {
        Some(spec) => spec.parse(),
        None => Ok(PfaGrid::default_grid()),
    }
}

fn emit_roc(
    table: &RocTable,
    out: &OutArgs,
    svg_path: Option<&Path>,
    title: &str,
    opts: &RunOptions,
) -> Result<(), Error> {
    if table.columns.iter().any(|(_, c)| c.source == RocSource::TheoryD1) {
        eprintln!("note: the D1 theoretical curve is a large-n Gaussian approximation");
    }
    report_undefined(table.fallbacks, opts.invalid_approx);
    with_output(out, |w| write_roc_table(w, table))?;
    if let Some(path) = svg_path {
        let mut file = create(path)?;
        file.write_all(svg::render_roc(table, title).as_bytes())?;
        file.flush()?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let setup = resolve(&args.plan)?;
    let with_null = setup.flag_or_extra(args.null, "null")?.unwrap_or(false);
    let null_path = match (&args.null_out, &args.out.out) {
        _ if !with_null => None,
        (Some(path), _) => Some(path.clone()),
        (None, Some(out)) => Some(out.with_extension("null.csv")),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "--null with stdout output needs --null-out".into(),
            ))
        }
    };
    let run = simulate(&setup.plan, Hypothesis::Alternative, &setup.opts)?;
    let mut undefined = run.fallbacks;
    with_output(&args.out, |w| write_scores(w, &run.scores))?;
    if let Some(path) = null_path {
        let null = simulate(&setup.plan, Hypothesis::Null, &setup.opts)?;
        undefined += null.fallbacks;
        let mut file = create(&path)?;
        write_scores(&mut file, &null.scores)?;
        file.flush()?;
    }
    report_undefined(undefined, setup.opts.invalid_approx);
    Ok(())
}

fn cmd_roc(args: &RocArgs) -> Result<(), Error> {
    let setup = resolve(&args.plan)?;
    let grid = grid(&setup, &args.grid)?;
    let theory = setup.flag_or_extra(args.grid.theory, "theory")?.unwrap_or(false);
    let plan = &setup.plan;
    let table = roc_experiment(plan, &grid, theory, &setup.opts)?;
    let title = format!("{} detector, n = {}, rho = {}", plan.detector, plan.n, plan.rho);
    emit_roc(&table, &args.out, args.grid.svg.as_deref(), &title, &setup.opts)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Error> {
    let setup = resolve(&args.plan)?;
    let grid = grid(&setup, &args.grid)?;
    let theory = setup.flag_or_extra(args.grid.theory, "theory")?.unwrap_or(false);
    let allow_mixed = setup.flag_or_extra(args.allow_mixed, "allow-mixed")?.unwrap_or(false);
    let detectors = setup.flag_or_extra(args.detectors.clone(), "detectors")?;
    let plans = if args.plans.is_empty() {
        detectors
            .as_deref()
            .unwrap_or("lr,d1")
            .split(',')
            .map(|name| {
                Ok(SimulationPlan {
                    detector: name.trim().parse::<DetectorKind>()?,
                    ..setup.plan.clone()
                })
            })
            .collect::<Result<Vec<_>, Error>>()?
    } else {
        if args.detectors.is_some() {
            return Err(Error::InvalidParameter(
                "use either --detectors or --plan, not both".into(),
            ));
        }
        args.plans
            .iter()
            .map(|path| {
                let file = read_config(path)?;
                if !file.extra.is_empty() {
                    return Err(Error::Parse {
                        location: path.display().to_string(),
                        message: "plan files may only contain plan keys".into(),
                    });
                }
                let plan = file.apply(setup.plan.clone())?;
                plan.validate()?;
                Ok(plan)
            })
            .collect::<Result<Vec<_>, Error>>()?
    };
    let table = compare_experiment(&plans, &grid, allow_mixed, theory, &setup.opts)?;
    let title = format!("n = {}, rho = {}", setup.plan.n, setup.plan.rho);
    emit_roc(&table, &args.out, args.grid.svg.as_deref(), &title, &setup.opts)
}

fn parse_range(spec: &str) -> Result<(f64, f64), Error> {
    let bad = |m: String| Error::Parse {
        location: "range".into(),
        message: m,
    };
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("expected LO:HI, got `{spec}`")))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
    Ok((num(lo)?, num(hi)?))
}

fn cmd_hist(args: &HistArgs) -> Result<(), Error> {
    let setup = resolve(&args.plan)?;
    let bins = setup.flag_or_extra(args.bins, "bins")?.unwrap_or(100);
    let range = setup
        .flag_or_extra(args.range.clone(), "range")?
        .map(|s| parse_range(&s))
        .transpose()?;
    let table: HistTable = hist_experiment(&setup.plan, bins, range, &setup.opts)?;
    report_undefined(table.fallbacks, setup.opts.invalid_approx);
    if table.histogram.outside > 0 {
        eprintln!(
            "note: {} scores fell outside the histogram range",
            table.histogram.outside
        );
    }
    if setup.plan.detector == DetectorKind::D1 {
        eprintln!("note: the D1 density overlay is a large-n Gaussian approximation");
    }
    with_output(&args.out, |w| write_hist_table(w, &table))?;
    if let Some(path) = &args.svg {
        let plan = &setup.plan;
        let title = format!("{} detector, n = {}, rho = {}", plan.detector, plan.n, plan.rho);
        let mut file = create(path)?;
        file.write_all(svg::render_histogram(&table, &title).as_bytes())?;
        file.flush()?;
    }
    Ok(())
}

fn cmd_detect(args: &DetectArgs) -> Result<(), Error> {
    let kind: RadarKind = args.kind.parse()?;
    let file = File::open(&args.samples)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", args.samples.display()))))?;
    let samples = read_samples(file)?;
    let stats = stats_from_samples(&samples, kind)?;
    eprintln!(
        "n = {}, p_tot_bar = {}, d1_bar = {}",
        stats.n, stats.p_tot_bar, stats.d1_bar
    );
    let mut rows = Vec::new();
    for detector in DetectorKind::ALL {
        let row = match detectors::score(detector, &stats) {
            Ok(s) => format!(
                "{detector},{:?},{}",
                s.value,
                s.rho_hat.map(|r| format!("{r:?}")).unwrap_or_default()
            ),
            Err(Error::Validity(msg)) => {
                eprintln!("note: {detector}: {msg}");
                format!("{detector},,")
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    with_output(&args.out, |w| {
        writeln!(w, "detector,score,rho_hat")?;
        for row in &rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Validity(_) => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Roc(a) => cmd_roc(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Hist(a) => cmd_hist(a),
        Command::Detect(a) => cmd_detect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
