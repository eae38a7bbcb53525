use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gjfacets::limit::{default_probes, eval_limit_batch, LimitParams};
use gjfacets::verify::{
    check_minimal_with, check_subadditive_with, check_symmetric_with, check_two_slope_facet_with,
    check_valid_with, CheckOptions, DEFAULT_WITNESS_CAP,
};
use gjfacets::{
    build, facet_evidence, non_pwl_evidence, structure_report, verify_recursive_decomposition,
    EpsilonSchedule, Execution, PwlFunction, Rational, ScheduleKind, VerificationReport,
};
use serde_json::json;

/// Two-slope facets of the infinite group problem and their limit, in exact
/// rational arithmetic.
#[derive(Parser)]
#[command(name = "gjfacets", version)]
struct Cli {
    /// Worker threads for data-parallel loops (1 runs sequentially).
    #[arg(long, global = true, env = "GJFACETS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build psi_depth and write it as JSON.
    Construct {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an exact check on a serialized function.
    Verify {
        #[arg(long, value_name = "FILE")]
        function: PathBuf,
        /// The point f with psi(f) = 1.
        #[arg(long = "f", value_name = "RATIONAL")]
        fpoint: Rational,
        #[arg(long, value_enum, default_value = "minimal")]
        property: PropertyArg,
        #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
        witness_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a function (from a file, or psi_depth of a schedule) exactly.
    Eval {
        #[arg(long, value_name = "FILE", conflicts_with = "depth")]
        function: Option<PathBuf>,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, required = true, num_args = 1..)]
        x: Vec<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the limit psi: exact value or certified enclosure.
    Limit {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, required = true, num_args = 1..)]
        x: Vec<Rational>,
        #[arg(long, default_value = "1/1000000000")]
        tol: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural evidence reports for psi_depth and the limit.
    Evidence {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, value_enum)]
        kind: EvidenceKind,
        #[arg(long)]
        depth: usize,
        /// Probe points for the approximation chains (facet kind).
        #[arg(long, num_args = 1..)]
        probe: Vec<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a serialized function or plot data.
    Export {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, value_enum)]
        kind: ExportKind,
        /// Construction depth (ignored for the limit plot).
        #[arg(long, default_value_t = 0)]
        depth: usize,
        /// Number of sample points on [0, 1].
        #[arg(long, default_value_t = 1001)]
        resolution: usize,
        /// Decimal digits in CSV output.
        #[arg(long, default_value_t = 12)]
        digits: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Enclosure tolerance for the limit plot.
        #[arg(long, default_value = "1/1000000000")]
        tol: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    alpha: Option<Rational>,
    /// epsilon_i = BASE * RATIO^i.
    #[arg(long, num_args = 2, value_names = ["BASE", "RATIO"], conflicts_with = "explicit")]
    geometric: Option<Vec<Rational>>,
    /// epsilon_1, epsilon_2, ...
    #[arg(long, num_args = 1..)]
    explicit: Option<Vec<Rational>>,
    /// Schedule JSON file; replaces the inline flags.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["alpha", "geometric", "explicit"])]
    schedule: Option<PathBuf>,
}

impl ScheduleArgs {
    fn given(&self) -> bool {
        self.alpha.is_some() || self.geometric.is_some() || self.explicit.is_some() || self.schedule.is_some()
    }

    /// Without any flag the schedule is alpha = 1/2, epsilon_i = (1/2)(1/4)^i.
    fn resolve(&self) -> Result<EpsilonSchedule> {
        if let Some(path) = &self.schedule {
            let text = read(path)?;
            return serde_json::from_str(&text).with_context(|| format!("invalid schedule file {}", path.display()));
        }
        let schedule = match (&self.alpha, &self.geometric, &self.explicit) {
            (None, None, None) => return Ok(EpsilonSchedule::standard()),
            (Some(alpha), Some(g), None) => EpsilonSchedule::geometric(alpha.clone(), g[0].clone(), g[1].clone()),
            (Some(alpha), None, Some(e)) => EpsilonSchedule::explicit(alpha.clone(), e.clone()),
            (None, _, _) => bail!("--alpha is required with --geometric or --explicit"),
            (Some(_), _, _) => bail!("--alpha needs --geometric BASE RATIO or --explicit EPS..."),
        };
        Ok(schedule?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Subadditive,
    Symmetric,
    Minimal,
    TwoSlopeFacet,
    Valid,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvidenceKind {
    Structure,
    Recursion,
    NonPwl,
    Facet,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    /// psi_depth as JSON (same as construct).
    Function,
    /// Samples of psi_depth.
    Plot,
    /// Samples of the limit (enclosure midpoints).
    LimitPlot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load_function(path: &Path) -> Result<PwlFunction> {
    serde_json::from_str(&read(path)?).with_context(|| format!("invalid function file {}", path.display()))
}

fn report_exit(out: Option<&Path>, report: &VerificationReport) -> Result<u8> {
    emit(out, &(report.to_json() + "\n"))?;
    Ok(if report.holds { 0 } else { 1 })
}

/// `k / (n - 1)` for `k = 0..n`.
fn sample_grid(n: usize) -> Result<Vec<Rational>> {
    if n < 2 {
        bail!("--resolution must be at least 2");
    }
    let last = (n - 1) as i64;
    Ok((0..=last).map(|k| Rational::new(k, last)).collect())
}

fn run(cli: Cli) -> Result<u8> {
    let exec = match cli.threads {
        Some(0) => bail!("--threads must be positive"),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot start the thread pool")?;
            Execution::Parallel
        }
        None => Execution::default(),
    };
    match cli.command {
        Command::Construct { schedule, depth, out } => {
            let f = build(&schedule.resolve()?, depth)?;
            emit(out.as_deref(), &pretty(&f)?)?;
            Ok(0)
        }
        Command::Verify { function, fpoint, property, witness_cap, out } => {
            let f = load_function(&function)?;
            let opts = CheckOptions { witness_cap, exec, ..CheckOptions::default() };
            let report = match property {
                PropertyArg::Subadditive => check_subadditive_with(&f, &opts),
                PropertyArg::Symmetric => check_symmetric_with(&f, &fpoint, &opts)?,
                PropertyArg::Minimal => check_minimal_with(&f, &fpoint, &opts)?,
                PropertyArg::TwoSlopeFacet => check_two_slope_facet_with(&f, &fpoint, &opts)?,
                PropertyArg::Valid => check_valid_with(&f, &fpoint, &opts)?,
            };
            report_exit(out.as_deref(), &report)
        }
        Command::Eval { function, schedule, depth, x, out } => {
            let f = match (function, depth) {
                (Some(path), _) => {
                    if schedule.given() {
                        bail!("--function cannot be combined with schedule flags");
                    }
                    load_function(&path)?
                }
                (None, Some(d)) => build(&schedule.resolve()?, d)?,
                (None, None) => bail!("give --function FILE or --depth N"),
            };
            let rows: Vec<_> = x.iter().map(|p| json!({ "x": p, "value": f.eval(p) })).collect();
            emit(out.as_deref(), &pretty(&rows)?)?;
            Ok(0)
        }
        Command::Limit { schedule, x, tol, out } => {
            let params = LimitParams::new(&schedule.resolve()?)?;
            let evals = eval_limit_batch(&x, &tol, &params, exec)?;
            let text = if evals.len() == 1 {
                pretty(&evals[0])?
            } else {
                pretty(&evals)?
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Evidence { schedule, kind, depth, probe, out } => {
            let s = schedule.resolve()?;
            let report = match kind {
                EvidenceKind::Structure => structure_report(&build(&s, depth)?, &s, depth)?,
                EvidenceKind::Recursion => verify_recursive_decomposition(&s, depth)?,
                EvidenceKind::NonPwl => non_pwl_evidence(depth, &s)?,
                EvidenceKind::Facet => {
                    let probes = if probe.is_empty() { default_probes() } else { probe };
                    facet_evidence(depth, &s, &probes)?
                }
            };
            report_exit(out.as_deref(), &report)
        }
        Command::Export { schedule, kind, depth, resolution, digits, format, tol, out } => {
            let s = schedule.resolve()?;
            let text = match kind {
                ExportKind::Function => pretty(&build(&s, depth)?)?,
                ExportKind::Plot => {
                    let f = build(&s, depth)?;
                    let xs = sample_grid(resolution)?;
                    let ys: Vec<_> = xs.iter().map(|x| f.eval(x)).collect();
                    plot(&xs, &ys, format, digits)?
                }
                ExportKind::LimitPlot => {
                    if matches!(s.kind(), ScheduleKind::Explicit(_)) {
                        bail!("the limit plot needs a geometric schedule");
                    }
                    let params = LimitParams::new(&s)?;
                    let xs = sample_grid(resolution)?;
                    let evals = eval_limit_batch(&xs, &tol, &params, exec)?;
                    let ys: Vec<_> = evals
                        .iter()
                        .map(|e| Rational::midpoint(e.lower(), e.upper()))
                        .collect();
                    plot(&xs, &ys, format, digits)?
                }
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn plot(xs: &[Rational], ys: &[Rational], format: Format, digits: usize) -> Result<String> {
    match format {
        Format::Json => {
            let rows: Vec<_> = xs.iter().zip(ys).map(|(x, y)| json!({ "x": x, "y": y })).collect();
            pretty(&rows)
        }
        Format::Csv => {
            let mut s = String::from("x,y\n");
            for (x, y) in xs.iter().zip(ys) {
                s.push_str(&format!("{},{}\n", x.to_decimal_string(digits), y.to_decimal_string(digits)));
            }
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
