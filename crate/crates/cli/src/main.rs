//! `sfsat`: generate, solve and analyze scale-free random k-SAT formulas.
//!
//! Exit status: 0 on success, 1 on file or runtime errors, 2 on usage errors.
//! `solve` follows the SAT-competition convention instead: 10 SAT, 20 UNSAT,
//! 30 UNKNOWN.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sfsat::analysis::{
    default_tail_cutoff, default_x_min, empirical_profile, fit_beta, fit_delta_tail,
    occurrence_counts, pool, write_histogram_csv, write_profile_csv, CriteriaRow, FitResult,
    OccurrenceStats,
};
use sfsat::formula::{read_dimacs, write_dimacs, DimacsDocument};
use sfsat::harness::{
    bracket_cap, find_crossing, fit_scaling_exponent, ms_from_ratios, run_sweep,
    write_crossings_csv, CrossingSpec, SolverChoice, SweepSpec, CROSSING_RESOLUTION,
};
use sfsat::solver::{solve_2sat, solve_dpll};
use sfsat::theory::build_report;
use sfsat::{generate_formula, GeneratorParams, Parallelism, SamplerMode, SatStatus};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// The one environment variable the tool reads: a default seed.
const SEED_ENV: &str = "SFSAT_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "sfsat",
    version,
    about = "Scale-free random k-SAT: generation, solving and experiments"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one random formula in DIMACS CNF.
    Generate(GenerateArgs),
    /// Decide a DIMACS file; exit 10 SAT, 20 UNSAT, 30 UNKNOWN.
    Solve(SolveArgs),
    /// Occurrence statistics and percolation criteria as CSV.
    Analyze(AnalyzeArgs),
    /// Fit the power-law exponents of one or more formulas.
    FitBeta(FitArgs),
    /// Closed-form thresholds for (n, k, beta).
    Thresholds(ThresholdArgs),
    /// Satisfiable fraction over a (beta, m) grid.
    Sweep(SweepArgs),
    /// Clause count at which half the formulas are unsatisfiable.
    Crossing(CrossingArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    vars: u32,
    #[arg(long)]
    clauses: u64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Defaults to $SFSAT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Closed-form inverse sampler instead of the exact table.
    #[arg(long)]
    approx_sampler: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    #[value(name = "2sat")]
    TwoSat,
    Dpll,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = SolveMode::Dpll)]
    mode: SolveMode,
    /// DPLL node budget.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    file: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// One row for all files together instead of one per file.
    #[arg(long)]
    pooled: bool,
    /// Write the `K,count` occurrence histogram (one file or --pooled).
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Write the `x,phi` normalized profile (one file or --pooled).
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Lower end of the profile fit; default 10/n.
    #[arg(long)]
    x_min: Option<f64>,
    /// Lower occurrence count of the tail fit; default from the profile fit.
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    #[value(name = "2sat")]
    TwoSat,
    Dpll,
    External,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Default: 2sat for k = 2, dpll otherwise.
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Command template for --solver external; `{cnf}` is the instance path.
    #[arg(long)]
    command: Option<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Defaults to $SFSAT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output; the configuration goes to `<out>.meta`. Standard output
    /// (with the configuration on standard error) when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    vars: u32,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    betas: Vec<f64>,
    /// Clause-to-variable ratios; m = round(ratio * n).
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "clauses",
        required_unless_present = "clauses"
    )]
    ratios: Vec<f64>,
    /// Explicit clause counts.
    #[arg(long, value_delimiter = ',')]
    clauses: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct CrossingArgs {
    /// One or more n; four or more spanning 8x also get a scaling fit.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    run: RunArgs,
}

/// Marks errors that should exit with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Resolved configuration, echoed as `key = value` lines.
#[derive(Default)]
struct Meta(Vec<(String, String)>);

impl Meta {
    fn set(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    /// To `<out>.meta` when writing to a file, else to stderr as `#` lines.
    fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => {
                let mut meta = path.as_os_str().to_owned();
                meta.push(".meta");
                let meta = PathBuf::from(meta);
                let mut w = create(&meta)?;
                for (k, v) in &self.0 {
                    writeln!(w, "{k} = {v}")?;
                }
                w.flush().with_context(|| meta.display().to_string())?;
            }
            None => {
                let mut err = io::stderr().lock();
                for (k, v) in &self.0 {
                    writeln!(err, "# {k} = {v}")?;
                }
            }
        }
        Ok(())
    }
}

fn resolve_seed(flag: Option<u64>, meta: &mut Meta) -> Result<u64> {
    let (seed, source) = match flag {
        Some(s) => (s, "flag".to_string()),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => {
                let s = v
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
                (s, SEED_ENV.to_string())
            }
            Err(_) => (0, "default".to_string()),
        },
    };
    meta.set("seed", seed);
    meta.set("seed_source", source);
    Ok(seed)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("{}: cannot create", path.display()))?;
    Ok(BufWriter::new(f))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_file(path: &Path) -> Result<DimacsDocument> {
    let f = File::open(path).with_context(|| format!("{}: cannot open", path.display()))?;
    read_dimacs(BufReader::new(f)).with_context(|| path.display().to_string())
}

fn stats_of(doc: &DimacsDocument) -> OccurrenceStats {
    occurrence_counts(&doc.formula)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Analyze(a) => analyze(a),
        Command::FitBeta(a) => fit(a),
        Command::Thresholds(a) => thresholds(a),
        Command::Sweep(a) => sweep(a),
        Command::Crossing(a) => crossing(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sfsat: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let mut meta = Meta::default();
    let seed = resolve_seed(a.seed, &mut meta)?;
    let mode = if a.approx_sampler {
        SamplerMode::ApproximateInverse
    } else {
        SamplerMode::ExactTable
    };
    let params = GeneratorParams::new(a.vars, a.clauses, a.k, a.beta, seed).with_sampler_mode(mode);
    params.validate().map_err(|e| usage(e.to_string()))?;
    let formula = generate_formula(&params)?;

    let mut header = vec![
        ("generator".to_string(), "sfsat".to_string()),
        ("n".to_string(), a.vars.to_string()),
        ("m".to_string(), a.clauses.to_string()),
        ("k".to_string(), a.k.to_string()),
        ("beta".to_string(), a.beta.to_string()),
    ];
    header.extend(meta.0);
    header.push((
        "sampler".to_string(),
        if a.approx_sampler {
            "approximate-inverse"
        } else {
            "exact-table"
        }
        .to_string(),
    ));
    let mut out = output(a.out.as_deref())?;
    let name = a
        .out
        .as_ref()
        .map_or("<stdout>".to_string(), |p| p.display().to_string());
    write_dimacs(&formula, header, &mut out).with_context(|| name.clone())?;
    out.flush().with_context(|| name)?;
    Ok(ExitCode::SUCCESS)
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let doc = read_file(&a.file)?;
    let result = match a.mode {
        SolveMode::TwoSat => {
            solve_2sat(&doc.formula).with_context(|| a.file.display().to_string())?
        }
        SolveMode::Dpll => solve_dpll(&doc.formula, a.budget.max(1)),
    };
    let mut out = io::stdout().lock();
    writeln!(out, "c file = {}", a.file.display())?;
    match a.mode {
        SolveMode::TwoSat => writeln!(out, "c mode = 2sat")?,
        SolveMode::Dpll => writeln!(out, "c mode = dpll\nc budget = {}", a.budget)?,
    }
    let line = match result.status {
        SatStatus::Sat => "SATISFIABLE",
        SatStatus::Unsat => "UNSATISFIABLE",
        SatStatus::Unknown => "UNKNOWN",
    };
    writeln!(out, "s {line}")?;
    if let Some(w) = &result.witness {
        let lits: Vec<String> = w
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if b {
                    format!("{}", i + 1)
                } else {
                    format!("-{}", i + 1)
                }
            })
            .collect();
        writeln!(out, "v {} 0", lits.join(" "))?;
    }
    Ok(ExitCode::from(result.status.exit_code() as u8))
}

/// Width and beta from generator metadata, falling back to a uniform width.
fn k_and_beta(doc: &DimacsDocument) -> (Option<usize>, Option<f64>) {
    let k = doc
        .metadata_value("k")
        .and_then(|v| v.parse().ok())
        .or_else(|| doc.formula.uniform_width());
    let beta = doc.metadata_value("beta").and_then(|v| v.parse().ok());
    (k, beta)
}

fn common<T: PartialEq + Copy>(values: impl IntoIterator<Item = Option<T>>) -> Option<T> {
    let mut it = values.into_iter();
    let first = it.next()??;
    it.all(|v| v == Some(first)).then_some(first)
}

fn analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let single = a.pooled || a.files.len() == 1;
    if !single && (a.histogram.is_some() || a.profile.is_some()) {
        return Err(usage(
            "--histogram and --profile need a single file or --pooled",
        ));
    }
    let docs = a
        .files
        .iter()
        .map(|p| read_file(p))
        .collect::<Result<Vec<_>>>()?;
    let stats: Vec<OccurrenceStats> = docs.iter().map(stats_of).collect();

    let mut meta = Meta::default();
    meta.set("command", "analyze");
    meta.set("pooled", a.pooled);
    meta.set(
        "files",
        a.files
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    meta.emit(a.out.as_deref())?;

    let mut out = output(a.out.as_deref())?;
    writeln!(out, "file,{}", CriteriaRow::HEADER)?;
    if a.pooled {
        let kb: Vec<_> = docs.iter().map(k_and_beta).collect();
        let row = CriteriaRow::new(
            &pool(&stats),
            common(kb.iter().map(|x| x.0)),
            common(kb.iter().map(|x| x.1)),
        );
        write!(out, "pooled,")?;
        row.write_csv(&mut out)?;
    } else {
        for ((path, doc), s) in a.files.iter().zip(&docs).zip(&stats) {
            let (k, beta) = k_and_beta(doc);
            write!(out, "{},", path.display())?;
            CriteriaRow::new(s, k, beta).write_csv(&mut out)?;
        }
    }
    out.flush()?;

    if single {
        let s = if a.pooled {
            pool(&stats)
        } else {
            stats[0].clone()
        };
        if let Some(p) = &a.histogram {
            let mut w = create(p)?;
            write_histogram_csv(&s, &mut w)
                .and_then(|_| w.flush())
                .with_context(|| p.display().to_string())?;
        }
        if let Some(p) = &a.profile {
            let profile = empirical_profile(&s)?;
            let mut w = create(p)?;
            write_profile_csv(&profile, &mut w)
                .and_then(|_| w.flush())
                .with_context(|| p.display().to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fit(a: FitArgs) -> Result<ExitCode> {
    let docs = a
        .files
        .iter()
        .map(|p| read_file(p))
        .collect::<Result<Vec<_>>>()?;
    let stats = pool(&docs.iter().map(stats_of).collect::<Vec<_>>());
    let x_min = a.x_min.unwrap_or_else(|| default_x_min(stats.n()));
    let profile_fit =
        fit_beta(&empirical_profile(&stats)?, x_min).map_err(|e| usage(e.to_string()))?;
    let k_min = a
        .k_min
        .unwrap_or_else(|| default_tail_cutoff(&stats, profile_fit.beta_hat));
    let tail_fit = fit_delta_tail(&stats, k_min);

    let mut meta = Meta::default();
    meta.set("command", "fit-beta");
    meta.set(
        "files",
        a.files
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    meta.set("x_min", x_min);
    meta.set("k_min", k_min);
    meta.emit(a.out.as_deref())?;

    let mut out = output(a.out.as_deref())?;
    writeln!(
        out,
        "target,beta_hat,delta_hat,range_lo,range_hi,residual,points"
    )?;
    let row = |out: &mut dyn Write, name: &str, f: &FitResult| {
        writeln!(
            out,
            "{name},{},{},{},{},{},{}",
            f.beta_hat, f.delta_hat, f.fit_range.0, f.fit_range.1, f.residual, f.points
        )
    };
    row(&mut out, "beta", &profile_fit)?;
    match &tail_fit {
        Ok(f) => row(&mut out, "delta", f)?,
        Err(e) => log::warn!("tail fit skipped: {e}"),
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn thresholds(a: ThresholdArgs) -> Result<ExitCode> {
    let report = build_report(a.n, a.k, a.beta).map_err(|e| usage(e.to_string()))?;
    let mut out = io::stdout().lock();
    match a.format {
        Format::Text => report.write_text(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn solver_choice(s: &SolverArgs, k: usize) -> Result<SolverChoice> {
    let kind = s.solver.unwrap_or(if k == 2 {
        SolverKind::TwoSat
    } else {
        SolverKind::Dpll
    });
    Ok(match kind {
        SolverKind::TwoSat => SolverChoice::TwoSat,
        SolverKind::Dpll => SolverChoice::Dpll {
            budget: s.budget.max(1),
        },
        SolverKind::External => SolverChoice::External {
            template: s
                .command
                .clone()
                .ok_or_else(|| usage("--solver external needs --command"))?,
        },
    })
}

/// Runs `f` on a pool of `jobs` threads, or the global pool.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(j) = jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    if jobs.is_some_and(|j| j > 1) {
        log::warn!("built without the parallel feature; --jobs ignored");
    }
    Ok(f())
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let mut meta = Meta::default();
    meta.set("command", "sweep");
    let solver = solver_choice(&a.solver, a.k)?;
    let seed = resolve_seed(a.run.seed, &mut meta)?;
    let m_grid = if a.clauses.is_empty() {
        ms_from_ratios(a.vars, &a.ratios)
    } else {
        a.clauses.clone()
    };
    let spec = SweepSpec {
        n: a.vars,
        k: a.k,
        beta_grid: a.betas.clone(),
        m_grid,
        trials: a.trials,
        solver,
        base_seed: seed,
        parallelism: Parallelism::Parallel,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    meta.set("n", spec.n);
    meta.set("k", spec.k);
    meta.set("betas", join(&spec.beta_grid));
    meta.set("m_grid", join(&spec.m_grid));
    meta.set("trials", spec.trials);
    meta.set("solver", spec.solver.describe());
    meta.set(
        "jobs",
        a.run.jobs.map_or("auto".to_string(), |j| j.to_string()),
    );
    meta.set(
        "sat_fraction",
        "sat/(sat+unsat); UNKNOWN and failed trials excluded",
    );
    meta.emit(a.run.out.as_deref())?;

    let result = with_jobs(a.run.jobs, || run_sweep(&spec))??;
    let mut out = output(a.run.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    let flagged = result.rows.iter().filter(|r| r.flagged()).count();
    if flagged > 0 {
        log::warn!("{flagged} rows flagged by solver failures");
    }
    Ok(ExitCode::SUCCESS)
}

fn crossing(a: CrossingArgs) -> Result<ExitCode> {
    let mut meta = Meta::default();
    meta.set("command", "crossing");
    let solver = solver_choice(&a.solver, a.k)?;
    let seed = resolve_seed(a.run.seed, &mut meta)?;
    if a.trials < 20 {
        return Err(usage("--trials must be at least 20"));
    }
    meta.set("vars", join(&a.vars));
    meta.set("k", a.k);
    meta.set("beta", a.beta);
    meta.set("trials_per_probe", a.trials);
    meta.set("solver", solver.describe());
    meta.set(
        "jobs",
        a.run.jobs.map_or("auto".to_string(), |j| j.to_string()),
    );
    meta.set(
        "method",
        format!(
            "doubling from m=1 then bisection to halfwidth <= {}% of m_50; bracket cap 4*2^k*ln2*n",
            CROSSING_RESOLUTION * 100.0
        ),
    );

    let results = with_jobs(a.run.jobs, || {
        a.vars
            .iter()
            .map(|&n| {
                let spec = CrossingSpec {
                    n,
                    k: a.k,
                    beta: a.beta,
                    trials_per_probe: a.trials,
                    solver: solver.clone(),
                    base_seed: seed,
                    parallelism: Parallelism::Parallel,
                };
                find_crossing(&spec)
                    .with_context(|| format!("n = {n} (cap {})", bracket_cap(n, a.k)))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    for r in results.iter().filter(|r| !r.valid) {
        meta.set(
            "invalid",
            format!(
                "n={} ({:.1}% undecided)",
                r.n,
                100.0 * r.undecided_fraction()
            ),
        );
    }
    if let Ok(fit) = fit_scaling_exponent(&results) {
        meta.set("scaling_slope", fit.slope);
        meta.set("scaling_intercept", fit.intercept);
    }
    meta.emit(a.run.out.as_deref())?;

    let mut out = output(a.run.out.as_deref())?;
    write_crossings_csv(&results, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn common_value() {
        assert_eq!(common([Some(2), Some(2)]), Some(2));
        assert_eq!(common([Some(2), Some(3)]), None);
        assert_eq!(common([Some(2), None]), None);
        assert_eq!(common::<u8>([]), None);
    }
}
