//! Monte Carlo experiments: satisfiable-fraction sweeps, 50% crossing search,
//! scaling fits and exposure diagnostics.
//!
//! Every formula's seed is a pure function of the base seed and its grid
//! coordinates, `derive_seed(derive_seed(base, [β bits, m]), [trial])`, so any
//! single cell can be regenerated alone and results do not depend on the
//! number of worker threads.

use crate::analysis::occurrence_counts_with;
use crate::formula::{write_dimacs, Formula, Literal};
use crate::generator::{generate_formula_from, GeneratorError};
use crate::par::{self, Parallelism};
use crate::rng::{self, derive_seed};
use crate::sampler::{PowerLawDist, SamplerMode};
use crate::solver::{
    find_implied_set, solve_2sat, solve_dpll, ExposureOutcome, SatStatus, SolverError,
};
use crate::stats::{isotonic_nonincreasing, line_fit};
use rand::Rng;
use std::collections::BTreeSet;
use std::io::{self, Write};
use std::process::Command;
use thiserror::Error;

/// Crossing results with more UNKNOWN probe formulas than this are invalid.
pub const MAX_UNKNOWN_FRACTION: f64 = 0.05;

/// Bisection stops once the bracket half-width is at most this fraction of
/// the midpoint.
pub const CROSSING_RESOLUTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("no m up to {cap} makes half the formulas unsatisfiable")]
    NoBracket { cap: u64 },
    #[error("scaling fit needs at least 4 distinct n spanning a factor of 8; got {distinct} values spanning {span:.2}x")]
    TooFewSizes { distinct: usize, span: f64 },
}

/// How formulas are decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Exact SCC-based 2-SAT; width-2 formulas only.
    TwoSat,
    /// DPLL with a node budget; may return UNKNOWN.
    Dpll { budget: u64 },
    /// An external program. `{cnf}` in the template is replaced by the path
    /// of a temporary DIMACS file; exit status 10 means SAT and 20 UNSAT.
    External { template: String },
}

impl SolverChoice {
    pub fn describe(&self) -> String {
        match self {
            SolverChoice::TwoSat => "2sat".to_string(),
            SolverChoice::Dpll { budget } => format!("dpll(budget={budget})"),
            SolverChoice::External { template } => format!("external({template})"),
        }
    }
}

/// Decides one formula. `Err` carries a message for flagged rows.
pub fn solve_with(choice: &SolverChoice, formula: &Formula) -> Result<SatStatus, String> {
    match choice {
        SolverChoice::TwoSat => solve_2sat(formula)
            .map(|r| r.status)
            .map_err(|e| e.to_string()),
        SolverChoice::Dpll { budget } => Ok(solve_dpll(formula, *budget).status),
        SolverChoice::External { template } => run_external(template, formula),
    }
}

fn run_external(template: &str, formula: &Formula) -> Result<SatStatus, String> {
    let mut file = tempfile::Builder::new()
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| format!("temporary file: {e}"))?;
    write_dimacs(
        formula,
        std::iter::empty::<(&str, &str)>(),
        file.as_file_mut(),
    )
    .map_err(|e| format!("writing temporary CNF: {e}"))?;
    let path = file.path().to_string_lossy().into_owned();
    let mut argv = template
        .split_whitespace()
        .map(|t| t.replace("{cnf}", &path));
    let program = argv.next().ok_or("empty solver command")?;
    let output = Command::new(&program)
        .args(argv)
        .output()
        .map_err(|e| format!("running {program}: {e}"))?;
    match output.status.code() {
        Some(10) => Ok(SatStatus::Sat),
        Some(20) => Ok(SatStatus::Unsat),
        other => Err(format!(
            "{program} exited with {other:?}; expected 10 (SAT) or 20 (UNSAT)"
        )),
    }
}

/// Seed shared by all trials of one `(β, m)` cell.
pub fn cell_seed(base_seed: u64, beta: f64, m: u64) -> u64 {
    derive_seed(base_seed, &[beta.to_bits(), m])
}

/// Seed of trial `t` inside a cell.
pub fn trial_seed(cell_seed: u64, t: u64) -> u64 {
    derive_seed(cell_seed, &[t])
}

/// `m = round(ratio · n)` for each ratio, at least 1.
pub fn ms_from_ratios(n: u32, ratios: &[f64]) -> Vec<u64> {
    ratios
        .iter()
        .map(|r| ((r * f64::from(n)).round() as u64).max(1))
        .collect()
}

/// A grid of `(β, m)` cells with a fixed number of formulas per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub n: u32,
    pub k: usize,
    pub beta_grid: Vec<f64>,
    pub m_grid: Vec<u64>,
    pub trials: u64,
    pub solver: SolverChoice,
    pub base_seed: u64,
    pub parallelism: Parallelism,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: &str| Err(HarnessError::InvalidSpec(s.to_string()));
        if self.beta_grid.is_empty() || self.m_grid.is_empty() {
            return bad("beta and m grids must be nonempty");
        }
        if self.trials == 0 {
            return bad("need at least one trial per cell");
        }
        if self.solver == SolverChoice::TwoSat && self.k != 2 {
            return bad("the 2-SAT solver needs k = 2");
        }
        if self.k == 0 || self.k as u64 > u64::from(self.n) {
            return bad("need 1 <= k <= n");
        }
        if self.m_grid.contains(&0) {
            return bad("m must be positive");
        }
        Ok(())
    }
}

/// Aggregate over the trials of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub m: u64,
    pub n: u32,
    pub trials: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
    /// Trials whose solver failed; a nonzero count flags the row.
    pub errors: u64,
    /// Mean `E[K²]/E[K]` over the trial formulas.
    pub mean_ratio: f64,
    pub seed_base: u64,
    pub first_error: Option<String>,
}

impl SweepRow {
    /// `sat / (sat + unsat)`; UNKNOWN and failed trials are excluded.
    /// NaN when nothing was decided.
    pub fn sat_fraction(&self) -> f64 {
        let decided = self.sat + self.unsat;
        if decided == 0 {
            f64::NAN
        } else {
            self.sat as f64 / decided as f64
        }
    }

    pub fn flagged(&self) -> bool {
        self.errors > 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "beta,m,n,trials,sat,unsat,unknown,sat_fraction,seed_base";

    /// Flagged rows print `nan` as their fraction.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let frac = if r.flagged() {
                f64::NAN
            } else {
                r.sat_fraction()
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.beta, r.m, r.n, r.trials, r.sat, r.unsat, r.unknown, frac, r.seed_base
            )?;
        }
        Ok(())
    }

    /// Rows for one β, in grid order.
    pub fn rows_for(&self, beta: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.beta == beta).collect()
    }

    /// The `m` at which the isotonically smoothed satisfiable fraction of the
    /// `β` row falls to one half, linearly interpolated.
    pub fn crossing(&self, beta: f64) -> Option<f64> {
        let mut rows = self.rows_for(beta);
        rows.sort_by_key(|r| r.m);
        crossing_from_points(
            &rows
                .iter()
                .filter(|r| r.sat + r.unsat > 0 && !r.flagged())
                .map(|r| (r.m as f64, r.sat_fraction(), (r.sat + r.unsat) as f64))
                .collect::<Vec<_>>(),
        )
    }
}

/// Half-crossing of `(m, sat_fraction, weight)` points sorted by `m`.
pub fn crossing_from_points(points: &[(f64, f64, f64)]) -> Option<f64> {
    let values: Vec<f64> = points.iter().map(|p| p.1).collect();
    let weights: Vec<f64> = points.iter().map(|p| p.2).collect();
    let smooth = isotonic_nonincreasing(&values, &weights);
    let i = smooth.iter().position(|&f| f <= 0.5)?;
    if i == 0 {
        return None;
    }
    let (m0, f0, m1, f1) = (points[i - 1].0, smooth[i - 1], points[i].0, smooth[i]);
    Some(m0 + (f0 - 0.5) / (f0 - f1) * (m1 - m0))
}

#[derive(Clone, Debug)]
struct Trial {
    status: Result<SatStatus, String>,
    ratio: f64,
}

fn run_trial(
    dist: &PowerLawDist,
    m: u64,
    k: usize,
    seed: u64,
    solver: &SolverChoice,
) -> Result<Trial, HarnessError> {
    let f = generate_formula_from(dist, m, k, seed, Parallelism::Sequential)?;
    let ratio = occurrence_counts_with(&f, Parallelism::Sequential)
        .moment_ratio()
        .unwrap_or(f64::NAN);
    Ok(Trial {
        status: solve_with(solver, &f),
        ratio,
    })
}

fn aggregate(beta: f64, m: u64, n: u32, seed_base: u64, trials: &[Trial]) -> SweepRow {
    let mut row = SweepRow {
        beta,
        m,
        n,
        trials: trials.len() as u64,
        sat: 0,
        unsat: 0,
        unknown: 0,
        errors: 0,
        mean_ratio: trials.iter().map(|t| t.ratio).sum::<f64>() / trials.len() as f64,
        seed_base,
        first_error: None,
    };
    for t in trials {
        match &t.status {
            Ok(SatStatus::Sat) => row.sat += 1,
            Ok(SatStatus::Unsat) => row.unsat += 1,
            Ok(SatStatus::Unknown) => row.unknown += 1,
            Err(e) => {
                row.errors += 1;
                row.first_error.get_or_insert_with(|| e.clone());
            }
        }
    }
    if let Some(e) = &row.first_error {
        log::warn!(
            "beta={beta} m={m}: {} solver failures, first: {e}",
            row.errors
        );
    }
    row
}

fn distribution(n: u32, beta: f64) -> Result<PowerLawDist, HarnessError> {
    Ok(PowerLawDist::new(n, beta, SamplerMode::for_size(n)).map_err(GeneratorError::from)?)
}

/// Runs every `(β, m, trial)` of the grid and aggregates per cell.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    let dists = spec
        .beta_grid
        .iter()
        .map(|&b| distribution(spec.n, b))
        .collect::<Result<Vec<_>, _>>()?;
    let cells: Vec<(usize, u64)> = (0..spec.beta_grid.len())
        .flat_map(|b| spec.m_grid.iter().map(move |&m| (b, m)))
        .collect();
    let per_cell = spec.trials;
    let trials = par::try_map_range(spec.parallelism, cells.len() as u64 * per_cell, |task| {
        let (b, m) = cells[(task / per_cell) as usize];
        let seed = trial_seed(
            cell_seed(spec.base_seed, spec.beta_grid[b], m),
            task % per_cell,
        );
        run_trial(&dists[b], m, spec.k, seed, &spec.solver)
    })?;
    let rows = cells
        .iter()
        .zip(trials.chunks(per_cell as usize))
        .map(|(&(b, m), ts)| {
            let beta = spec.beta_grid[b];
            aggregate(beta, m, spec.n, cell_seed(spec.base_seed, beta, m), ts)
        })
        .collect();
    Ok(SweepResult { rows })
}

/// Inputs of a crossing search.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingSpec {
    pub n: u32,
    pub k: usize,
    pub beta: f64,
    pub trials_per_probe: u64,
    pub solver: SolverChoice,
    pub base_seed: u64,
    pub parallelism: Parallelism,
}

/// One evaluated `m` during a crossing search.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub m: u64,
    pub row: SweepRow,
}

impl Probe {
    pub fn unsat_fraction(&self) -> f64 {
        1.0 - self.row.sat_fraction()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingResult {
    pub n: u32,
    pub k: usize,
    pub beta: f64,
    pub m_50: u64,
    pub confidence_halfwidth: u64,
    pub trials_per_probe: u64,
    /// Final bracket: UNSAT fraction below one half at `lo` (or `lo = 0`),
    /// at least one half at `hi`.
    pub lo: u64,
    pub hi: u64,
    pub probes: Vec<Probe>,
    /// False when more than 5% of probe formulas came back UNKNOWN or failed.
    pub valid: bool,
}

impl CrossingResult {
    pub const CSV_HEADER: &'static str = "n,k,beta,m_50,halfwidth";

    pub fn write_csv_row<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{}",
            self.n, self.k, self.beta, self.m_50, self.confidence_halfwidth
        )
    }

    /// Fraction of probe formulas that were not decided.
    pub fn undecided_fraction(&self) -> f64 {
        let total: u64 = self.probes.iter().map(|p| p.row.trials).sum();
        let bad: u64 = self
            .probes
            .iter()
            .map(|p| p.row.unknown + p.row.errors)
            .sum();
        bad as f64 / total.max(1) as f64
    }
}

/// Writes a crossing table.
pub fn write_crossings_csv<W: Write>(crossings: &[CrossingResult], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", CrossingResult::CSV_HEADER)?;
    for c in crossings {
        c.write_csv_row(&mut out)?;
    }
    Ok(())
}

/// Largest `m` the bracketing phase tries: four times the first-moment
/// unsatisfiability density `2^k ln 2`.
pub fn bracket_cap(n: u32, k: usize) -> u64 {
    (4.0 * 2f64.powi(k as i32) * std::f64::consts::LN_2 * f64::from(n)).ceil() as u64
}

/// Finds the clause count at which half the formulas are unsatisfiable:
/// doubling from `m = 1` until the UNSAT fraction reaches one half, then
/// bisecting until the bracket half-width is within 5% of its midpoint.
pub fn find_crossing(spec: &CrossingSpec) -> Result<CrossingResult, HarnessError> {
    if spec.trials_per_probe < 20 {
        return Err(HarnessError::InvalidSpec(
            "need at least 20 trials per probe".into(),
        ));
    }
    if spec.solver == SolverChoice::TwoSat && spec.k != 2 {
        return Err(HarnessError::InvalidSpec(
            "the 2-SAT solver needs k = 2".into(),
        ));
    }
    let dist = distribution(spec.n, spec.beta)?;
    let mut probes: Vec<Probe> = Vec::new();
    let mut probe = |m: u64| -> Result<bool, HarnessError> {
        let seed_base = cell_seed(spec.base_seed, spec.beta, m);
        let trials = par::try_map_range(spec.parallelism, spec.trials_per_probe, |t| {
            run_trial(&dist, m, spec.k, trial_seed(seed_base, t), &spec.solver)
        })?;
        let row = aggregate(spec.beta, m, spec.n, seed_base, &trials);
        // Nothing decided counts as "not yet unsatisfiable".
        let unsat_half = row.sat + row.unsat > 0 && row.unsat * 2 >= row.sat + row.unsat;
        log::debug!(
            "probe m={m}: sat={} unsat={} unknown={}",
            row.sat,
            row.unsat,
            row.unknown
        );
        probes.push(Probe { m, row });
        Ok(unsat_half)
    };

    let cap = bracket_cap(spec.n, spec.k);
    let (mut lo, mut hi) = (0u64, 1u64);
    if !probe(1)? {
        lo = 1;
        loop {
            hi = lo * 2;
            if hi > cap {
                return Err(HarnessError::NoBracket { cap });
            }
            if probe(hi)? {
                break;
            }
            lo = hi;
        }
    }
    loop {
        let mid = lo + (hi - lo) / 2;
        let halfwidth = hi - mid;
        if hi - lo <= 1 || halfwidth as f64 <= CROSSING_RESOLUTION * mid as f64 {
            break;
        }
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let m_50 = lo + (hi - lo) / 2;
    let mut result = CrossingResult {
        n: spec.n,
        k: spec.k,
        beta: spec.beta,
        m_50: m_50.max(1),
        confidence_halfwidth: hi - m_50,
        trials_per_probe: spec.trials_per_probe,
        lo,
        hi,
        probes,
        valid: true,
    };
    result.valid = result.undecided_fraction() <= MAX_UNKNOWN_FRACTION;
    if !result.valid {
        log::warn!(
            "crossing n={} beta={}: {:.1}% of probe formulas undecided; result flagged invalid",
            spec.n,
            spec.beta,
            100.0 * result.undecided_fraction()
        );
    }
    Ok(result)
}

/// Least-squares line through `(ln n, ln m_50)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Slope of `ln m_50` against `ln n`. Needs at least four distinct `n`
/// spanning a factor of eight.
pub fn fit_scaling_exponent(crossings: &[CrossingResult]) -> Result<ScalingFit, HarnessError> {
    let sizes: BTreeSet<u32> = crossings.iter().map(|c| c.n).collect();
    let span = match (sizes.first(), sizes.last()) {
        (Some(&a), Some(&b)) => f64::from(b) / f64::from(a),
        _ => 0.0,
    };
    if sizes.len() < 4 || span < 8.0 {
        return Err(HarnessError::TooFewSizes {
            distinct: sizes.len(),
            span,
        });
    }
    let pts: Vec<(f64, f64)> = crossings
        .iter()
        .map(|c| (f64::from(c.n).ln(), (c.m_50 as f64).ln()))
        .collect();
    let fit = line_fit(&pts).expect("at least two distinct n");
    Ok(ScalingFit {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.rms,
    })
}

/// Inputs of [`exposure_statistics`]; formulas are 2-CNF.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureSpec {
    pub n: u32,
    pub beta: f64,
    pub m: u64,
    pub trials: u64,
    pub starts_per_formula: u64,
    pub giant_fraction: f64,
    pub base_seed: u64,
    pub parallelism: Parallelism,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExposureSummary {
    pub runs: u64,
    pub closed: u64,
    pub contradiction: u64,
    pub giant: u64,
    pub mean_max_walk: f64,
    /// Steps whose walk increment disagreed with their case; always zero
    /// unless the exposure is broken.
    pub case_mismatches: u64,
}

impl ExposureSummary {
    pub fn fraction(&self, outcome: ExposureOutcome) -> f64 {
        let c = match outcome {
            ExposureOutcome::Closed => self.closed,
            ExposureOutcome::Contradiction => self.contradiction,
            ExposureOutcome::Giant => self.giant,
        };
        c as f64 / self.runs.max(1) as f64
    }
}

/// Runs the exposure from random start literals of random formulas and
/// tallies how the walks end.
pub fn exposure_statistics(spec: &ExposureSpec) -> Result<ExposureSummary, HarnessError> {
    if spec.trials == 0 || spec.starts_per_formula == 0 {
        return Err(HarnessError::InvalidSpec(
            "need at least one formula and one start".into(),
        ));
    }
    let dist = distribution(spec.n, spec.beta)?;
    let seed_base = cell_seed(spec.base_seed, spec.beta, spec.m);
    let parts = par::try_map_range(
        spec.parallelism,
        spec.trials,
        |t| -> Result<ExposureSummary, HarnessError> {
            let seed = trial_seed(seed_base, t);
            let f = generate_formula_from(&dist, spec.m, 2, seed, Parallelism::Sequential)?;
            let mut starts = rng::stream(seed, u64::MAX);
            let mut s = ExposureSummary::default();
            let mut walk_sum = 0.0;
            for _ in 0..spec.starts_per_formula {
                let index = starts.random_range(0..2 * spec.n as usize);
                let trace = find_implied_set(&f, Literal::from_index(index), spec.giant_fraction)?;
                s.runs += 1;
                match trace.outcome {
                    ExposureOutcome::Closed => s.closed += 1,
                    ExposureOutcome::Contradiction => s.contradiction += 1,
                    ExposureOutcome::Giant => s.giant += 1,
                }
                walk_sum += trace.max_walk() as f64;
                s.case_mismatches += trace
                    .steps
                    .iter()
                    .zip(trace.walk.windows(2))
                    .filter(|(step, w)| w[1] - w[0] != step.expected_delta())
                    .count() as u64;
            }
            s.mean_max_walk = walk_sum;
            Ok(s)
        },
    )?;
    let mut total = ExposureSummary::default();
    for p in parts {
        total.runs += p.runs;
        total.closed += p.closed;
        total.contradiction += p.contradiction;
        total.giant += p.giant;
        total.mean_max_walk += p.mean_max_walk;
        total.case_mismatches += p.case_mismatches;
    }
    total.mean_max_walk /= total.runs as f64;
    Ok(total)
}
