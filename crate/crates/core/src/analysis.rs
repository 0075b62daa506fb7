//! Occurrence statistics, percolation criteria and exponent fits.
//!
//! `k_l` is the number of occurrences of literal `l` and `K_x = k_x + k_¬x`
//! the number of occurrences of variable `x`. Sums are kept in exact integer
//! arithmetic so identities such as `Σ K(K-3) = n(E[K²] - 3E[K])` hold to the
//! last bit before conversion.

use crate::formula::{Clause, Formula};
use crate::par::{self, Parallelism};
use crate::sampler::PowerLawDist;
use crate::stats::{line_fit, weighted_line_fit};
use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};
use thiserror::Error;

/// Ratio between consecutive histogram bin edges in tail fits.
pub const TAIL_BIN_RATIO: f64 = 1.3;

/// Resampled profile points per decade of rank in [`fit_beta`].
const PROFILE_POINTS_PER_DECADE: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("the formula has no literal occurrences")]
    Empty,
    #[error("only {found} usable points in the fit range, need {needed}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("x_min = {0} must lie strictly between 0 and 1")]
    BadFitRange(f64),
}

/// Exact occurrence counts of one formula (or a pooled corpus).
#[derive(Clone, Debug, PartialEq)]
pub struct OccurrenceStats {
    n: u32,
    num_clauses: u64,
    literal_counts: Vec<u64>,
    variable_counts: Vec<u64>,
    sum_k: u64,
    sum_k2: u128,
    degree_histogram: BTreeMap<u64, u64>,
    distinct_clause_count: u64,
}

impl OccurrenceStats {
    /// Builds stats from per-literal counts indexed by `Literal::index`.
    pub fn from_literal_counts(
        literal_counts: Vec<u64>,
        num_clauses: u64,
        distinct_clause_count: u64,
    ) -> Self {
        assert!(
            literal_counts.len().is_multiple_of(2),
            "literal counts come in pairs"
        );
        let variable_counts: Vec<u64> = literal_counts
            .chunks_exact(2)
            .map(|p| p[0] + p[1])
            .collect();
        let mut degree_histogram = BTreeMap::new();
        let (mut sum_k, mut sum_k2) = (0u64, 0u128);
        for &k in &variable_counts {
            *degree_histogram.entry(k).or_insert(0) += 1;
            sum_k += k;
            sum_k2 += u128::from(k) * u128::from(k);
        }
        OccurrenceStats {
            n: variable_counts.len() as u32,
            num_clauses,
            literal_counts,
            variable_counts,
            sum_k,
            sum_k2,
            degree_histogram,
            distinct_clause_count,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn num_clauses(&self) -> u64 {
        self.num_clauses
    }

    /// `k_l`, indexed by `Literal::index`.
    pub fn literal_counts(&self) -> &[u64] {
        &self.literal_counts
    }

    /// `K_x` at position `x - 1`.
    pub fn variable_counts(&self) -> &[u64] {
        &self.variable_counts
    }

    /// `Σ K_x = |F|`.
    pub fn total_occurrences(&self) -> u64 {
        self.sum_k
    }

    /// `Σ K_x²`.
    pub fn sum_squares(&self) -> u128 {
        self.sum_k2
    }

    /// `E[K]` over variables `1..=n`.
    pub fn mean_k(&self) -> f64 {
        self.sum_k as f64 / f64::from(self.n)
    }

    /// `E[K²]` over variables `1..=n`.
    pub fn mean_k2(&self) -> f64 {
        self.sum_k2 as f64 / f64::from(self.n)
    }

    /// Number of variables with each occurrence count.
    pub fn degree_histogram(&self) -> &BTreeMap<u64, u64> {
        &self.degree_histogram
    }

    /// Clauses counted once per canonical form.
    pub fn distinct_clause_count(&self) -> u64 {
        self.distinct_clause_count
    }

    /// `E[K²] / E[K]`.
    pub fn moment_ratio(&self) -> Result<f64, AnalysisError> {
        if self.sum_k == 0 {
            return Err(AnalysisError::Empty);
        }
        Ok(self.sum_k2 as f64 / self.sum_k as f64)
    }

    /// `Σ_l k_l (k_¬l - 1)` over all `2n` literals.
    pub fn criterion_literals(&self) -> f64 {
        let s: i128 = self
            .literal_counts
            .chunks_exact(2)
            .map(|p| {
                let (a, b) = (i128::from(p[0]), i128::from(p[1]));
                a * (b - 1) + b * (a - 1)
            })
            .sum();
        s as f64
    }

    /// `Σ_x K_x (K_x - 3)`.
    pub fn criterion_variables(&self) -> f64 {
        self.criterion_variables_exact() as f64
    }

    /// [`criterion_variables`](Self::criterion_variables) without rounding.
    pub fn criterion_variables_exact(&self) -> i128 {
        self.sum_k2 as i128 - 3 * i128::from(self.sum_k)
    }
}

/// Counts occurrences in `formula`, in parallel when enabled.
pub fn occurrence_counts(formula: &Formula) -> OccurrenceStats {
    occurrence_counts_with(formula, Parallelism::default())
}

pub fn occurrence_counts_with(formula: &Formula, par: Parallelism) -> OccurrenceStats {
    let slots = 2 * formula.num_vars() as usize;
    let literal_counts = par::fold_chunks(
        par,
        formula.clauses(),
        1 << 15,
        || vec![0u64; slots],
        |acc, c| {
            for l in c.literals() {
                acc[l.index()] += 1;
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let distinct: HashSet<Clause> = formula.clauses().iter().map(Clause::canonical).collect();
    OccurrenceStats::from_literal_counts(
        literal_counts,
        formula.num_clauses() as u64,
        distinct.len() as u64,
    )
}

/// Concatenates several formulas' counts into one corpus over `Σ n`
/// variables.
pub fn pool(stats: &[OccurrenceStats]) -> OccurrenceStats {
    let literal_counts = stats
        .iter()
        .flat_map(|s| s.literal_counts.iter().copied())
        .collect();
    OccurrenceStats::from_literal_counts(
        literal_counts,
        stats.iter().map(|s| s.num_clauses).sum(),
        stats.iter().map(|s| s.distinct_clause_count).sum(),
    )
}

/// `Σ_l k_l (k_¬l - 1)` with expected literal counts `k_l = k m p_x / 2`.
pub fn expected_criterion_literals(dist: &PowerLawDist, m: u64, k: usize) -> f64 {
    (1..=dist.n())
        .map(|i| {
            let kl = k as f64 * m as f64 * dist.probability(i) / 2.0;
            2.0 * kl * (kl - 1.0)
        })
        .sum()
}

/// `Σ_x K_x (K_x - 3)` with expected variable counts `K_x = k m p_x`.
pub fn expected_criterion_variables(dist: &PowerLawDist, m: u64, k: usize) -> f64 {
    (1..=dist.n())
        .map(|i| {
            let kx = k as f64 * m as f64 * dist.probability(i);
            kx * (kx - 3.0)
        })
        .sum()
}

/// The sorted, renormalized occurrence profile `φ(j/n) = (n / ΣK) K_(j)`,
/// with `K_(1) >= K_(2) >= ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedProfile {
    pub points: Vec<(f64, f64)>,
}

impl NormalizedProfile {
    /// Integral of the step function `φ` over `(0, 1]`; one by construction.
    pub fn integral(&self) -> f64 {
        let n = self.points.len() as f64;
        self.points.iter().map(|p| p.1).sum::<f64>() / n
    }

    /// The profile of an exact power law, `K_j ∝ j^-β`.
    pub fn synthetic(n: u32, beta: f64) -> Self {
        let counts: Vec<f64> = (1..=n).map(|j| f64::from(j).powf(-beta)).collect();
        let total: f64 = counts.iter().sum();
        let nf = f64::from(n);
        NormalizedProfile {
            points: counts
                .iter()
                .enumerate()
                .map(|(j, &c)| ((j + 1) as f64 / nf, nf * c / total))
                .collect(),
        }
    }
}

pub fn empirical_profile(stats: &OccurrenceStats) -> Result<NormalizedProfile, AnalysisError> {
    if stats.sum_k == 0 {
        return Err(AnalysisError::Empty);
    }
    let mut sorted = stats.variable_counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let n = f64::from(stats.n);
    let scale = n / stats.sum_k as f64;
    Ok(NormalizedProfile {
        points: sorted
            .iter()
            .enumerate()
            .map(|(j, &k)| ((j + 1) as f64 / n, scale * k as f64))
            .collect(),
    })
}

/// Which exponent a fit measured directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitTarget {
    /// Profile slope: `φ(x) ∝ x^-β`.
    Beta,
    /// Histogram tail: `P(K) ∝ K^-δ`.
    Delta,
}

/// A log-log least-squares exponent fit.
///
/// One exponent is measured; the other is converted through `δ = 1/β + 1`
/// so the two fits of one formula can be compared.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub target: FitTarget,
    pub beta_hat: f64,
    pub delta_hat: f64,
    /// `(x_min, 1)` for profile fits, `(K_min, K_max)` for tail fits.
    pub fit_range: (f64, f64),
    /// Root-mean-square residual of the log-log line.
    pub residual: f64,
    pub points: usize,
}

/// `δ = 1/β + 1`.
pub fn delta_from_beta(beta: f64) -> f64 {
    1.0 / beta + 1.0
}

/// `β = 1/(δ - 1)`.
pub fn beta_from_delta(delta: f64) -> f64 {
    1.0 / (delta - 1.0)
}

/// Default lower end of the profile fit: drops the ten heaviest variables.
pub fn default_x_min(n: u32) -> f64 {
    (10.0 / f64::from(n)).min(0.5)
}

/// Fits `ln φ = c - β ln x` over `x >= x_min`.
///
/// The profile is read at log-spaced ranks (about twenty per decade) rather
/// than at every rank, so the many tail points do not outweigh the head.
pub fn fit_beta(profile: &NormalizedProfile, x_min: f64) -> Result<FitResult, AnalysisError> {
    if !(x_min > 0.0 && x_min < 1.0) {
        return Err(AnalysisError::BadFitRange(x_min));
    }
    let n = profile.points.len();
    if n == 0 {
        return Err(AnalysisError::Empty);
    }
    let first = ((x_min * n as f64).ceil() as usize).clamp(1, n);
    let decades = (n as f64 / first as f64).log10();
    let steps = (decades * PROFILE_POINTS_PER_DECADE).ceil().max(1.0) as usize;
    let mut ranks: Vec<usize> = (0..=steps)
        .map(|t| {
            (first as f64 * (n as f64 / first as f64).powf(t as f64 / steps as f64)).round()
                as usize
        })
        .map(|r| r.clamp(first, n))
        .collect();
    ranks.dedup();
    let pts: Vec<(f64, f64)> = ranks
        .iter()
        .map(|&r| profile.points[r - 1])
        .filter(|&(_, phi)| phi > 0.0)
        .map(|(x, phi)| (x.ln(), phi.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(AnalysisError::TooFewPoints {
            found: pts.len(),
            needed: 10,
        });
    }
    let fit = line_fit(&pts).ok_or(AnalysisError::TooFewPoints {
        found: 1,
        needed: 10,
    })?;
    let beta_hat = -fit.slope;
    Ok(FitResult {
        target: FitTarget::Beta,
        beta_hat,
        delta_hat: delta_from_beta(beta_hat),
        fit_range: (x_min, 1.0),
        residual: fit.rms,
        points: pts.len(),
    })
}

/// One logarithmic histogram bin over the integers `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBin {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
}

impl TailBin {
    /// Variables per unit of `K` inside the bin.
    pub fn density(&self) -> f64 {
        self.count as f64 / (self.hi - self.lo + 1) as f64
    }

    /// Geometric center of the covered integers.
    pub fn center(&self) -> f64 {
        (self.lo as f64 * self.hi as f64).sqrt()
    }
}

/// Bins `K >= k_min` with edges `k_min · 1.3^j`. Bins that cover no integer
/// are skipped; empty bins are kept with count zero.
pub fn tail_bins(stats: &OccurrenceStats, k_min: u64) -> Vec<TailBin> {
    let k_min = k_min.max(1);
    let Some(&k_max) = stats.degree_histogram.keys().next_back() else {
        return Vec::new();
    };
    let mut bins = Vec::new();
    let mut edge = k_min as f64;
    while edge <= k_max as f64 {
        let next = edge * TAIL_BIN_RATIO;
        let (lo, hi) = (edge.ceil() as u64, next.ceil() as u64 - 1);
        edge = next;
        if lo > hi {
            continue;
        }
        let count = stats.degree_histogram.range(lo..=hi).map(|(_, c)| c).sum();
        bins.push(TailBin { lo, hi, count });
    }
    bins
}

/// Fits `ln P(K) = c - δ ln K` on the log-binned histogram tail `K >= k_min`.
///
/// Bins are weighted by their counts, so sparse far-tail bins, each holding
/// a handful of variables, do not dominate.
pub fn fit_delta_tail(stats: &OccurrenceStats, k_min: u64) -> Result<FitResult, AnalysisError> {
    let bins: Vec<TailBin> = tail_bins(stats, k_min)
        .into_iter()
        .filter(|b| b.count > 0)
        .collect();
    if bins.len() < 5 {
        return Err(AnalysisError::TooFewPoints {
            found: bins.len(),
            needed: 5,
        });
    }
    let pts: Vec<(f64, f64, f64)> = bins
        .iter()
        .map(|b| (b.center().ln(), b.density().ln(), b.count as f64))
        .collect();
    let fit = weighted_line_fit(&pts).ok_or(AnalysisError::TooFewPoints {
        found: 1,
        needed: 5,
    })?;
    let delta_hat = -fit.slope;
    Ok(FitResult {
        target: FitTarget::Delta,
        beta_hat: beta_from_delta(delta_hat),
        delta_hat,
        fit_range: (bins[0].lo as f64, bins[bins.len() - 1].hi as f64),
        residual: fit.rms,
        points: bins.len(),
    })
}

/// Lower bound on `K` above which the occurrence law is a clean power law:
/// `max(√(n ln n), (n² ln n)^(β/(2+β)))`.
pub fn power_law_onset(n: u32, beta: f64) -> f64 {
    let n = f64::from(n);
    let a = (n * n.ln()).sqrt();
    let b = (n * n * n.ln()).powf(beta / (2.0 + beta));
    a.max(b)
}

/// Default `K_min` for [`fit_delta_tail`]: the power-law onset, capped at the
/// count of the `⌈n/100⌉`-th most frequent variable so that the top percent
/// of variables is always in the fit.
pub fn default_tail_cutoff(stats: &OccurrenceStats, beta: f64) -> u64 {
    let mut sorted = stats.variable_counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let top = (stats.n as usize).div_ceil(100).max(1);
    let cap = sorted.get(top - 1).copied().unwrap_or(1);
    (power_law_onset(stats.n, beta).ceil() as u64)
        .min(cap)
        .max(1)
}

/// Writes `K,count` rows for every occurring count.
pub fn write_histogram_csv<W: Write>(stats: &OccurrenceStats, mut out: W) -> io::Result<()> {
    writeln!(out, "K,count")?;
    for (k, c) in &stats.degree_histogram {
        writeln!(out, "{k},{c}")?;
    }
    Ok(())
}

/// Writes `x,phi` rows.
pub fn write_profile_csv<W: Write>(profile: &NormalizedProfile, mut out: W) -> io::Result<()> {
    writeln!(out, "x,phi")?;
    for (x, phi) in &profile.points {
        writeln!(out, "{x},{phi}")?;
    }
    Ok(())
}

/// One row of the criteria table. `k` and `beta` are unknown for external
/// files with mixed widths or no generator metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaRow {
    pub n: u32,
    pub m: u64,
    pub k: Option<usize>,
    pub beta: Option<f64>,
    pub mean_k: f64,
    pub mean_k2: f64,
    pub ratio: f64,
    pub q_lit: f64,
    pub q_var: f64,
}

impl CriteriaRow {
    pub const HEADER: &'static str = "n,m,k,beta,E_K,E_K2,ratio,Q_lit,Q_var";

    pub fn new(stats: &OccurrenceStats, k: Option<usize>, beta: Option<f64>) -> Self {
        CriteriaRow {
            n: stats.n,
            m: stats.num_clauses,
            k,
            beta,
            mean_k: stats.mean_k(),
            mean_k2: stats.mean_k2(),
            ratio: stats.moment_ratio().unwrap_or(f64::NAN),
            q_lit: stats.criterion_literals(),
            q_var: stats.criterion_variables(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let k = self.k.map(|k| k.to_string()).unwrap_or_default();
        let beta = self.beta.map(|b| b.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            self.n, self.m, k, beta, self.mean_k, self.mean_k2, self.ratio, self.q_lit, self.q_var
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Literal;

    fn formula(n: u32, clauses: &[&[i32]]) -> Formula {
        Formula::with_clauses(n, clauses.iter().map(|c| Clause::from_dimacs(c)).collect()).unwrap()
    }

    fn complete_2cnf(n: u32) -> Formula {
        let mut f = Formula::new(n);
        for a in 1..=n {
            for b in a + 1..=n {
                for (sa, sb) in [(true, true), (true, false), (false, true), (false, false)] {
                    f.push(Clause::new([Literal::new(a, sa), Literal::new(b, sb)]));
                }
            }
        }
        f
    }

    #[test]
    fn hand_counts() {
        let s = occurrence_counts(&formula(2, &[&[1, 2], &[-1, 2]]));
        assert_eq!(s.literal_counts(), &[1, 1, 2, 0]);
        assert_eq!(s.variable_counts(), &[2, 2]);
        assert_eq!(s.mean_k(), 2.0);
        assert_eq!(s.distinct_clause_count(), 2);
    }

    #[test]
    fn complete_two_cnf_over_three_variables() {
        let f = complete_2cnf(3);
        assert_eq!(f.num_clauses(), 12);
        let s = occurrence_counts(&f);
        assert!(s.literal_counts().iter().all(|&c| c == 4));
        assert!(s.variable_counts().iter().all(|&c| c == 8));
        assert_eq!(s.moment_ratio().unwrap(), 8.0);
    }

    #[test]
    fn duplicates_count_once_as_distinct() {
        let s = occurrence_counts(&formula(3, &[&[1, -2], &[-2, 1], &[1, -2], &[2, 3]]));
        assert_eq!(s.distinct_clause_count(), 2);
        assert_eq!(s.num_clauses(), 4);
    }

    #[test]
    fn criteria_on_regular_counts() {
        let one = OccurrenceStats::from_literal_counts(vec![1; 10], 5, 5);
        assert_eq!(one.criterion_literals(), 0.0);
        let two = OccurrenceStats::from_literal_counts(vec![2; 10], 10, 10);
        assert_eq!(two.criterion_literals(), 4.0 * 5.0);
        let threes = OccurrenceStats::from_literal_counts([2, 1].repeat(7), 7, 7);
        assert_eq!(threes.criterion_variables(), 0.0);
        let fours = OccurrenceStats::from_literal_counts([1, 3].repeat(7), 7, 7);
        assert_eq!(fours.criterion_variables(), 28.0);
        assert_eq!(fours.moment_ratio().unwrap(), 4.0);
    }

    #[test]
    fn empty_formula_has_no_ratio() {
        let s = occurrence_counts(&Formula::new(4));
        assert_eq!(s.moment_ratio(), Err(AnalysisError::Empty));
        assert_eq!(empirical_profile(&s), Err(AnalysisError::Empty));
    }

    #[test]
    fn flat_profile() {
        let s = OccurrenceStats::from_literal_counts([3, 2].repeat(50), 0, 0);
        let p = empirical_profile(&s).unwrap();
        assert!(p.points.iter().all(|&(_, phi)| (phi - 1.0).abs() < 1e-15));
        assert!((p.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_profile_fits_exactly() {
        for beta in [0.3, 0.5, 0.82] {
            let p = NormalizedProfile::synthetic(100_000, beta);
            let fit = fit_beta(&p, default_x_min(100_000)).unwrap();
            assert!((fit.beta_hat - beta).abs() < 0.01, "beta {beta}: {fit:?}");
        }
    }

    #[test]
    fn fit_errors() {
        let p = NormalizedProfile::synthetic(50, 0.5);
        assert!(matches!(
            fit_beta(&p, 0.9),
            Err(AnalysisError::TooFewPoints { .. })
        ));
        assert_eq!(fit_beta(&p, 0.0), Err(AnalysisError::BadFitRange(0.0)));
        let s = OccurrenceStats::from_literal_counts(vec![1; 20], 10, 10);
        assert!(matches!(
            fit_delta_tail(&s, 1),
            Err(AnalysisError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn bins_cover_integers_once() {
        let counts: Vec<u64> = (1..=400).flat_map(|k| [k, 0]).collect();
        let s = OccurrenceStats::from_literal_counts(counts, 0, 0);
        let bins = tail_bins(&s, 1);
        assert_eq!(bins[0].lo, 1);
        for w in bins.windows(2) {
            assert_eq!(w[0].hi + 1, w[1].lo);
        }
        assert_eq!(bins.iter().map(|b| b.count).sum::<u64>(), 400);
    }

    #[test]
    fn exponent_relation_round_trips() {
        for beta in [0.1, 0.5, 0.82, 0.99] {
            assert!((beta_from_delta(delta_from_beta(beta)) - beta).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_shapes() {
        let s = occurrence_counts(&formula(2, &[&[1, 2], &[-1, 2]]));
        let mut out = Vec::new();
        write_histogram_csv(&s, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "K,count\n2,2\n");
        let mut out = Vec::new();
        CriteriaRow::new(&s, Some(2), None)
            .write_csv(&mut out)
            .unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "2,2,2,,2,4,2,-2,-4\n");
    }
}
