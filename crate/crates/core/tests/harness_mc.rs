//! Sweep, crossing and exposure examples at moderate scale.

use sfsat::harness::{
    exposure_statistics, find_crossing, fit_scaling_exponent, ms_from_ratios, run_sweep,
    CrossingSpec, ExposureSpec, ExposureSummary, SolverChoice, SweepSpec,
};
use sfsat::solver::{ExposureOutcome, DEFAULT_GIANT_FRACTION};
use sfsat::theory::threshold_2sat;
use sfsat::Parallelism;

fn sweep(n: u32, beta: f64, ratios: &[f64], trials: u64, seed: u64) -> SweepSpec {
    SweepSpec {
        n,
        k: 2,
        beta_grid: vec![beta],
        m_grid: ms_from_ratios(n, ratios),
        trials,
        solver: SolverChoice::TwoSat,
        base_seed: seed,
        parallelism: Parallelism::Parallel,
    }
}

fn crossing(n: u32, k: usize, beta: f64, trials: u64, solver: SolverChoice) -> CrossingSpec {
    CrossingSpec {
        n,
        k,
        beta,
        trials_per_probe: trials,
        solver,
        base_seed: 2024,
        parallelism: Parallelism::Parallel,
    }
}

#[test]
fn uniform_sweep_is_sharp_at_large_n() {
    let r = run_sweep(&sweep(100_000, 0.0, &[0.5, 1.5], 10, 1)).unwrap();
    assert_eq!(r.rows[0].sat_fraction(), 1.0);
    assert_eq!(r.rows[1].sat_fraction(), 0.0);
}

#[test]
fn single_trial_rows_repeat() {
    let spec = sweep(5000, 0.4, &[0.7], 1, 9);
    assert_eq!(run_sweep(&spec).unwrap(), run_sweep(&spec).unwrap());
}

#[test]
fn scale_free_sweep_crosses_near_threshold() {
    let ratios: Vec<f64> = (0..=10).map(|i| 0.6 + 0.05 * f64::from(i)).collect();
    let r = run_sweep(&sweep(100_000, 0.3, &ratios, 10, 2)).unwrap();
    let c = r.crossing(0.3).unwrap() / 100_000.0;
    assert!((c - 0.8163).abs() <= 0.08, "crossing at m/n = {c}");
}

#[test]
fn uniform_crossing_is_near_one() {
    let c = find_crossing(&crossing(10_000, 2, 0.0, 20, SolverChoice::TwoSat)).unwrap();
    let ratio = c.m_50 as f64 / 1e4;
    assert!((0.9..=1.1).contains(&ratio), "{c:?}");
    assert!(c.valid);
    // Observed bracket: below one half at lo, at least one half at hi.
    let at = |m: u64| c.probes.iter().find(|p| p.m == m).unwrap().unsat_fraction();
    assert!(at(c.lo) < 0.5 && at(c.hi) >= 0.5);
    assert!(c.confidence_halfwidth as f64 <= 0.05 * c.m_50 as f64);
}

#[test]
fn sublinear_crossing_within_factor_two() {
    let n = 1u32 << 12;
    let c = find_crossing(&crossing(n, 2, 0.7, 50, SolverChoice::TwoSat)).unwrap();
    let t = threshold_2sat(0.7, u64::from(n)).unwrap();
    let ratio = c.m_50 as f64 / t;
    assert!((0.5..=2.0).contains(&ratio), "m_50 {} vs {t}", c.m_50);
    let bigger = find_crossing(&crossing(n << 1, 2, 0.7, 50, SolverChoice::TwoSat)).unwrap();
    assert!(c.m_50 < bigger.m_50, "{} !< {}", c.m_50, bigger.m_50);
}

#[test]
fn uniform_scaling_is_linear() {
    let results: Vec<_> = [2000u32, 4000, 8000, 16_000]
        .iter()
        .map(|&n| find_crossing(&crossing(n, 2, 0.0, 40, SolverChoice::TwoSat)).unwrap())
        .collect();
    let fit = fit_scaling_exponent(&results).unwrap();
    assert!((fit.slope - 1.0).abs() <= 0.05, "slope {}", fit.slope);
}

#[test]
fn dpll_crossing_reports_undecided_fraction() {
    let c = find_crossing(&crossing(
        60,
        3,
        0.0,
        20,
        SolverChoice::Dpll { budget: 1_000_000 },
    ))
    .unwrap();
    assert!(c.valid && c.undecided_fraction() == 0.0);
    let m = c.m_50 as f64 / 60.0;
    assert!((3.0..=6.5).contains(&m), "3-SAT crossing density {m}");
    let starved = find_crossing(&crossing(60, 3, 0.0, 20, SolverChoice::Dpll { budget: 1 }));
    assert!(starved.is_err() || !starved.unwrap().valid);
}

fn exposure(m: u64) -> ExposureSpec {
    ExposureSpec {
        n: 10_000,
        beta: 0.3,
        m,
        trials: 20,
        starts_per_formula: 50,
        giant_fraction: DEFAULT_GIANT_FRACTION,
        base_seed: 5,
        parallelism: Parallelism::Parallel,
    }
}

/// Branching-process limit of the escape probability from a uniformly chosen
/// start literal. A literal of variable `i` has Poisson(`m p_i`) out-edges,
/// each leading to a variable drawn with probability `p_j`; `S` is the
/// `p`-weighted survival probability, the positive root of
/// `S = Σ p_j (1 - exp(-m p_j S))`.
fn escape_probability(n: u32, beta: f64, m: f64) -> f64 {
    let w: Vec<f64> = (1..=n).map(|i| f64::from(i).powf(-beta)).collect();
    let total: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / total).collect();
    let g = |s: f64| {
        p.iter()
            .map(|&q| q * (1.0 - (-m * q * s).exp()))
            .sum::<f64>()
            - s
    };
    let (mut lo, mut hi) = (1e-6, 1.0);
    if g(lo) <= 0.0 {
        return 0.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p.iter().map(|&q| 1.0 - (-m * q * lo).exp()).sum::<f64>() / f64::from(n)
}

fn escaped(s: &ExposureSummary) -> f64 {
    s.fraction(ExposureOutcome::Giant) + s.fraction(ExposureOutcome::Contradiction)
}

#[test]
fn exposure_regimes() {
    let t = threshold_2sat(0.3, 10_000).unwrap();
    let sub = exposure_statistics(&exposure((0.5 * t) as u64)).unwrap();
    let sup = exposure_statistics(&exposure((1.5 * t) as u64)).unwrap();
    assert!(escaped(&sub) < 0.1, "{sub:?}");
    let predicted = escape_probability(10_000, 0.3, 1.5 * t);
    assert!(
        (escaped(&sup) - predicted).abs() < 0.06,
        "{sup:?} vs branching limit {predicted}"
    );
    assert_eq!(sub.case_mismatches + sup.case_mismatches, 0);
    assert!(sup.mean_max_walk > sub.mean_max_walk);
}

/// The majority-escape claim at 1.5x threshold. The branching limit for
/// uniform starts there is about 0.41, so this does not hold at this density.
#[test]
#[ignore = "escape fraction at 1.5x threshold is about 0.41, below the claimed 0.5"]
fn exposure_supercritical_majority_escapes() {
    let t = threshold_2sat(0.3, 10_000).unwrap();
    let sup = exposure_statistics(&exposure((1.5 * t) as u64)).unwrap();
    assert!(escaped(&sup) > 0.5, "{sup:?}");
}
