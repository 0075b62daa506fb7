//! Closed-form thresholds and small-core quantities.
//!
//! Everything here is a pure function of `(n, m, k, β)`. The 2-SAT threshold
//! has three regimes: linear in `n` for `β < 1/2`, `4n / ln n` at `β = 1/2`,
//! and `n^(2(1-β)) / ((1-β)² ζ(2β))` for `1/2 < β < 1`. For `β > 1 - 1/k` a
//! small unsatisfiable core over the lowest-index variables appears after
//! order `n^((1-β)k)` clauses.

use crate::sampler::{harmonic, rejection_probability, zeta, SamplerError};
use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("beta = {0} is outside [0, 1); the threshold is not defined there")]
    BetaOutOfRange(f64),
    #[error("beta must be finite and nonnegative, got {0}")]
    InvalidBeta(f64),
    #[error("beta = {beta} <= 1 - 1/{k}: the core density grows without bound and has no finite maximizer")]
    NoFiniteMaximum { k: usize, beta: f64 },
    #[error("need {what}")]
    Precondition { what: &'static str },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Which branch of the 2-SAT threshold applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `β < 1/2`: linear threshold.
    BelowHalf,
    /// `β = 1/2`: `4n / ln n`.
    Half,
    /// `1/2 < β < 1`: sublinear threshold `∝ n^(2(1-β))`.
    Sublinear,
    /// `β = 1`.
    One,
    /// `β > 1`.
    AboveOne,
}

impl Regime {
    pub fn classify(beta: f64) -> Self {
        if beta < 0.5 {
            Regime::BelowHalf
        } else if beta == 0.5 {
            Regime::Half
        } else if beta < 1.0 {
            Regime::Sublinear
        } else if beta == 1.0 {
            Regime::One
        } else {
            Regime::AboveOne
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::BelowHalf => "beta<1/2",
            Regime::Half => "beta=1/2",
            Regime::Sublinear => "1/2<beta<1",
            Regime::One => "beta=1",
            Regime::AboveOne => "beta>1",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn check_beta(beta: f64) -> Result<(), TheoryError> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(TheoryError::InvalidBeta(beta))
    }
}

/// Expected clause count at which scale-free random 2-SAT becomes
/// unsatisfiable.
pub fn threshold_2sat(beta: f64, n: u64) -> Result<f64, TheoryError> {
    check_beta(beta)?;
    if n < 2 {
        return Err(TheoryError::Precondition { what: "n >= 2" });
    }
    let nf = n as f64;
    match Regime::classify(beta) {
        Regime::BelowHalf => Ok(nf * threshold_ratio(beta)),
        Regime::Half => Ok(4.0 * nf / nf.ln()),
        Regime::Sublinear => {
            let b = 1.0 - beta;
            Ok(nf.powf(2.0 * b) / (b * b * zeta(2.0 * beta)?))
        }
        Regime::One | Regime::AboveOne => Err(TheoryError::BetaOutOfRange(beta)),
    }
}

// (1-2β)/(1-β)²
fn threshold_ratio(beta: f64) -> f64 {
    (1.0 - 2.0 * beta) / (1.0 - beta).powi(2)
}

/// Ratio below which formulas are known satisfiable:
/// `(δ-1)(δ-3)/(δ-2)²` with `δ = 1/β + 1`, defined for `δ > 3`, i.e.
/// `β < 1/2`. Equal to `(1-2β)/(1-β)²`, which makes the linear threshold
/// tight.
pub fn sat_lower_bound_ratio(beta: f64) -> Option<f64> {
    if !(0.0..0.5).contains(&beta) {
        return None;
    }
    if beta == 0.0 {
        return Some(1.0);
    }
    let d = 1.0 / beta + 1.0;
    Some((d - 1.0) * (d - 3.0) / (d - 2.0).powi(2))
}

/// Probability of one particular clause over variables `1..=k` (any fixed
/// signs), `(k!)^(1-β) / (2 H(n, β))^k`.
pub fn small_core_clause_probability(n: u64, k: usize, beta: f64) -> Result<f64, TheoryError> {
    check_beta(beta)?;
    if k == 0 || k as u64 > n {
        return Err(TheoryError::Precondition {
            what: "1 <= k <= n",
        });
    }
    Ok(factorial(k).powf(1.0 - beta) / (2.0 * harmonic(n, beta)).powi(k as i32))
}

/// Probability that the all-smallest-variables clause appears among
/// `n^((1-β)k)` clauses: `1 - exp(-((1-β)/2)^k (k!)^(1-β))`.
pub fn small_core_emergence_probability(k: usize, beta: f64) -> f64 {
    let rate = ((1.0 - beta) / 2.0).powi(k as i32) * factorial(k).powf(1.0 - beta);
    -(-rate).exp_m1()
}

/// Radius maximizing the expected core density, `(1 - (1-β)k)^(-1/(1-β))`;
/// `e^k` at `β = 1`.
pub fn optimal_core_radius(k: usize, beta: f64) -> Result<f64, TheoryError> {
    check_beta(beta)?;
    if beta <= 1.0 - 1.0 / k as f64 {
        return Err(TheoryError::NoFiniteMaximum { k, beta });
    }
    if beta == 1.0 {
        return Ok((k as f64).exp());
    }
    let b = 1.0 - beta;
    Ok((1.0 - b * k as f64).powf(-1.0 / b))
}

/// `E[|C_r| / r] = (m/r) (H(r, β) / H(n, β))^k`, ignoring clause rejection.
pub fn expected_core_density(
    n: u64,
    m: f64,
    k: usize,
    beta: f64,
    r: u64,
) -> Result<f64, TheoryError> {
    check_core_args(n, k, beta, r)?;
    let q = harmonic(r, beta) / harmonic(n, beta);
    Ok(m / r as f64 * q.powi(k as i32))
}

/// The same density with `H(r, β) / H(n, β)` replaced by
/// `(r^(1-β) - 1) / (n^(1-β) - 1)`. Its maximizer is
/// [`optimal_core_radius`].
pub fn expected_core_density_approx(
    n: u64,
    m: f64,
    k: usize,
    beta: f64,
    r: u64,
) -> Result<f64, TheoryError> {
    check_core_args(n, k, beta, r)?;
    if beta >= 1.0 {
        return Err(TheoryError::BetaOutOfRange(beta));
    }
    let b = 1.0 - beta;
    let q = ((r as f64).powf(b) - 1.0) / ((n as f64).powf(b) - 1.0);
    Ok(m / r as f64 * q.powi(k as i32))
}

/// Core density accounting for rejection: a generated clause lies in `C_r`
/// with probability `q^k (1 - R_k(r)) / (1 - R_k(n))`, where `R_k(r)` is the
/// collision probability of `k` draws from the law restricted to `1..=r`.
pub fn expected_core_density_exact(
    n: u64,
    m: f64,
    k: usize,
    beta: f64,
    r: u64,
) -> Result<f64, TheoryError> {
    check_core_args(n, k, beta, r)?;
    if k as u64 > r {
        return Ok(0.0);
    }
    let q = harmonic(r, beta) / harmonic(n, beta);
    let to_u32 =
        |x: u64| u32::try_from(x).map_err(|_| TheoryError::Precondition { what: "n < 2^32" });
    let inner = rejection_probability(to_u32(r)?, k, beta)?.coincidence_probability;
    let outer = rejection_probability(to_u32(n)?, k, beta)?.coincidence_probability;
    Ok(m / r as f64 * q.powi(k as i32) * (1.0 - inner) / (1.0 - outer))
}

fn check_core_args(n: u64, k: usize, beta: f64, r: u64) -> Result<(), TheoryError> {
    check_beta(beta)?;
    if !(1 <= r && r <= n) || k == 0 {
        return Err(TheoryError::Precondition {
            what: "1 <= r <= n and k >= 1",
        });
    }
    Ok(())
}

/// Natural log of the expected number of satisfying assignments,
/// `ln(2^n (1 - 2^-k)^m)`.
pub fn counting_bound(n: u64, m: u64, k: usize) -> f64 {
    n as f64 * std::f64::consts::LN_2 + m as f64 * (-(0.5f64).powi(k as i32)).ln_1p()
}

/// The sufficient unsatisfiability density `2^k ln 2`.
pub fn counting_bound_ratio(k: usize) -> f64 {
    2f64.powi(k as i32) * std::f64::consts::LN_2
}

/// The density at which [`counting_bound`] crosses zero,
/// `ln 2 / -ln(1 - 2^-k)`; slightly below `2^k ln 2`.
pub fn counting_bound_crossing(k: usize) -> f64 {
    std::f64::consts::LN_2 / -(-(0.5f64).powi(k as i32)).ln_1p()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Every closed-form quantity for one `(n, k, β)`. Fields that do not apply
/// in the regime are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub n: u64,
    pub k: usize,
    pub beta: f64,
    pub regime: Regime,
    /// 2-SAT threshold clause count (`k = 2`, `β < 1`).
    pub m_threshold: Option<f64>,
    /// `m/n` at the threshold (`k = 2`, `β < 1/2`).
    pub ratio_threshold: Option<f64>,
    /// Known-satisfiable density (`k = 2`, `β < 1/2`).
    pub sat_lower_bound_ratio: Option<f64>,
    /// `(1-β)k`.
    pub core_exponent: f64,
    /// `n^((1-β)k)`, the asymptotic small-core clause scale with constant 1.
    pub core_scale: f64,
    /// `β > 1 - 1/k`.
    pub core_regime: bool,
    pub r_star: Option<f64>,
    /// Present for `β < 1`.
    pub emergence_probability: Option<f64>,
    /// `2^k ln 2`.
    pub counting_bound_ratio: f64,
    pub counting_bound_crossing: f64,
}

pub fn build_report(n: u64, k: usize, beta: f64) -> Result<ThresholdReport, TheoryError> {
    check_beta(beta)?;
    if k == 0 {
        return Err(TheoryError::Precondition { what: "k >= 1" });
    }
    let regime = Regime::classify(beta);
    let two_sat = k == 2 && beta < 1.0;
    let core_exponent = (1.0 - beta) * k as f64;
    let core_regime = beta > 1.0 - 1.0 / k as f64;
    Ok(ThresholdReport {
        n,
        k,
        beta,
        regime,
        m_threshold: if two_sat {
            Some(threshold_2sat(beta, n)?)
        } else {
            None
        },
        ratio_threshold: (two_sat && regime == Regime::BelowHalf).then(|| threshold_ratio(beta)),
        sat_lower_bound_ratio: if k == 2 {
            sat_lower_bound_ratio(beta)
        } else {
            None
        },
        core_exponent,
        core_scale: (n as f64).powf(core_exponent),
        core_regime,
        r_star: if core_regime {
            Some(optimal_core_radius(k, beta)?)
        } else {
            None
        },
        emergence_probability: (beta < 1.0).then(|| small_core_emergence_probability(k, beta)),
        counting_bound_ratio: counting_bound_ratio(k),
        counting_bound_crossing: counting_bound_crossing(k),
    })
}

impl ThresholdReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        vec![
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("beta", self.beta.to_string()),
            ("regime", self.regime.to_string()),
            ("m_threshold", opt(self.m_threshold)),
            ("ratio_threshold", opt(self.ratio_threshold)),
            ("sat_lower_bound_ratio", opt(self.sat_lower_bound_ratio)),
            ("core_exponent", self.core_exponent.to_string()),
            ("core_scale", self.core_scale.to_string()),
            ("core_regime", self.core_regime.to_string()),
            ("r_star", opt(self.r_star)),
            ("emergence_probability", opt(self.emergence_probability)),
            (
                "counting_bound_ratio",
                self.counting_bound_ratio.to_string(),
            ),
            (
                "counting_bound_crossing",
                self.counting_bound_crossing.to_string(),
            ),
        ]
    }

    /// One `name  value` line per field; absent fields print `-`.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let fields = self.fields();
        let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in fields {
            let v = if v.is_empty() { "-".to_string() } else { v };
            writeln!(out, "{k:<width$}  {v}")?;
        }
        Ok(())
    }

    /// Header plus one row; absent fields are empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let fields = self.fields();
        let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
        writeln!(out, "{}", header.join(","))?;
        writeln!(out, "{}", row.join(","))
    }
}
