//! The power-law variable distribution `P(i) = i^-β / H(n, β)`.
//!
//! Two sampling modes are available. The exact mode keeps the cumulative
//! distribution in a table and inverts it by binary search. The approximate
//! mode uses a closed-form inverse built from the Euler–Maclaurin expansion of
//! the harmonic number, which needs no memory but is only accurate for large
//! `n` and `0 < β < 1`.

use crate::stats::CompensatedSum;
use thiserror::Error;

/// Largest `n` for which [`harmonic`] sums directly.
pub const DIRECT_SUM_LIMIT: u64 = 10_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("beta = {0} must lie strictly between 0 and 1")]
    BetaOutsideUnitInterval(f64),
    #[error("beta must be finite and nonnegative, got {0}")]
    InvalidBeta(f64),
    #[error("zeta({0}) is undefined here; need s > 0 and s != 1")]
    ZetaDomain(f64),
    #[error("the distribution needs at least one variable")]
    EmptySupport,
    #[error("clause width {k} must lie in 1..={n}")]
    WidthOutOfRange { k: usize, n: u64 },
}

/// `Σ_{i=1}^n i^-β`.
///
/// Summed exactly (with compensation) up to [`DIRECT_SUM_LIMIT`]; above that
/// the Euler–Maclaurin form `ζ(β) + n^(1-β)/(1-β) + n^-β/2` is used, or
/// `γ + ln n` at `β = 1`.
pub fn harmonic(n: u64, beta: f64) -> f64 {
    assert!(n >= 1, "harmonic number needs n >= 1");
    if beta == 0.0 {
        return n as f64;
    }
    if n <= DIRECT_SUM_LIMIT {
        harmonic_direct(n, beta)
    } else {
        harmonic_asymptotic(n, beta)
    }
}

/// Direct compensated summation, smallest terms first.
pub fn harmonic_direct(n: u64, beta: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for i in (1..=n).rev() {
        acc.add((i as f64).powf(-beta));
    }
    acc.value()
}

/// Leading Euler–Maclaurin terms of the harmonic number.
///
/// # Panics
///
/// If `β` is negative, or `ζ(β)` is undefined (only possible at `β = 0`, which
/// returns `n`).
pub fn harmonic_asymptotic(n: u64, beta: f64) -> f64 {
    let nf = n as f64;
    if beta == 0.0 {
        nf
    } else if beta == 1.0 {
        EULER_GAMMA + nf.ln()
    } else {
        let z = zeta(beta).expect("beta > 0 and beta != 1");
        z + nf.powf(1.0 - beta) / (1.0 - beta) + nf.powf(-beta) / 2.0
    }
}

/// Riemann zeta function for real `s > 0`, `s != 1`.
///
/// Uses tail-corrected partial sums
/// `S_N - N^(1-s)/(1-s) - N^-s/2 + s N^(-s-1)/12 - s(s+1)(s+2) N^(-s-3)/720`,
/// doubling `N` until two successive values agree to `1e-10` relative. On
/// `(0, 1)` this is the analytic continuation, so the same code serves both
/// sides of the pole.
pub fn zeta(s: f64) -> Result<f64, SamplerError> {
    if !s.is_finite() || s <= 0.0 || s == 1.0 {
        return Err(SamplerError::ZetaDomain(s));
    }
    let tail = |n: f64, partial: f64| {
        partial - n.powf(1.0 - s) / (1.0 - s) - n.powf(-s) / 2.0 + s * n.powf(-s - 1.0) / 12.0
            - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
    };
    let mut partial = CompensatedSum::default();
    let mut upto: u64 = 0;
    let mut extend = |to: u64, partial: &mut CompensatedSum| {
        for i in (upto + 1..=to).rev() {
            partial.add((i as f64).powf(-s));
        }
        upto = to;
    };
    let mut n: u64 = 64;
    extend(n, &mut partial);
    let mut prev = tail(n as f64, partial.value());
    // 2^24 terms is far beyond what any s in (0, 50] needs.
    while n < 1 << 24 {
        n *= 2;
        // Terms are added largest-last within each block; blocks are disjoint.
        let mut block = CompensatedSum::default();
        extend(n, &mut block);
        partial.add(block.value());
        let next = tail(n as f64, partial.value());
        if (next - prev).abs() < 1e-10 * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// `ζ(β)` for `0 < β < 1`, where it is negative.
pub fn zeta_unit_interval(beta: f64) -> Result<f64, SamplerError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SamplerError::BetaOutsideUnitInterval(beta));
    }
    zeta(beta)
}

/// How [`PowerLawDist::sample`] maps a uniform to a variable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SamplerMode {
    /// Binary search in the exact cumulative table.
    #[default]
    ExactTable,
    /// Closed-form approximate inverse; `0 < β < 1` only.
    ApproximateInverse,
}

impl SamplerMode {
    /// Exact table up to [`DIRECT_SUM_LIMIT`] variables, approximate above.
    pub fn for_size(n: u32) -> Self {
        if u64::from(n) <= DIRECT_SUM_LIMIT {
            SamplerMode::ExactTable
        } else {
            SamplerMode::ApproximateInverse
        }
    }
}

/// The distribution `P(i) ∝ i^-β` over variables `1..=n`.
///
/// Immutable once built; share it freely between threads.
#[derive(Clone, Debug)]
pub struct PowerLawDist {
    n: u32,
    beta: f64,
    normalization: f64,
    mode: SamplerMode,
    cumulative: Option<Vec<f64>>,
    // (1-β)ζ(β) and n^(1-β) + (1-β)ζ(β), present for 0 < β < 1.
    inverse: Option<(f64, f64)>,
}

impl PowerLawDist {
    pub fn new(n: u32, beta: f64, mode: SamplerMode) -> Result<Self, SamplerError> {
        if n == 0 {
            return Err(SamplerError::EmptySupport);
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(SamplerError::InvalidBeta(beta));
        }
        let in_unit = beta > 0.0 && beta < 1.0;
        if mode == SamplerMode::ApproximateInverse && !in_unit {
            return Err(SamplerError::BetaOutsideUnitInterval(beta));
        }
        let inverse = if in_unit {
            let a = (1.0 - beta) * zeta(beta)?;
            Some((a, f64::from(n).powf(1.0 - beta) + a))
        } else {
            None
        };
        let (normalization, cumulative) = match mode {
            SamplerMode::ExactTable => {
                let (h, table) = cumulative_table(n, beta);
                (h, Some(table))
            }
            SamplerMode::ApproximateInverse => (harmonic(u64::from(n), beta), None),
        };
        Ok(PowerLawDist {
            n,
            beta,
            normalization,
            mode,
            cumulative,
            inverse,
        })
    }

    /// Table-backed distribution.
    pub fn exact(n: u32, beta: f64) -> Result<Self, SamplerError> {
        Self::new(n, beta, SamplerMode::ExactTable)
    }

    /// Closed-form inverse, no table.
    pub fn approximate(n: u32, beta: f64) -> Result<Self, SamplerError> {
        Self::new(n, beta, SamplerMode::ApproximateInverse)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `H(n, β)`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    /// `cumulative[i-1] = P(X <= i)`, present in table mode.
    pub fn cumulative(&self) -> Option<&[f64]> {
        self.cumulative.as_deref()
    }

    /// `P(X = i)`.
    pub fn probability(&self, i: u32) -> f64 {
        debug_assert!((1..=self.n).contains(&i));
        f64::from(i).powf(-self.beta) / self.normalization
    }

    /// Maps `u ∈ [0, 1)` to a variable using this distribution's mode.
    #[inline]
    pub fn sample(&self, u: f64) -> u32 {
        match &self.cumulative {
            Some(table) => search(table, u),
            None => self.inverse_unchecked(u),
        }
    }

    /// Smallest `i` with `cumulative[i] > u`; `None` without a table.
    #[inline]
    pub fn sample_table(&self, u: f64) -> Option<u32> {
        self.cumulative.as_deref().map(|t| search(t, u))
    }

    /// The closed-form inverse
    /// `⌊((n^(1-β) + (1-β)ζ(β)) u - (1-β)ζ(β))^(1/(1-β))⌋ + 1`, clamped to
    /// `[1, n]`. Available in either mode when `0 < β < 1`.
    #[inline]
    pub fn sample_approx(&self, u: f64) -> Result<u32, SamplerError> {
        if self.inverse.is_none() {
            return Err(SamplerError::BetaOutsideUnitInterval(self.beta));
        }
        Ok(self.inverse_unchecked(u))
    }

    #[inline]
    fn inverse_unchecked(&self, u: f64) -> u32 {
        let (a, scale) = self.inverse.expect("approximate mode implies 0 < beta < 1");
        let inner = (scale * u - a).max(0.0);
        let x = inner.powf(1.0 / (1.0 - self.beta)).floor() + 1.0;
        // Clamp: for u near 1 and finite n the inverse can step past n.
        x.min(f64::from(self.n)).max(1.0) as u32
    }
}

#[inline]
fn search(table: &[f64], u: f64) -> u32 {
    let i = table.partition_point(|&c| c <= u);
    // u < 1 always lands inside; the min guards u = 1 from sloppy callers.
    (i + 1).min(table.len()) as u32
}

fn cumulative_table(n: u32, beta: f64) -> (f64, Vec<f64>) {
    let h = harmonic(u64::from(n), beta);
    let mut acc = CompensatedSum::default();
    let mut table: Vec<f64> = (1..=n)
        .map(|i| {
            acc.add(f64::from(i).powf(-beta));
            acc.value() / h
        })
        .collect();
    // Pin the last entry so every u in [0, 1) lands in the support.
    *table.last_mut().expect("n >= 1") = 1.0;
    (h, table)
}

/// Probability that a clause of `k` independent draws repeats a variable.
#[derive(Clone, Debug, PartialEq)]
pub struct RejectionEstimate {
    pub k: usize,
    /// `R_k = 1 - r_k`.
    pub coincidence_probability: f64,
    /// `P_j = Σ_i p_i^j` for `j = 1..=k`.
    pub power_sums: Vec<f64>,
}

/// Solves the surname (generalized birthday) recurrence
/// `r_k = Σ_{j=1}^k (-1)^(j-1) (k-1)!/(k-j)! P_j r_{k-j}`, `r_0 = 1`,
/// for the probability `r_k` that `k` draws are pairwise distinct.
pub fn rejection_probability(
    n: u32,
    k: usize,
    beta: f64,
) -> Result<RejectionEstimate, SamplerError> {
    if k == 0 || k as u64 > u64::from(n) {
        return Err(SamplerError::WidthOutOfRange { k, n: u64::from(n) });
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(SamplerError::InvalidBeta(beta));
    }
    let h = harmonic(u64::from(n), beta);
    let mut sums = vec![CompensatedSum::default(); k];
    for i in (1..=n).rev() {
        let p = f64::from(i).powf(-beta) / h;
        let mut pj = p;
        for s in sums.iter_mut() {
            s.add(pj);
            pj *= p;
        }
    }
    let mut power_sums: Vec<f64> = sums.iter().map(CompensatedSum::value).collect();
    power_sums[0] = 1.0;

    let mut r = vec![1.0f64; k + 1];
    for kk in 1..=k {
        let mut acc = 0.0;
        // (kk-1)!/(kk-j)! built up as a running falling factorial.
        let mut falling = 1.0;
        for j in 1..=kk {
            if j > 1 {
                falling *= (kk - j + 1) as f64;
            }
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * falling * power_sums[j - 1] * r[kk - j];
        }
        r[kk] = acc;
    }
    Ok(RejectionEstimate {
        k,
        coincidence_probability: (1.0 - r[k]).clamp(0.0, 1.0),
        power_sums,
    })
}
