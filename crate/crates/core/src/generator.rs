//! Scale-free random k-SAT formulas.
//!
//! Each clause draws `k` variables independently from the power-law
//! distribution and gives each a fair random sign. If two draws hit the same
//! variable the whole clause is thrown away and drawn again; redrawing only the
//! colliding variable would bias the law towards small indices.
//!
//! Clause `j` reads randomness only from stream `j` of the seed, so output is
//! identical however the clauses are spread over threads.

use crate::formula::{Clause, Formula, Literal};
use crate::par::{self, Parallelism};
use crate::rng;
use crate::sampler::{PowerLawDist, SamplerError, SamplerMode};
use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

/// Consecutive rejections after which a clause draw gives up.
pub const REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("clause width k = {k} must lie in 1..={n}")]
    WidthOutOfRange { k: usize, n: u32 },
    #[error("need at least one clause")]
    NoClauses,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(
        "{REJECTION_CAP} consecutive clauses repeated a variable; (n, k, beta) is pathological"
    )]
    RejectionCap,
}

/// Everything that determines a generated formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub n: u32,
    pub m: u64,
    pub k: usize,
    pub beta: f64,
    pub seed: u64,
    pub sampler_mode: SamplerMode,
}

impl GeneratorParams {
    /// Exact-table sampling for `n` up to ten million, approximate above.
    pub fn new(n: u32, m: u64, k: usize, beta: f64, seed: u64) -> Self {
        GeneratorParams {
            n,
            m,
            k,
            beta,
            seed,
            sampler_mode: SamplerMode::for_size(n),
        }
    }

    pub fn with_sampler_mode(mut self, mode: SamplerMode) -> Self {
        self.sampler_mode = mode;
        self
    }

    /// Clause density `C = m / n`.
    pub fn density(&self) -> f64 {
        self.m as f64 / f64::from(self.n)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.k == 0 || self.k as u64 > u64::from(self.n) {
            return Err(GeneratorError::WidthOutOfRange {
                k: self.k,
                n: self.n,
            });
        }
        if self.m == 0 {
            return Err(GeneratorError::NoClauses);
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(SamplerError::InvalidBeta(self.beta).into());
        }
        Ok(())
    }

    /// The variable distribution these parameters sample from.
    pub fn distribution(&self) -> Result<PowerLawDist, GeneratorError> {
        Ok(PowerLawDist::new(self.n, self.beta, self.sampler_mode)?)
    }
}

/// Draws one clause, retrying until its `k` variables are distinct.
pub fn generate_clause<R: Rng + ?Sized>(
    dist: &PowerLawDist,
    k: usize,
    rng: &mut R,
) -> Result<Clause, GeneratorError> {
    generate_clause_counted(dist, k, rng).map(|(c, _)| c)
}

/// Like [`generate_clause`], also returning the number of rejected attempts.
pub fn generate_clause_counted<R: Rng + ?Sized>(
    dist: &PowerLawDist,
    k: usize,
    rng: &mut R,
) -> Result<(Clause, u64), GeneratorError> {
    if k == 0 || k as u64 > u64::from(dist.n()) {
        return Err(GeneratorError::WidthOutOfRange { k, n: dist.n() });
    }
    let mut lits: SmallVec<[Literal; 4]> = SmallVec::with_capacity(k);
    for rejected in 0..REJECTION_CAP {
        lits.clear();
        let mut collided = false;
        // All k draws are made even after a collision, so the number of
        // uniforms per attempt is fixed.
        for _ in 0..k {
            let var = dist.sample(rng.random::<f64>());
            let positive = rng.random::<bool>();
            collided |= lits.iter().any(|l| l.var() == var);
            lits.push(Literal::new(var, positive));
        }
        if !collided {
            return Ok((Clause::new(lits), rejected));
        }
    }
    Err(GeneratorError::RejectionCap)
}

/// Generates the formula described by `params`, in parallel when enabled.
pub fn generate_formula(params: &GeneratorParams) -> Result<Formula, GeneratorError> {
    generate_formula_with(params, Parallelism::default())
}

pub fn generate_formula_with(
    params: &GeneratorParams,
    par: Parallelism,
) -> Result<Formula, GeneratorError> {
    params.validate()?;
    warn_outside_regime(params);
    let dist = params.distribution()?;
    generate_formula_from(&dist, params.m, params.k, params.seed, par)
}

/// Generates `m` clauses from a prebuilt distribution. Sweeps use this to
/// share one table across many formulas.
pub fn generate_formula_from(
    dist: &PowerLawDist,
    m: u64,
    k: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Formula, GeneratorError> {
    if k == 0 || k as u64 > u64::from(dist.n()) {
        return Err(GeneratorError::WidthOutOfRange { k, n: dist.n() });
    }
    let clauses = par::try_map_range(par, m, |j| {
        generate_clause(dist, k, &mut rng::stream(seed, j))
    })?;
    Ok(Formula::with_clauses(dist.n(), clauses).expect("sampler stays within 1..=n"))
}

fn warn_outside_regime(params: &GeneratorParams) {
    if params.beta >= 1.0 {
        log::warn!(
            "beta = {} >= 1: the rejection probability no longer vanishes and the model's guarantees do not apply",
            params.beta
        );
    }
    if (params.k as u64).pow(2) >= u64::from(params.n) {
        log::warn!(
            "k^2 = {} >= n = {}: clause width is large for this many variables; rejections may dominate",
            params.k * params.k,
            params.n
        );
    }
}

/// Leading-order expected occurrences of variable `i`,
/// `C k (1-β) (i/n)^-β` with `C = m/n`.
pub fn expected_occurrences(i: u32, params: &GeneratorParams) -> Result<f64, SamplerError> {
    let beta = params.beta;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SamplerError::BetaOutsideUnitInterval(beta));
    }
    let x = f64::from(i) / f64::from(params.n);
    Ok(params.density() * params.k as f64 * (1.0 - beta) * x.powf(-beta))
}

/// `m k p_i` with the exact normalization. Ignores the small bias from
/// rejected clauses.
pub fn expected_occurrences_exact(i: u32, dist: &PowerLawDist, m: u64, k: usize) -> f64 {
    m as f64 * k as f64 * dist.probability(i)
}
