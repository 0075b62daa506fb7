//! Scale-free random k-SAT instances.
//!
//! Variables are drawn with probability `P(i) ∝ i^-β`, so occurrence counts
//! follow a power law. The crate covers the whole experimental loop:
//!
//! - [`sampler`]: the power-law variable distribution, generalized harmonic
//!   numbers and the clause-rejection (surname) probability.
//! - [`generator`]: seeded, worker-count independent formula generation.
//! - [`formula`]: literals, clauses, formulas and DIMACS CNF I/O.
//! - [`solver`]: exact 2-SAT via strongly connected components, implied-literal
//!   exposure, budgeted DPLL and restricted small-core checks.
//! - [`analysis`]: occurrence statistics, percolation criteria and power-law
//!   exponent fits.
//! - [`theory`]: closed-form thresholds and small-core quantities.
//! - [`harness`]: Monte Carlo sweeps, 50% crossing search and scaling fits.
//!
//! Data-parallel loops go through [`par`]; building without the default
//! `parallel` feature gives the sequential fallback with identical output.

pub mod analysis;
pub mod formula;
pub mod generator;
pub mod harness;
pub mod par;
pub mod rng;
pub mod sampler;
pub mod solver;
pub mod theory;

mod stats;

pub use formula::{Clause, Formula, Literal};
pub use generator::{generate_formula, GeneratorParams};
pub use par::Parallelism;
pub use sampler::{PowerLawDist, SamplerMode};
pub use solver::{SatResult, SatStatus};
