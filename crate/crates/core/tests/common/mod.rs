#![allow(dead_code)]

use sfsat::generator::generate_formula_from;
use sfsat::{Formula, Parallelism, PowerLawDist, SamplerMode};

/// Exhaustive truth-table satisfiability, n <= 20.
pub fn brute_force_sat(f: &Formula) -> bool {
    let n = f.num_vars() as usize;
    assert!(n <= 20, "truth table too large");
    let mut assignment = vec![false; n];
    (0..1u32 << n).any(|mask| {
        for (v, a) in assignment.iter_mut().enumerate() {
            *a = mask >> v & 1 == 1;
        }
        f.is_satisfied_by(&assignment)
    })
}

pub fn random_formula(n: u32, m: u64, k: usize, beta: f64, seed: u64) -> Formula {
    let dist = PowerLawDist::new(n, beta, SamplerMode::ExactTable).unwrap();
    generate_formula_from(&dist, m, k, seed, Parallelism::Sequential).unwrap()
}

/// Standard error of a proportion `p` estimated from `trials` draws.
pub fn binomial_se(p: f64, trials: f64) -> f64 {
    (p * (1.0 - p) / trials).sqrt()
}
