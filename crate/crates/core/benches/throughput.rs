//! Sequential vs rayon throughput for the three data-parallel loops:
//! clause generation, occurrence counting and a small sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sfsat::analysis::occurrence_counts_with;
use sfsat::generator::generate_formula_from;
use sfsat::harness::{ms_from_ratios, run_sweep, SolverChoice, SweepSpec};
use sfsat::{Parallelism, PowerLawDist, SamplerMode};
use std::hint::black_box;

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn generation(c: &mut Criterion) {
    let dist = PowerLawDist::new(100_000, 0.82, SamplerMode::ExactTable).unwrap();
    let m = 500_000;
    let mut g = c.benchmark_group("generate");
    g.throughput(Throughput::Elements(m));
    for (name, par) in MODES {
        g.bench_with_input(BenchmarkId::new(name, m), &par, |b, &par| {
            b.iter(|| generate_formula_from(&dist, m, 3, black_box(7), par).unwrap())
        });
    }
    g.finish();
}

fn counting(c: &mut Criterion) {
    let dist = PowerLawDist::new(100_000, 0.82, SamplerMode::ExactTable).unwrap();
    let f = generate_formula_from(&dist, 500_000, 3, 7, Parallelism::Parallel).unwrap();
    let mut g = c.benchmark_group("occurrence_counts");
    g.throughput(Throughput::Elements(f.num_clauses() as u64));
    for (name, par) in MODES {
        g.bench_with_input(BenchmarkId::new(name, f.num_clauses()), &par, |b, &par| {
            b.iter(|| occurrence_counts_with(black_box(&f), par))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep_2sat");
    g.sample_size(10);
    for (name, par) in MODES {
        let spec = SweepSpec {
            n: 20_000,
            k: 2,
            beta_grid: vec![0.0, 0.3],
            m_grid: ms_from_ratios(20_000, &[0.8, 1.0, 1.2]),
            trials: 8,
            solver: SolverChoice::TwoSat,
            base_seed: 1,
            parallelism: par,
        };
        g.bench_function(name, |b| b.iter(|| run_sweep(black_box(&spec)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, generation, counting, sweep);
criterion_main!(benches);
