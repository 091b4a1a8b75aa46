use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use haavail_bench::{parameter_sets, short_simulation, sweep_fixed};
use haavail_core::ctmc::{build_generator, ctmc_steady_state_closed_form, ctmc_steady_state_numeric};
use haavail_core::metrics::{default_ratio_grid, downtime_sweep};
use haavail_core::montecarlo::{simulate, simulate_periodic};
use haavail_core::smp::{smp_state_probabilities, smp_state_probabilities_closed_form};

fn steady_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_state");
    for (name, p) in parameter_sets() {
        group.bench_with_input(BenchmarkId::new("ctmc_numeric", name), &p, |b, p| {
            b.iter(|| ctmc_steady_state_numeric(&build_generator(black_box(*p)).unwrap()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ctmc_closed", name), &p, |b, p| {
            b.iter(|| ctmc_steady_state_closed_form(black_box(*p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("smp_numeric", name), &p, |b, p| {
            b.iter(|| smp_state_probabilities(black_box(*p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("smp_closed", name), &p, |b, p| {
            b.iter(|| smp_state_probabilities_closed_form(black_box(*p)).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let grid = default_ratio_grid();
    let fixed = sweep_fixed();
    c.bench_function("sweep_default_grid", |b| {
        b.iter(|| downtime_sweep(black_box(&grid), fixed, 168.0).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let cfg = short_simulation();
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    group.bench_function("smp_semantics", |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
    group.bench_function("periodic_clock", |b| {
        b.iter(|| simulate_periodic(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, steady_state, sweep, monte_carlo);
criterion_main!(benches);
