use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use plcsec::experiment::CellCapacities;
use plcsec::metrics::{BobBin, Scenario};
use plcsec::spectral::make_grid;
use plcsec::synthesis::{generate_ensemble_with, ScenarioSpec};
use plcsec::{Allocator, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spec() -> ScenarioSpec {
    let mut spec = ScenarioSpec::preset(Scenario::ShortPath, BobBin::Mid);
    spec.grid = make_grid(512, 1.7e6, 86e6).unwrap();
    spec.bob_model.level_offset_db -= 10.0 * (2048.0f64 / 512.0).log10();
    spec
}

fn ensemble(c: &mut Criterion) {
    let spec = spec();
    let mut group = c.benchmark_group("generate_ensemble");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| generate_ensemble_with(&spec, 64, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn capacities(c: &mut Criterion) {
    let pairs = generate_ensemble_with(&spec(), 64, 1, Execution::default()).unwrap();
    let allocators = [Allocator::Optimal, Allocator::Uniform];
    let powers = [-30.0, 0.0, 30.0];
    let mut group = c.benchmark_group("cell_capacities");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| CellCapacities::evaluate(&pairs, &allocators, &powers, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble, capacities);
criterion_main!(benches);
