use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ptcorr::scattering::{identity_sweep, NamedMetric};
use ptcorr::spectrum::{default_search_box, find_eigenvalues};
use ptcorr::{Execution, Grid, PotentialSpec};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn k_sweep(c: &mut Criterion) {
    let v = PotentialSpec::scarf2(2.5, 0.5, 1.0).unwrap();
    let grid = Grid::for_potential(&v);
    let ks: Vec<f64> = (1..=32).map(|i| 0.1 * i as f64).collect();
    let metrics = NamedMetric::defaults();
    let mut group = c.benchmark_group("identity_sweep_32k");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| identity_sweep(&v, &ks, &grid, &metrics, exec).unwrap())
        });
    }
    group.finish();
}

fn spectrum_scan(c: &mut Criterion) {
    let v = PotentialSpec::scarf2(2.5, 0.5, 1.0).unwrap();
    let grid = Grid::with_step(25.0, 2e-3).unwrap();
    let search_box = default_search_box(&v, &grid).unwrap();
    let mut group = c.benchmark_group("find_eigenvalues");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| find_eigenvalues(&v, &grid, &search_box, 6, 1e-8, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, k_sweep, spectrum_scan);
criterion_main!(benches);
