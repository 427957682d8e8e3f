use std::hint::black_box;

use assocq::assoc_model::PathScratch;
use assocq::montecarlo::{distance_from_sorted, estimate_distance, simulate_statistics};
use assocq::rng::RandomStream;
use assocq::theory::make_quantile_spec;
use assocq::{exponential_case, TGrid};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

fn paths(c: &mut Criterion) {
    let model = exponential_case();
    let mut g = c.benchmark_group("path");
    for n in [100, 1000] {
        g.throughput(Throughput::Elements(n as u64));
        g.bench_function(format!("n_{n}"), |b| {
            let mut scratch = PathScratch::default();
            let mut stream = RandomStream::new(1, 0);
            b.iter(|| {
                model.simulate_into(n, &mut stream, &mut scratch);
                black_box(scratch.path[0])
            })
        });
    }
    g.finish();

    c.bench_function("gaussians_1e4", |b| {
        let mut stream = RandomStream::new(2, 0);
        let mut out = vec![0.0; 10_000];
        b.iter(|| {
            stream.fill_gaussian(&mut out, 1.0);
            black_box(out[0])
        })
    });
}

fn cells(c: &mut Criterion) {
    let model = exponential_case();
    let spec = make_quantile_spec(&model, 0.2).unwrap();
    let grid = TGrid::default();
    let mut g = c.benchmark_group("cell");
    g.sample_size(10);
    g.bench_function("n_100_r_2000", |b| {
        b.iter(|| estimate_distance(&model, &spec, 100, 2_000, &grid, black_box(3), 0))
    });
    g.bench_function("distance_r_100000", |b| {
        b.iter_batched(
            || simulate_statistics(&model, &spec, 100, 100_000, 4, 0),
            |sorted| distance_from_sorted(&sorted, &grid),
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(benches, paths, cells);
criterion_main!(benches);
