//! Residual evaluation and immersion extraction on the rayon pool against a
//! single worker. Without the `parallel` feature both groups run sequentially.

use cmclab_core::ar::compute_q;
use cmclab_core::canonical::{gen_rotational_sphere_data, gen_rotational_sphere_immersed};
use cmclab_core::compatibility::verify_all;
use cmclab_core::make_space;
use cmclab_core::patch::extract_data;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use std::hint::black_box;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = ThreadPoolBuilder::new().build().expect("pool");
    let one = ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    vec![("rayon", all), ("sequential", one)]
}

fn residuals(c: &mut Criterion) {
    let space = make_space(-1, 0.25).unwrap();
    let mut group = c.benchmark_group("verify_all");
    group.sample_size(20);
    for n in [401, 1601] {
        let d = gen_rotational_sphere_data(&space, 1.0, 2.0, n).unwrap().patch;
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &d, |b, d| {
                b.iter(|| pool.install(|| verify_all(black_box(d), &compute_q(d))))
            });
        }
    }
    group.finish();
}

fn extraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract_data");
    group.sample_size(10);
    let im = gen_rotational_sphere_immersed(-1, 1.0, 601).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 601), |b| b.iter(|| pool.install(|| extract_data(black_box(&im)))));
    }
    group.finish();
}

criterion_group!(benches, residuals, extraction);
criterion_main!(benches);
