//! Sequential (one-thread pool) against the default rayon pool on the three
//! parallel hot spots: WCGA over octahedron samples, distance matrices, and
//! the per-point Nikol'skii problems.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use entropy_core::discretization::{m_p_dual, MeasureSpace, Subspace};
use entropy_core::entropy::{DistanceMatrix, Metric};
use entropy_core::greedy::{sigma_profile, Octahedron, WcgaOptions};
use entropy_core::{Dictionary, NormedSpaceSpec};
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::current_num_threads();
    vec![
        ("sequential".to_string(), ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        (format!("pool-{default}"), ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_sigma(c: &mut Criterion) {
    let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(32, 1.5).unwrap(), 64, 1).unwrap();
    let samples = Octahedron::new(dict.clone()).sample(16, 2);
    let mut g = c.benchmark_group("sigma_profile");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| sigma_profile(&samples, &dict, &[4, 8, 16], WcgaOptions::default()).unwrap()))
        });
    }
    g.finish();
}

fn bench_distances(c: &mut Criterion) {
    let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(16, 3.0).unwrap(), 32, 3).unwrap();
    let points = Octahedron::new(dict.clone()).sample(600, 4);
    let metric = Metric::ambient(dict.space().clone());
    let mut g = c.benchmark_group("distance_matrix");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| DistanceMatrix::new(&points, &metric)))
        });
    }
    g.finish();
}

fn bench_mp(c: &mut Criterion) {
    let sub = Subspace::random(MeasureSpace::random(96, 2.0, 5).unwrap(), 6, 6).unwrap();
    let mut g = c.benchmark_group("m_p_dual");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| m_p_dual(&sub, 3.0, 1e-8).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sigma, bench_distances, bench_mp);
criterion_main!(benches);
