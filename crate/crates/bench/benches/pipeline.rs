use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fockcap::{
    capability_simplified, merge_bruteforce, merge_convolution, negative_regions, radial_wigner,
    reconstruct_em, synthesize_quadratures,
};
use fockcap_bench::{reference_distribution, spread_distribution};

fn bench_merge_backends(c: &mut Criterion) {
    let d = reference_distribution();
    let mut group = c.benchmark_group("merge");
    for n in [2usize, 4, 6] {
        let inputs = vec![d.clone(); n];
        group.bench_with_input(BenchmarkId::new("bruteforce", n), &inputs, |b, inputs| {
            b.iter(|| merge_bruteforce(black_box(inputs)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("convolution", n), &inputs, |b, inputs| {
            b.iter(|| merge_convolution(black_box(inputs)).unwrap())
        });
    }
    for n in [14usize, 50] {
        let inputs = vec![d.clone(); n];
        group.bench_with_input(BenchmarkId::new("convolution", n), &inputs, |b, inputs| {
            b.iter(|| merge_convolution(black_box(inputs)).unwrap())
        });
    }
    group.finish();
}

fn bench_negative_regions(c: &mut Criterion) {
    let mut group = c.benchmark_group("negative_regions");
    for degree in [14usize, 28, 100] {
        let w = radial_wigner(&spread_distribution(degree)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(degree), &w, |b, w| {
            b.iter(|| negative_regions(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn bench_capability_search(c: &mut Criterion) {
    let d = reference_distribution();
    c.bench_function("capability_simplified_n14", |b| {
        b.iter(|| capability_simplified(black_box(&d), 14).unwrap())
    });
}

fn bench_em_reconstruction(c: &mut Criterion) {
    let qd = synthesize_quadratures(&reference_distribution(), 10_000, 1.0, 1).unwrap();
    c.bench_function("em_reconstruct_1e4_samples_20_iters", |b| {
        b.iter(|| reconstruct_em(black_box(&qd), 5, 20).unwrap())
    });
}

criterion_group!(
    benches,
    bench_merge_backends,
    bench_negative_regions,
    bench_capability_search,
    bench_em_reconstruction
);
criterion_main!(benches);
