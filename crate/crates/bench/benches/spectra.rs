use std::hint::black_box;

use coarse_core::spectral::laplacian_spectrum;
use coarse_core::FiniteGroup;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian_spectrum");
    group.sample_size(10);
    for q in [5, 7, 11] {
        let g = FiniteGroup::sl2(q).unwrap().cayley_graph().unwrap();
        group.bench_with_input(BenchmarkId::new("sl2", q), &g, |b, g| {
            b.iter(|| black_box(laplacian_spectrum(g).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, spectra);
criterion_main!(benches);
