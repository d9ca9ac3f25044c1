use std::hint::black_box;

use coarse_core::graphs::random_regular;
use coarse_core::FiniteGroup;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn girth(c: &mut Criterion) {
    let mut group = c.benchmark_group("girth");
    for q in [7, 11, 13] {
        let g = FiniteGroup::sl2(q).unwrap().cayley_graph().unwrap();
        group.bench_with_input(BenchmarkId::new("sl2", q), &g, |b, g| b.iter(|| black_box(g.girth())));
    }
    for n in [500, 2000] {
        let g = random_regular(n, 4, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("random_4_regular", n), &g, |b, g| b.iter(|| black_box(g.girth())));
    }
    group.finish();
}

criterion_group!(benches, girth);
criterion_main!(benches);
