use std::hint::black_box;

use coarse_core::operators::{lift, lift_unchecked, random_local, IndexSpace};
use coarse_core::{CoverMap, QuotientTower};
use criterion::{criterion_group, criterion_main, Criterion};

fn lifting(c: &mut Criterion) {
    let tower = QuotientTower::cyclic(3, 2, 6).unwrap();
    let cover = CoverMap::from_tower(&tower, 5, 3).unwrap();
    let base = IndexSpace::graph("base", cover.base());
    let total = IndexSpace::cover_total("total", &cover);
    let t = random_local(cover.base(), base, 2, 1);
    c.bench_function("lift/cyclic_96_to_24", |b| b.iter(|| black_box(lift(&t, &cover, total.clone()).unwrap())));
    c.bench_function("lift_unchecked/cyclic_96_to_24", |b| {
        b.iter(|| black_box(lift_unchecked(&t, &cover, total.clone())))
    });

    let g = coarse_core::FiniteGroup::sl2(13).unwrap().cayley_graph().unwrap();
    let cover = CoverMap::truncated_universal(&g, 0, 5).unwrap();
    let t = random_local(&g, IndexSpace::graph("sl2", &g), 1, 2);
    let total = IndexSpace::cover_total("tree", &cover);
    c.bench_function("lift_unchecked/sl2_13_tree_depth_5", |b| {
        b.iter(|| black_box(lift_unchecked(&t, &cover, total.clone())))
    });
}

criterion_group!(benches, lifting);
criterion_main!(benches);
