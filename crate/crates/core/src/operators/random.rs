use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graphs::Graph;

use super::{BlockOperator, IndexSpace};

/// A propagation-1 operator on the vertices of `g` with independent
/// uniform entries in `[-1, 1] + i[-1, 1]` on the diagonal and on edges,
/// scaled so that the Schur bound `√(max row sum · max column sum)` of the
/// block norms is 1, hence `‖T‖ ≤ 1`. Deterministic in `seed`.
pub fn random_local(g: &Graph, space: IndexSpace, k: usize, seed: u64) -> BlockOperator {
    assert_eq!(space.len(), g.vertex_count());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for x in 0..g.vertex_count() {
        for y in std::iter::once(x).chain(g.neighbors(x).iter().copied()) {
            let block = (0..k * k)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            triplets.push((x, y, block));
        }
    }
    let t = BlockOperator::from_triplets(space, k, triplets);
    let n = g.vertex_count();
    let (mut rows, mut cols) = (vec![0.0; n], vec![0.0; n]);
    for (x, y, block) in t.blocks() {
        let b = block.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        rows[x] += b;
        cols[y] += b;
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let bound = (max(&rows) * max(&cols)).sqrt();
    t.scale(Complex64::new(1.0 / bound, 0.0))
}
