//! Finite-propagation block operators over finite metric index sets.
//!
//! A [`BlockOperator`] is a sparse matrix indexed by pairs of points of an
//! [`IndexSpace`], with a `k × k` complex block per nonzero pair. The index
//! space carries the metric used to measure propagation.

mod block;
mod ghost;
mod lift;
mod onl;
mod psi;
mod random;

pub use block::{BlockOperator, NormOptions, DENSE_NORM_HARD_LIMIT};
pub use ghost::{commutator_decay, ghost_profile, GhostProfile};
pub use lift::{lift, lift_family, lift_unchecked, LiftedFamily};
pub use onl::{onl_search, LocalizationResult};
pub use psi::{equivariant_trace, psi_decompose, PsiDecomposition};
pub use random::random_local;

use std::fmt;
use std::sync::Arc;

use crate::covers::{CoverKind, CoverMap};
use crate::graphs::{DistanceMatrix, Graph, SpaceOfGraphs, UNREACHABLE};

/// Graphs up to this many vertices get a precomputed distance matrix.
pub const DISTANCE_MATRIX_LIMIT: usize = 6_000;

#[derive(Clone)]
pub enum Metric {
    Graph {
        graph: Arc<Graph>,
        distances: Option<Arc<DistanceMatrix>>,
    },
    /// A rooted tree given by parent pointers and depths.
    Tree {
        parent: Arc<Vec<usize>>,
        depth: Arc<Vec<usize>>,
    },
    Space(Arc<SpaceOfGraphs>),
}

/// A finite metric index set, identified by a name and a size.
///
/// Two index spaces are interchangeable when both agree; operators on
/// different spaces cannot be combined.
#[derive(Clone)]
pub struct IndexSpace {
    id: Arc<str>,
    len: usize,
    metric: Metric,
}

impl fmt::Debug for IndexSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSpace({}, {})", self.id, self.len)
    }
}

impl PartialEq for IndexSpace {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.id == other.id
    }
}

impl IndexSpace {
    pub fn graph(id: impl Into<String>, g: &Graph) -> Self {
        Self::graph_arc(id, Arc::new(g.clone()))
    }

    pub fn graph_arc(id: impl Into<String>, g: Arc<Graph>) -> Self {
        let distances = (g.vertex_count() <= DISTANCE_MATRIX_LIMIT).then(|| Arc::new(g.distance_matrix()));
        IndexSpace {
            id: Arc::from(id.into()),
            len: g.vertex_count(),
            metric: Metric::Graph { graph: g, distances },
        }
    }

    /// The total space of a cover; truncated trees use their parent
    /// structure for distances.
    pub fn cover_total(id: impl Into<String>, c: &CoverMap) -> Self {
        match c.kind() {
            CoverKind::TruncatedTree { walk_len, parent, .. } => IndexSpace {
                id: Arc::from(id.into()),
                len: walk_len.len(),
                metric: Metric::Tree {
                    parent: Arc::new(parent.clone()),
                    depth: Arc::new(walk_len.clone()),
                },
            },
            _ => Self::graph(id, c.total()),
        }
    }

    pub fn space(id: impl Into<String>, x: Arc<SpaceOfGraphs>) -> Self {
        IndexSpace {
            id: Arc::from(id.into()),
            len: x.total_vertices(),
            metric: Metric::Space(x),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn graph_ref(&self) -> Option<&Graph> {
        match &self.metric {
            Metric::Graph { graph, .. } => Some(graph),
            _ => None,
        }
    }

    pub fn as_space(&self) -> Option<&Arc<SpaceOfGraphs>> {
        match &self.metric {
            Metric::Space(x) => Some(x),
            _ => None,
        }
    }

    /// Distance between two points; `u64::MAX` if unreachable.
    pub fn distance(&self, x: usize, y: usize) -> u64 {
        match &self.metric {
            Metric::Graph { graph, distances } => match distances {
                Some(d) => d.get(x, y) as u64,
                None => {
                    let d = graph.bfs_distances(x)[y];
                    if d == UNREACHABLE {
                        u64::MAX
                    } else {
                        d as u64
                    }
                }
            },
            Metric::Tree { parent, depth } => {
                let (mut a, mut b) = (x, y);
                let mut steps = 0u64;
                while depth[a] > depth[b] {
                    a = parent[a];
                    steps += 1;
                }
                while depth[b] > depth[a] {
                    b = parent[b];
                    steps += 1;
                }
                while a != b {
                    a = parent[a];
                    b = parent[b];
                    steps += 2;
                }
                steps
            }
            Metric::Space(s) => s.distance(x, y),
        }
    }

    /// Distances from `x` to each of `targets`.
    pub(crate) fn distances_from(&self, x: usize, targets: &[usize]) -> Vec<u64> {
        match &self.metric {
            Metric::Graph { graph, distances: None } => {
                let d = graph.bfs_distances(x);
                targets.iter().map(|&y| d[y] as u64).collect()
            }
            _ => targets.iter().map(|&y| self.distance(x, y)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::graphs::{complete_graph, cycle_graph};
    use crate::groups::QuotientTower;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn adjacency(g: &Graph, space: &IndexSpace) -> BlockOperator {
        BlockOperator::from_scalars(space.clone(), g.edges().iter().flat_map(|&(u, v)| [(u, v, c(1.0)), (v, u, c(1.0))]))
    }

    fn random_prop1(space: &IndexSpace, g: &Graph, rng: &mut ChaCha8Rng) -> BlockOperator {
        let mut t = Vec::new();
        for x in 0..g.vertex_count() {
            for y in std::iter::once(x).chain(g.neighbors(x).iter().copied()) {
                t.push((x, y, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
        }
        BlockOperator::from_scalars(space.clone(), t)
    }

    fn complete_family() -> Arc<SpaceOfGraphs> {
        Arc::new(SpaceOfGraphs::new((3..=8).map(|n| complete_graph(n).unwrap()).collect()).unwrap())
    }

    #[test]
    fn ghost_profiles() {
        let x = complete_family();
        let space = IndexSpace::space("K", x.clone());
        let id = BlockOperator::identity(space.clone(), 1);
        assert!(ghost_profile(&id, &x).unwrap().gamma.iter().all(|&g| g == 1.0));
        // constant blocks 1/|G_n|: norm-one projections with vanishing entries
        let mut t = Vec::new();
        for n in 0..x.len() {
            let size = x.component(n).vertex_count() as f64;
            for a in x.range(n) {
                for b in x.range(n) {
                    t.push((a, b, c(1.0 / size)));
                }
            }
        }
        let p = BlockOperator::from_scalars(space, t);
        let prof = ghost_profile(&p, &x).unwrap();
        for n in 0..x.len() {
            assert!((prof.gamma[n] - 1.0 / (n + 3) as f64).abs() < 1e-15);
            let pts: Vec<_> = x.range(n).collect();
            let block = p.compress_dense(&pts, &pts);
            assert!((crate::linalg::spectral_norm(&block) - 1.0).abs() < 1e-12);
        }
        assert!(prof.tail_sup.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn commutators() {
        let x = Arc::new(SpaceOfGraphs::new((3..=9).map(|n| cycle_graph(n).unwrap()).collect()).unwrap());
        let space = IndexSpace::space("C", x.clone());
        let id = BlockOperator::identity(space.clone(), 1);
        assert!(commutator_decay(&id, &x).unwrap().iter().all(|&v| v == 0.0));
        // couple the first vertices of consecutive components with weight 1/(n+1)
        let mut t = Vec::new();
        for n in 0..x.len() - 1 {
            let w = 1.0 / (n + 1) as f64;
            let (a, b) = (x.global(n, 0), x.global(n + 1, 0));
            t.push((a, b, c(w)));
            t.push((b, a, c(w)));
        }
        let op = BlockOperator::from_scalars(space, t);
        let decay = commutator_decay(&op, &x).unwrap();
        for (n, d) in decay.iter().enumerate() {
            let left = if n > 0 { 1.0 / n as f64 } else { 0.0 };
            let right = if n + 1 < x.len() { 1.0 / (n + 1) as f64 } else { 0.0 };
            let expected = (left * left + right * right).sqrt();
            assert!((d - expected).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn lift_of_cycle_adjacency() {
        let t = QuotientTower::cyclic(3, 2, 4).unwrap();
        let cover = CoverMap::from_tower(&t, 3, 2).unwrap();
        let base = IndexSpace::graph("C12", cover.base());
        let total = IndexSpace::graph("C24", cover.total());
        let a = adjacency(cover.base(), &base);
        let lifted = lift(&a, &cover, total.clone()).unwrap();
        let expected = adjacency(cover.total(), &total);
        assert_eq!(lifted.max_abs_diff(&expected).unwrap(), 0.0);
        let id = lift(&BlockOperator::identity(base, 1), &cover, total.clone()).unwrap();
        assert_eq!(id.max_abs_diff(&BlockOperator::identity(total, 1)).unwrap(), 0.0);
    }

    #[test]
    fn lift_is_multiplicative() {
        let t = QuotientTower::cyclic(3, 2, 4).unwrap();
        let cover = CoverMap::from_tower(&t, 3, 2).unwrap();
        let base = IndexSpace::graph("C12", cover.base());
        let total = IndexSpace::graph("C24", cover.total());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = random_prop1(&base, cover.base(), &mut rng);
            let b = random_prop1(&base, cover.base(), &mut rng);
            let la = lift(&a, &cover, total.clone()).unwrap();
            let lb = lift(&b, &cover, total.clone()).unwrap();
            let lab = lift(&a.mul(&b).unwrap(), &cover, total.clone()).unwrap();
            assert!(lab.sub(&la.mul(&lb).unwrap()).unwrap().operator_norm() < 1e-10);
            let la_star = lift(&a.adjoint(), &cover, total.clone()).unwrap();
            assert_eq!(la_star.max_abs_diff(&la.adjoint()).unwrap(), 0.0);
        }
    }

    #[test]
    fn shallow_cover_refuses_lift() {
        let t = QuotientTower::cyclic(3, 2, 2).unwrap();
        let cover = CoverMap::from_tower(&t, 1, 0).unwrap();
        let base = IndexSpace::graph("C3", cover.base());
        let a = adjacency(cover.base(), &base);
        let err = lift(&a, &cover, IndexSpace::graph("C6", cover.total())).unwrap_err();
        assert!(matches!(
            err,
            Error::FaithfulnessTooSmall {
                required: 2,
                witness: Some(_),
                ..
            }
        ));
    }

    #[test]
    fn family_lift_drops_unfaithful() {
        let x = Arc::new(SpaceOfGraphs::new(vec![complete_graph(4).unwrap(), cycle_graph(7).unwrap(), cycle_graph(9).unwrap()]).unwrap());
        let space = IndexSpace::space("X", x.clone());
        let mut t = Vec::new();
        for n in 0..x.len() {
            for &(u, v) in x.component(n).edges() {
                t.push((x.global(n, u), x.global(n, v), c(1.0)));
                t.push((x.global(n, v), x.global(n, u), c(1.0)));
            }
        }
        let a = BlockOperator::from_scalars(space, t);
        let covers: Vec<_> = x.components().iter().map(|g| CoverMap::truncated_universal(g, 0, 8).unwrap()).collect();
        let fam = lift_family(&a, &x, &covers).unwrap();
        assert_eq!(fam.dropped.len(), 1);
        assert!(matches!(fam.dropped[0].1, Error::FaithfulnessTooSmall { component: Some(0), .. }));
        assert_eq!(fam.first_faithful(), Some(1));
        assert_eq!(fam.components.len(), 2);
    }

    #[test]
    fn psi_of_lifted_cycle() {
        let t = QuotientTower::cyclic(3, 2, 3).unwrap();
        let cover = CoverMap::from_tower(&t, 2, 1).unwrap();
        let base = IndexSpace::graph("C6", cover.base());
        let total = IndexSpace::graph("C12", cover.total());
        let a = lift(&adjacency(cover.base(), &base), &cover, total.clone()).unwrap();
        let psi = psi_decompose(&a, &cover, base.clone()).unwrap();
        assert_eq!(psi.parts.len(), 2);
        // domain {0..5}: the edges 5-6 and 11-0 cross into the other sheet
        assert_eq!(psi.identity_part().nnz_blocks(), 10);
        assert_eq!(psi.parts[1].nnz_blocks(), 2);
        assert_eq!(psi.parts[1].get(5, 0), Some(&[c(1.0)][..]));
        let back = psi.reconstruct(&cover, total.clone()).unwrap();
        assert_eq!(back.max_abs_diff(&a).unwrap(), 0.0);

        let id = BlockOperator::identity(total.clone(), 1);
        let psi = psi_decompose(&id, &cover, base.clone()).unwrap();
        assert_eq!(psi.nonzero_parts(), 1);
        assert_eq!(equivariant_trace(&id, &cover).unwrap(), c(6.0));

        let skew = BlockOperator::diagonal(total, 1, |x| c(x as f64));
        assert!(matches!(psi_decompose(&skew, &cover, base), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn localization() {
        let g = complete_graph(6).unwrap();
        let space = IndexSpace::graph("K6", &g);
        let id = BlockOperator::identity(space.clone(), 1);
        let r = onl_search(&id, 0);
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.support.len(), 1);
        let j = BlockOperator::from_scalars(space, (0..6).flat_map(|a| (0..6).map(move |b| (a, b, c(1.0 / 6.0)))));
        let r = onl_search(&j, 0);
        assert!((r.ratio - 1.0 / 6f64.sqrt()).abs() < 1e-12);
        assert!(r.support_diameter == 0);
        let r = onl_search(&j, 2);
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
}
