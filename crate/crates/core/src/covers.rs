//! Covering maps of graphs and their metric-cover radius.
//!
//! A ball `B(x, R)` is the open ball `{y : d(x, y) < R}`; for integer
//! radii this is the closed hop ball of radius `R - 1`. The map `π` is an
//! `R`-metric cover at `x` when it carries `B(x, R)` bijectively onto
//! `B(π(x), R)` and the two balls span corresponding edges. Under that
//! convention the universal cover of a graph of girth `g` is exactly a
//! `⌊g/2⌋`-metric cover.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graphs::{Girth, Graph, UNREACHABLE};
use crate::groups::{FiniteGroup, QuotientTower};

/// Default size limit for truncated universal covers.
pub const MAX_COVER_VERTICES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum CoverKind {
    Identity,
    FiniteGalois {
        /// Kernel elements (indices in the upper group), ascending; entry 0 is the identity.
        deck: Vec<usize>,
        /// `action[k][x]`: deck element `k` applied to total vertex `x`.
        action: Vec<Vec<usize>>,
        /// One total vertex per base vertex: `domain[b]` is the least vertex over `b`.
        domain: Vec<usize>,
    },
    TruncatedTree {
        base_vertex: usize,
        depth: usize,
        /// Length of the walk each total vertex represents.
        walk_len: Vec<usize>,
        /// Parent walk, `usize::MAX` at the root.
        parent: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct CoverMap {
    base: Graph,
    total: Graph,
    projection: Vec<usize>,
    kind: CoverKind,
    notice: Option<String>,
}

/// Why a cover fails to be an `R`-metric cover at some centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverWitness {
    /// Two vertices of the total ball share an image.
    NotInjective { center: usize, a: usize, b: usize, image: usize },
    /// A vertex of the base ball has no preimage in the total ball.
    NotSurjective { center: usize, base_vertex: usize },
    /// A base edge inside the ball whose preimages are not adjacent.
    MissingEdge { center: usize, base_edge: (usize, usize) },
}

impl fmt::Display for CoverWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverWitness::NotInjective { center, a, b, image } => {
                write!(f, "ball at {center}: vertices {a} and {b} both map to {image}")
            }
            CoverWitness::NotSurjective { center, base_vertex } => {
                write!(f, "ball at {center}: base vertex {base_vertex} is not covered")
            }
            CoverWitness::MissingEdge { center, base_edge } => {
                write!(f, "ball at {center}: base edge {base_edge:?} does not lift")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricCoverCheck {
    pub radius: u64,
    pub passed: bool,
    pub witness: Option<CoverWitness>,
    pub centers_checked: usize,
    /// Base vertices whose balls were examined (all of them except for
    /// truncated trees, where only centres away from the boundary count).
    pub base_vertices_covered: usize,
}

impl CoverMap {
    /// The identity cover of `g`.
    pub fn identity(g: &Graph) -> Self {
        CoverMap {
            base: g.clone(),
            total: g.clone(),
            projection: (0..g.vertex_count()).collect(),
            kind: CoverKind::Identity,
            notice: None,
        }
    }

    /// `Cayley(upper) → Cayley(lower)` induced by reduction. The deck group is
    /// the kernel, acting by left multiplication (which commutes with the
    /// right Cayley edges `g ~ g·s`).
    pub fn galois(upper: &FiniteGroup, lower: &FiniteGroup) -> Result<Self> {
        let hom = upper.reduction_to(lower)?;
        for (lu, ld) in upper.letters().iter().zip(lower.letters()) {
            if lu.label != ld.label || hom.apply(lu.element) != ld.element {
                return Err(Error::InvalidGenerator(format!(
                    "letter {} does not reduce to letter {}",
                    lu.label, ld.label
                )));
            }
        }
        let total = upper.cayley_graph()?;
        let base = lower.cayley_graph()?;
        let mut domain = vec![usize::MAX; base.vertex_count()];
        for (x, &b) in hom.map.iter().enumerate() {
            if domain[b] == usize::MAX {
                domain[b] = x;
            }
        }
        let mut deck = hom.kernel.clone();
        let e = upper.identity();
        deck.sort_by_key(|&k| (k != e, k));
        let action = deck.iter().map(|&k| (0..upper.order()).map(|x| upper.mul(k, x)).collect()).collect();
        Ok(CoverMap {
            base,
            total,
            projection: hom.map,
            kind: CoverKind::FiniteGalois { deck, action, domain },
            notice: None,
        })
    }

    /// The cover of level `lower` by level `upper` of a tower.
    pub fn from_tower(tower: &QuotientTower, upper: usize, lower: usize) -> Result<Self> {
        if lower > upper {
            return Err(Error::IncomparableLevels {
                from: tower.moduli()[upper],
                to: tower.moduli()[lower],
            });
        }
        Self::galois(tower.level(upper), tower.level(lower))
    }

    /// Non-backtracking walks from `base_vertex` of length at most `depth`,
    /// joined by one-step extensions and projected to their endpoints.
    /// A tree is its own universal cover: it comes back as the identity
    /// cover with a notice.
    pub fn truncated_universal(g: &Graph, base_vertex: usize, depth: usize) -> Result<Self> {
        Self::truncated_universal_limited(g, base_vertex, depth, MAX_COVER_VERTICES)
    }

    pub fn truncated_universal_limited(g: &Graph, base_vertex: usize, depth: usize, limit: usize) -> Result<Self> {
        if g.is_tree() {
            let mut c = Self::identity(g);
            c.notice = Some("input is a tree; the universal cover is the identity".into());
            return Ok(c);
        }
        if depth == 0 {
            return Err(Error::TruncationTooShallow { radius: 1, depth });
        }
        let mut projection = vec![base_vertex];
        let mut walk_len = vec![0];
        let mut parent = vec![usize::MAX];
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier = vec![0usize];
        for len in 1..=depth {
            let mut next = Vec::new();
            for &w in &frontier {
                let end = projection[w];
                let back = if parent[w] == usize::MAX { usize::MAX } else { projection[parent[w]] };
                for &u in g.neighbors(end) {
                    if u == back {
                        continue;
                    }
                    let id = projection.len();
                    if id >= limit {
                        return Err(Error::CoverTooLarge { limit });
                    }
                    projection.push(u);
                    walk_len.push(len);
                    parent.push(w);
                    adjacency.push(vec![w]);
                    adjacency[w].push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        Ok(CoverMap {
            base: g.clone(),
            total: Graph::from_adjacency_unchecked(adjacency),
            projection,
            kind: CoverKind::TruncatedTree {
                base_vertex,
                depth,
                walk_len,
                parent,
            },
            notice: None,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn total(&self) -> &Graph {
        &self.total
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn project(&self, x: usize) -> usize {
        self.projection[x]
    }

    pub fn kind(&self) -> &CoverKind {
        &self.kind
    }

    pub fn notice(&self) -> Option<&str> {
        self.notice.as_deref()
    }

    pub fn is_galois(&self) -> bool {
        matches!(self.kind, CoverKind::FiniteGalois { .. })
    }

    /// Fundamental domain of a Galois cover (base vertex order); every
    /// vertex for the identity cover.
    pub fn domain(&self) -> Option<&[usize]> {
        match &self.kind {
            CoverKind::FiniteGalois { domain, .. } => Some(domain),
            _ => None,
        }
    }

    /// Total vertices at walk length at most `depth - margin`; all vertices
    /// for non-tree covers.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        match &self.kind {
            CoverKind::TruncatedTree { depth, walk_len, .. } => {
                let cut = depth.saturating_sub(margin);
                (0..walk_len.len()).filter(|&x| walk_len[x] <= cut).collect()
            }
            _ => (0..self.total.vertex_count()).collect(),
        }
    }

    /// Whether `π` maps every total edge to a base edge and hits every base vertex.
    pub fn is_graph_surjection(&self) -> bool {
        let edges_ok = self
            .total
            .edges()
            .iter()
            .all(|&(u, v)| self.base.has_edge(self.projection[u], self.projection[v]));
        let mut hit = vec![false; self.base.vertex_count()];
        self.projection.iter().for_each(|&b| hit[b] = true);
        edges_ok && hit.into_iter().all(|h| h)
    }

    fn centers(&self, closed: usize) -> Result<Vec<usize>> {
        match &self.kind {
            CoverKind::Identity => Ok(Vec::new()),
            CoverKind::FiniteGalois { domain, .. } => Ok(domain.clone()),
            CoverKind::TruncatedTree { depth, walk_len, .. } => {
                if closed > *depth {
                    return Err(Error::TruncationTooShallow {
                        radius: closed as u64 + 1,
                        depth: *depth,
                    });
                }
                let cut = depth - closed;
                let mut seen = vec![false; self.base.vertex_count()];
                let mut out = Vec::new();
                for (x, &len) in walk_len.iter().enumerate() {
                    let b = self.projection[x];
                    if len <= cut && !seen[b] {
                        seen[b] = true;
                        out.push(x);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Exhaustive check that `π` is an `R`-metric cover. Deck
    /// transformations are isometries, so Galois covers are checked over
    /// the fundamental domain; truncated trees over centres whose ball
    /// stays inside the truncation, one per base vertex.
    pub fn verify_metric_cover(&self, radius: u64) -> Result<MetricCoverCheck> {
        let nb = self.base.vertex_count();
        if radius <= 1 || matches!(self.kind, CoverKind::Identity) {
            // balls of radius ≤ 1 are single points (or empty)
            let centers = self.centers(0)?;
            return Ok(MetricCoverCheck {
                radius,
                passed: true,
                witness: None,
                centers_checked: centers.len(),
                base_vertices_covered: nb,
            });
        }
        let closed = (radius - 1) as usize;
        let centers = self.centers(closed)?;
        let covered = centers.len();
        let mut scratch_total = vec![UNREACHABLE; self.total.vertex_count()];
        let mut scratch_base = vec![UNREACHABLE; nb];
        let mut owner = vec![usize::MAX; nb];
        for (i, &x) in centers.iter().enumerate() {
            if let Some(w) = self.check_center(x, closed, &mut scratch_total, &mut scratch_base, &mut owner) {
                return Ok(MetricCoverCheck {
                    radius,
                    passed: false,
                    witness: Some(w),
                    centers_checked: i + 1,
                    base_vertices_covered: covered,
                });
            }
        }
        Ok(MetricCoverCheck {
            radius,
            passed: true,
            witness: None,
            centers_checked: centers.len(),
            base_vertices_covered: covered,
        })
    }

    fn check_center(&self, x: usize, closed: usize, dist_t: &mut [usize], dist_b: &mut [usize], owner: &mut [usize]) -> Option<CoverWitness> {
        let ball_t = bounded_bfs(&self.total, x, closed, dist_t);
        let ball_b = bounded_bfs(&self.base, self.projection[x], closed, dist_b);
        let mut witness = None;
        for &y in &ball_t {
            let b = self.projection[y];
            if owner[b] != usize::MAX {
                witness = Some(CoverWitness::NotInjective {
                    center: x,
                    a: owner[b],
                    b: y,
                    image: b,
                });
                break;
            }
            owner[b] = y;
        }
        if witness.is_none() {
            if let Some(&b) = ball_b.iter().find(|&&b| owner[b] == usize::MAX) {
                witness = Some(CoverWitness::NotSurjective { center: x, base_vertex: b });
            }
        }
        if witness.is_none() {
            'edges: for &b in &ball_b {
                for &c in self.base.neighbors(b) {
                    if b < c && dist_b[c] != UNREACHABLE && !self.total.has_edge(owner[b], owner[c]) {
                        witness = Some(CoverWitness::MissingEdge {
                            center: x,
                            base_edge: (b, c),
                        });
                        break 'edges;
                    }
                }
            }
        }
        for &y in &ball_t {
            dist_t[y] = UNREACHABLE;
            owner[self.projection[y]] = usize::MAX;
        }
        for &b in &ball_b {
            dist_b[b] = UNREACHABLE;
        }
        witness
    }

    /// Largest `R ≤ cap` at which the cover verifies (monotone in `R`).
    pub fn metric_cover_radius(&self, cap: u64) -> Result<u64> {
        for r in 2..=cap {
            if !self.verify_metric_cover(r)?.passed {
                return Ok(r - 1);
            }
        }
        Ok(cap.max(1))
    }

    /// Text dump: base edges, total edges, projection, and the deck action
    /// table for Galois covers.
    pub fn to_dump(&self) -> String {
        let mut out = String::from("# base\n");
        out.push_str(&self.base.to_edge_list());
        out.push_str("# total\n");
        out.push_str(&self.total.to_edge_list());
        out.push_str("# projection\n");
        for (x, b) in self.projection.iter().enumerate() {
            out.push_str(&format!("{x} {b}\n"));
        }
        if let CoverKind::FiniteGalois { deck, action, .. } = &self.kind {
            out.push_str("# deck\n");
            for (k, perm) in deck.iter().zip(action) {
                out.push_str(&k.to_string());
                for y in perm {
                    out.push_str(&format!(" {y}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// BFS to hop radius `radius`, writing distances into `dist` (which must
/// be all [`UNREACHABLE`] on entry) and returning the visited vertices.
pub(crate) fn bounded_bfs(g: &Graph, source: usize, radius: usize, dist: &mut [usize]) -> Vec<usize> {
    let mut visited = vec![source];
    dist[source] = 0;
    let mut head = 0;
    while head < visited.len() {
        let u = visited[head];
        head += 1;
        if dist[u] == radius {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[u] + 1;
                visited.push(w);
            }
        }
    }
    visited
}

/// `R ↦ N_R` for a sequence of covers, one per component.
#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessProfile {
    pub grid: Vec<u64>,
    /// `passes[i][n]`: cover `n` verifies at `grid[i]`.
    pub passes: Vec<Vec<bool>>,
    /// Least `N` past which every cover passes; `None` when the prefix is exhausted.
    pub n_r: Vec<Option<usize>>,
}

impl FaithfulnessProfile {
    pub fn compute(covers: &[CoverMap], grid: &[u64]) -> Result<Self> {
        let mut passes = Vec::with_capacity(grid.len());
        let mut n_r = Vec::with_capacity(grid.len());
        for &r in grid {
            let row = covers
                .iter()
                .map(|c| c.verify_metric_cover(r).map(|chk| chk.passed))
                .collect::<Result<Vec<_>>>()?;
            let first_failing_tail = row.iter().rposition(|&p| !p).map_or(0, |i| i + 1);
            n_r.push((first_failing_tail < row.len() || row.is_empty()).then_some(first_failing_tail));
            passes.push(row);
        }
        Ok(FaithfulnessProfile {
            grid: grid.to_vec(),
            passes,
            n_r,
        })
    }

    /// `Err(ProfileIncomplete)` for the first radius without an `N_R`.
    pub fn require_complete(&self) -> Result<Vec<usize>> {
        self.grid
            .iter()
            .zip(&self.n_r)
            .map(|(&r, n)| n.ok_or(Error::ProfileIncomplete { radius: r }))
            .collect()
    }

    /// `N_R` nondecreasing along an increasing grid (where defined).
    pub fn is_monotone(&self) -> bool {
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by_key(|&i| self.grid[i]);
        let mut last = 0;
        for i in order {
            match self.n_r[i] {
                Some(n) if n < last => return false,
                Some(n) => last = n,
                None => last = usize::MAX,
            }
        }
        true
    }
}

/// Truncation depth at which a universal cover of `g` can be checked at
/// radius `radius` from every base vertex: the closed radius plus the
/// eccentricity of `base_vertex`.
pub fn full_check_depth(g: &Graph, base_vertex: usize, radius: u64) -> usize {
    let ecc = g.bfs_distances(base_vertex).into_iter().max().unwrap_or(0);
    radius.saturating_sub(1) as usize + ecc
}

/// `⌊girth/2⌋`, the metric-cover radius of a universal cover; `None` for trees.
pub fn universal_cover_radius(g: &Graph) -> Option<u64> {
    match g.girth() {
        Girth::Cycle(n) => Some(n as u64 / 2),
        Girth::Acyclic => None,
    }
}

/// Projection lookup from base vertex to its preimages, ascending.
pub fn fibers(c: &CoverMap) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); c.base.vertex_count()];
    for (x, &b) in c.projection.iter().enumerate() {
        out[b].push(x);
    }
    out
}

/// Inverse of the fundamental-domain listing: total vertex → base index
/// for vertices in the domain.
pub fn domain_index(domain: &[usize]) -> HashMap<usize, usize> {
    domain.iter().enumerate().map(|(b, &x)| (x, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{binary_tree, complete_graph, cycle_graph, petersen_graph};

    #[test]
    fn double_cover_of_cycle() {
        let t = QuotientTower::cyclic(3, 2, 3).unwrap();
        let c = CoverMap::from_tower(&t, 2, 1).unwrap();
        assert_eq!(c.total().vertex_count(), 12);
        assert_eq!(c.base().vertex_count(), 6);
        let CoverKind::FiniteGalois { deck, action, domain } = c.kind() else {
            panic!("expected a Galois cover")
        };
        assert_eq!(deck.len(), 2);
        assert_eq!(domain, &[0, 1, 2, 3, 4, 5]);
        assert!(fibers(&c).iter().all(|f| f.len() == 2));
        assert!(c.is_graph_surjection());
        // deck maps edges to edges and commutes with π
        for perm in action {
            for &(u, v) in c.total().edges() {
                assert!(c.total().has_edge(perm[u], perm[v]));
            }
            for (x, &px) in perm.iter().enumerate() {
                assert_eq!(c.project(px), c.project(x));
            }
        }
        // open balls: C12 → C6 is a 3-metric cover, not 4
        assert_eq!(c.metric_cover_radius(10).unwrap(), 3);
    }

    #[test]
    fn truncated_sizes() {
        let k4 = complete_graph(4).unwrap();
        let c = CoverMap::truncated_universal(&k4, 0, 2).unwrap();
        assert_eq!(c.total().vertex_count(), 10);
        assert!(c.total().is_tree());
        assert!(c.is_graph_surjection());
        let c5 = cycle_graph(5).unwrap();
        let c = CoverMap::truncated_universal(&c5, 0, 2).unwrap();
        assert_eq!(c.total().vertex_count(), 5);
        assert_eq!(c.total().max_degree(), 2);
        let tree = binary_tree(3).unwrap();
        let c = CoverMap::truncated_universal(&tree, 0, 4).unwrap();
        assert!(matches!(c.kind(), CoverKind::Identity));
        assert!(c.notice().is_some());
    }

    #[test]
    fn universal_radius_is_half_girth() {
        for g in [
            cycle_graph(5).unwrap(),
            cycle_graph(8).unwrap(),
            petersen_graph(),
            complete_graph(5).unwrap(),
        ] {
            let girth = g.girth().cycle_length().unwrap() as u64;
            let depth = full_check_depth(&g, 0, girth);
            let c = CoverMap::truncated_universal(&g, 0, depth).unwrap();
            let at = c.verify_metric_cover(girth / 2).unwrap();
            assert!(at.passed);
            assert_eq!(at.base_vertices_covered, g.vertex_count());
            let above = c.verify_metric_cover(girth / 2 + 1).unwrap();
            assert!(!above.passed);
            let fail = c.verify_metric_cover(girth).unwrap();
            assert!(!fail.passed && fail.witness.is_some());
        }
    }

    #[test]
    fn shallow_truncation() {
        let c = CoverMap::truncated_universal(&cycle_graph(6).unwrap(), 0, 2).unwrap();
        assert!(matches!(
            c.verify_metric_cover(5),
            Err(Error::TruncationTooShallow { radius: 5, depth: 2 })
        ));
    }

    #[test]
    fn identity_always_passes() {
        let c = CoverMap::identity(&petersen_graph());
        for r in [1, 3, 10] {
            assert!(c.verify_metric_cover(r).unwrap().passed);
        }
    }

    #[test]
    fn profile_of_cycles() {
        let covers: Vec<_> = (3..=12)
            .map(|n| {
                let g = cycle_graph(n).unwrap();
                CoverMap::truncated_universal(&g, 0, full_check_depth(&g, 0, 6)).unwrap()
            })
            .collect();
        let grid = [1, 2, 3, 4, 5, 6];
        let p = FaithfulnessProfile::compute(&covers, &grid).unwrap();
        for (i, &r) in grid.iter().enumerate() {
            // least n with ⌊n/2⌋ ≥ R, as an index into 3..=12
            let n = (3..).find(|&n| n / 2 >= r as usize).unwrap();
            assert_eq!(p.n_r[i], Some(n - 3), "R = {r}");
        }
        assert!(p.is_monotone());

        let bounded: Vec<_> = (0..4)
            .map(|_| {
                let g = cycle_graph(4).unwrap();
                CoverMap::truncated_universal(&g, 0, 12).unwrap()
            })
            .collect();
        let p = FaithfulnessProfile::compute(&bounded, &[10]).unwrap();
        assert_eq!(p.require_complete(), Err(Error::ProfileIncomplete { radius: 10 }));

        let ids: Vec<_> = (3..6).map(|n| CoverMap::identity(&complete_graph(n).unwrap())).collect();
        let p = FaithfulnessProfile::compute(&ids, &[1, 5, 50]).unwrap();
        assert_eq!(p.require_complete().unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn dump_sections() {
        let t = QuotientTower::cyclic(3, 2, 2).unwrap();
        let d = CoverMap::from_tower(&t, 1, 0).unwrap().to_dump();
        for section in ["# base", "# total", "# projection", "# deck"] {
            assert!(d.contains(section));
        }
    }
}
