//! Rips complexes at integer-valued scales and the component splitting of
//! a space of graphs.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::covers::bounded_bfs;
use crate::error::{Error, Result};
use crate::graphs::{Graph, SpaceOfGraphs, UNREACHABLE};

/// Largest supported dimension cap. The clique count of a ball grows like
/// `|B|^(cap+1)`.
pub const MAX_DIM_CAP: usize = 6;

/// Default bound on the number of enumerated simplices.
pub const MAX_SIMPLICES: usize = 5_000_000;

/// A finite metric space with integer distances.
pub trait FiniteMetric: Sync {
    fn point_count(&self) -> usize;

    /// Points `y > x` with `d(x, y) ≤ r`, ascending.
    fn forward_neighbors(&self, x: usize, r: u64) -> Vec<usize>;
}

impl FiniteMetric for Graph {
    fn point_count(&self) -> usize {
        self.vertex_count()
    }

    fn forward_neighbors(&self, x: usize, r: u64) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut ball = bounded_bfs(self, x, r as usize, &mut dist);
        ball.retain(|&y| y > x);
        ball.sort_unstable();
        ball
    }
}

impl FiniteMetric for SpaceOfGraphs {
    fn point_count(&self) -> usize {
        self.total_vertices()
    }

    fn forward_neighbors(&self, x: usize, r: u64) -> Vec<usize> {
        let (n, a) = self.locate(x);
        let row = self.component_distances(n).row(a);
        let mut out: Vec<usize> = (a + 1..row.len()).filter(|&b| row[b] as u64 <= r).map(|b| self.global(n, b)).collect();
        for m in n + 1..self.len() {
            if self.component_distance(n, m) <= r {
                out.extend(self.range(m));
            }
        }
        out
    }
}

/// Simplices of a Rips complex, by dimension up to a cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    radius: f64,
    dim_cap: usize,
    /// `simplices[d]`: sorted vertex tuples of length `d + 1`, in lexicographic order.
    simplices: Vec<Vec<Vec<usize>>>,
    /// Simplices of dimension `dim_cap + 1` exist but were not enumerated.
    truncated: bool,
}

impl SimplicialComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Highest dimension with a simplex.
    pub fn dimension(&self) -> usize {
        self.simplices.iter().rposition(|s| !s.is_empty()).unwrap_or(0)
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], |s| s.as_slice())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    /// Alternating sum of the counts up to the cap; only the Euler
    /// characteristic of the complex when not truncated.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        !simplex.is_empty() && self.simplices(simplex.len() - 1).binary_search_by(|s| s.as_slice().cmp(simplex)).is_ok()
    }

    /// Every codimension-one face of every simplex is present, and the
    /// 0-simplices are all the points.
    pub fn is_downward_closed(&self) -> bool {
        let vertices_ok = self.simplices(0).len() == self.vertex_count;
        vertices_ok
            && self.simplices.iter().skip(1).flatten().all(|s| {
                (0..s.len()).all(|i| {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
                    self.contains(&face)
                })
            })
    }

    /// Every simplex of `self` up to the common cap is a simplex of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        let cap = self.dim_cap.min(other.dim_cap);
        self.simplices.iter().take(cap + 1).flatten().all(|s| other.contains(s))
    }

    /// Connected components of the 1-skeleton, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.simplices(1) {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.vertex_count];
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(v);
        }
        groups
    }

    /// One line per simplex, `dim: v0 v1 ...`, by dimension then lexicographically.
    pub fn to_dump(&self) -> String {
        let mut out = format!("# rips radius {} dim_cap {} truncated {}\n", self.radius, self.dim_cap, self.truncated);
        for (d, list) in self.simplices.iter().enumerate() {
            for s in list {
                let verts: Vec<String> = s.iter().map(usize::to_string).collect();
                out.push_str(&format!("{d}: {}\n", verts.join(" ")));
            }
        }
        out
    }

    pub fn stats_csv(&self) -> String {
        let mut out = String::from("dim,count\n");
        for (d, s) in self.simplices.iter().enumerate() {
            out.push_str(&format!("{d},{}\n", s.len()));
        }
        out
    }
}

/// Cliques of pairwise distance at most `radius`, up to dimension `dim_cap`.
pub fn rips_complex<M: FiniteMetric + ?Sized>(x: &M, radius: f64, dim_cap: usize) -> Result<SimplicialComplex> {
    rips_complex_limited(x, radius, dim_cap, MAX_SIMPLICES)
}

/// [`rips_complex`] that gives up with `ComplexTooLarge` past `limit` simplices.
pub fn rips_complex_limited<M: FiniteMetric + ?Sized>(x: &M, radius: f64, dim_cap: usize, limit: usize) -> Result<SimplicialComplex> {
    if dim_cap > MAX_DIM_CAP {
        return Err(Error::DimCapTooLarge {
            cap: dim_cap,
            max: MAX_DIM_CAP,
        });
    }
    let n = x.point_count();
    let r = if radius < 0.0 { None } else { Some(radius.floor() as u64) };
    let forward: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|v| r.map_or_else(Vec::new, |r| x.forward_neighbors(v, r)))
        .collect();
    let budget = Budget {
        used: AtomicUsize::new(0),
        limit,
    };
    let per_start: Vec<(Vec<Vec<Vec<usize>>>, bool)> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![Vec::new(); dim_cap + 1];
            let mut truncated = false;
            extend(&forward, &mut vec![v], &forward[v], dim_cap, &mut out, &mut truncated, &budget);
            (out, truncated)
        })
        .collect();
    if budget.used.load(Ordering::Relaxed) > limit {
        return Err(Error::ComplexTooLarge { limit });
    }
    let mut simplices = vec![Vec::new(); dim_cap + 1];
    let mut truncated = false;
    for (lists, t) in per_start {
        truncated |= t;
        for (d, mut l) in lists.into_iter().enumerate() {
            simplices[d].append(&mut l);
        }
    }
    for s in &mut simplices {
        s.sort_unstable();
    }
    Ok(SimplicialComplex {
        vertex_count: n,
        radius,
        dim_cap,
        simplices,
        truncated,
    })
}

struct Budget {
    used: AtomicUsize,
    limit: usize,
}

fn extend(
    forward: &[Vec<usize>],
    clique: &mut Vec<usize>,
    candidates: &[usize],
    cap: usize,
    out: &mut [Vec<Vec<usize>>],
    truncated: &mut bool,
    budget: &Budget,
) {
    if budget.used.fetch_add(1, Ordering::Relaxed) >= budget.limit {
        return;
    }
    let d = clique.len() - 1;
    out[d].push(clique.clone());
    if d == cap {
        *truncated |= !candidates.is_empty();
        return;
    }
    for (i, &w) in candidates.iter().enumerate() {
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|c| forward[w].binary_search(c).is_ok())
            .collect();
        clique.push(w);
        extend(forward, clique, &next, cap, out, truncated, budget);
        clique.pop();
    }
}

/// `P_R(X) = P₀ ⊔ ⊔_{n ≥ N} P_R(G_n)`.
#[derive(Debug, Clone)]
pub struct RipsSplitting {
    pub radius: f64,
    /// Least `N` such that no Rips edge leaves `G_n` for `n ≥ N`.
    pub n_r: usize,
    /// `N_R` from the ρ-distances.
    pub separation: usize,
    /// The complex on the points of `G_0, …, G_{N-1}`.
    pub prefix: SimplicialComplex,
    /// `P_R(G_n)` for `n ≥ N`, in order.
    pub components: Vec<SimplicialComplex>,
    pub total: SimplicialComplex,
}

impl RipsSplitting {
    pub fn agrees(&self) -> bool {
        self.n_r == self.separation
    }

    /// Simplex counts of the parts add up to the whole, dimension by dimension.
    pub fn is_partition(&self) -> bool {
        let mut sum = self.prefix.counts();
        for c in &self.components {
            for (s, k) in sum.iter_mut().zip(c.counts()) {
                *s += k;
            }
        }
        sum == self.total.counts()
    }
}

pub fn rips_splitting(x: &SpaceOfGraphs, radius: f64, dim_cap: usize) -> Result<RipsSplitting> {
    let separation = x.component_separation(radius)?;
    let total = rips_complex(x, radius, dim_cap)?;
    let mut crossing = vec![false; x.len()];
    for e in total.simplices(1) {
        let (a, b) = (x.locate(e[0]).0, x.locate(e[1]).0);
        if a != b {
            crossing[a] = true;
            crossing[b] = true;
        }
    }
    let n_r = crossing.iter().rposition(|&c| c).map_or(0, |n| n + 1);
    if n_r == x.len() {
        return Err(Error::PrefixTooShort { radius, components: x.len() });
    }
    let prefix_end = if n_r == 0 { 0 } else { x.range(n_r - 1).end };
    let prefix = sub_complex(&total, 0..prefix_end);
    let components = (n_r..x.len())
        .map(|n| rips_complex(x.component(n), radius, dim_cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(RipsSplitting {
        radius,
        n_r,
        separation,
        prefix,
        components,
        total,
    })
}

fn sub_complex(c: &SimplicialComplex, points: std::ops::Range<usize>) -> SimplicialComplex {
    SimplicialComplex {
        vertex_count: points.len(),
        radius: c.radius,
        dim_cap: c.dim_cap,
        simplices: c
            .simplices
            .iter()
            .map(|l| {
                l.iter()
                    .filter(|s| points.contains(&s[0]))
                    .map(|s| s.iter().map(|v| v - points.start).collect())
                    .collect()
            })
            .collect(),
        truncated: c.truncated,
    }
}
