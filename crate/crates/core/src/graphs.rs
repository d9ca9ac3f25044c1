//! Finite connected simple graphs with their edge metric, and spaces of
//! graphs `X = G_0 ⊔ G_1 ⊔ ...` with an explicit cross-component metric.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Distance value used for unreachable vertices in raw BFS output.
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edges.len())
            .finish()
    }
}

/// Girth of a graph: the length of its shortest cycle, or the sentinel for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Cycle(usize),
    Acyclic,
}

impl Girth {
    pub fn cycle_length(self) -> Option<usize> {
        match self {
            Girth::Cycle(g) => Some(g),
            Girth::Acyclic => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Cycle(g) => write!(f, "{g}"),
            Girth::Acyclic => f.write_str("acyclic"),
        }
    }
}

impl Graph {
    /// Validates an edge list over vertices `0..=max_id`.
    ///
    /// Rejects self-loops, repeated edges (in either orientation) and
    /// disconnected input. A vertex id that never occurs in the list is
    /// isolated, hence reported as a disconnection.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyEdgeList);
        }
        let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            canonical.push(e);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        canonical.sort_unstable();
        let g = Graph {
            adjacency,
            edges: canonical,
            labels: None,
        };
        if let Some(v) = g.first_unreachable() {
            return Err(Error::DisconnectedGraph { unreachable: v });
        }
        Ok(g)
    }

    /// Builds from adjacency lists produced by a trusted generator.
    pub(crate) fn from_adjacency_unchecked(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut edges = Vec::new();
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            for &v in nbrs.iter() {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        debug_assert!(adjacency.iter().enumerate().all(|(u, n)| !n.contains(&u)));
        Graph {
            adjacency,
            edges,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.vertex_count(), "one label per vertex");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.max_degree();
        (self.min_degree() == d).then_some(d)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count()
    }

    fn first_unreachable(&self) -> Option<usize> {
        let dist = self.bfs_distances(0);
        dist.iter().position(|&d| d == UNREACHABLE)
    }

    /// Hop distances from `source`; [`UNREACHABLE`] where no path exists.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.vertex_count();
        let mut d = Vec::with_capacity(n * n);
        for s in 0..n {
            d.extend(self.bfs_distances(s).into_iter().map(|x| x as u32));
        }
        DistanceMatrix { n, d }
    }

    pub fn diameter(&self) -> usize {
        (0..self.vertex_count())
            .map(|s| self.bfs_distances(s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Exact girth by BFS from every vertex, ignoring the tree edge back to
    /// the BFS parent. Any non-tree edge `(u, w)` closes a cycle of length
    /// at most `d(u) + d(w) + 1`, and the minimum over all roots is attained.
    pub fn girth(&self) -> Girth {
        if self.is_tree() {
            return Girth::Acyclic;
        }
        let n = self.vertex_count();
        let mut best = usize::MAX;
        let mut dist = vec![UNREACHABLE; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist.iter_mut().for_each(|d| *d = UNREACHABLE);
            queue.clear();
            dist[s] = 0;
            parent[s] = usize::MAX;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &w in &self.adjacency[u] {
                    if dist[w] == UNREACHABLE {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        Girth::Cycle(best)
    }

    /// Edge-list text: one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format; blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| -> Result<usize> {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        message: format!("missing {what} vertex"),
                    })?
                    .parse()
                    .map_err(|e| Error::Parse {
                        line: i + 1,
                        message: format!("bad {what} vertex: {e}"),
                    })
            };
            let u = next("first")?;
            let v = next("second")?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected exactly two vertex ids".into(),
                });
            }
            edges.push((u, v));
        }
        Graph::from_edges(&edges)
    }
}

/// All-pairs hop distances of a graph, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl fmt::Debug for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistanceMatrix({}x{})", self.n, self.n)
    }
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.d[x * self.n + y] as usize
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.d[x * self.n..(x + 1) * self.n]
    }

    pub fn diameter(&self) -> usize {
        self.d.iter().copied().max().unwrap_or(0) as usize
    }
}

/// A finite prefix of a space of graphs.
///
/// Points are addressed globally (`0..total_vertices()`) in component
/// order. For `x ∈ G_n`, `y ∈ G_m` with `n ≠ m` the distance is
/// `ρ(n) + ρ(m)`, where `ρ(n) = n + 1 + max_{k ≤ n} diam(G_k)`.
#[derive(Clone, Debug)]
pub struct SpaceOfGraphs {
    components: Vec<Graph>,
    distances: Vec<DistanceMatrix>,
    offsets: Vec<usize>,
    rho: Vec<u64>,
}

impl SpaceOfGraphs {
    pub fn new(components: Vec<Graph>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let distances: Vec<DistanceMatrix> = components.iter().map(Graph::distance_matrix).collect();
        let mut offsets = Vec::with_capacity(components.len() + 1);
        let mut acc = 0;
        for g in &components {
            offsets.push(acc);
            acc += g.vertex_count();
        }
        offsets.push(acc);
        let mut rho = Vec::with_capacity(components.len());
        let mut max_diam = 0u64;
        for (n, d) in distances.iter().enumerate() {
            max_diam = max_diam.max(d.diameter() as u64);
            rho.push(n as u64 + 1 + max_diam);
        }
        Ok(SpaceOfGraphs {
            components,
            distances,
            offsets,
            rho,
        })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Graph] {
        &self.components
    }

    pub fn component(&self, n: usize) -> &Graph {
        &self.components[n]
    }

    pub fn component_distances(&self, n: usize) -> &DistanceMatrix {
        &self.distances[n]
    }

    pub fn rho(&self) -> &[u64] {
        &self.rho
    }

    pub fn total_vertices(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global index range of component `n`.
    pub fn range(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    pub fn global(&self, n: usize, local: usize) -> usize {
        self.offsets[n] + local
    }

    /// `(component, local index)` of a global point.
    pub fn locate(&self, x: usize) -> (usize, usize) {
        let n = self.offsets.partition_point(|&o| o <= x) - 1;
        (n, x - self.offsets[n])
    }

    /// `d(G_n, G_m)` for `n ≠ m`.
    pub fn component_distance(&self, n: usize, m: usize) -> u64 {
        debug_assert_ne!(n, m);
        self.rho[n] + self.rho[m]
    }

    pub fn distance(&self, x: usize, y: usize) -> u64 {
        let (n, a) = self.locate(x);
        let (m, b) = self.locate(y);
        if n == m {
            self.distances[n].get(a, b) as u64
        } else {
            self.component_distance(n, m)
        }
    }

    /// Smallest `N` with `d(G_n, G_m) > R` for every `n ≥ N` and `m ≠ n`
    /// in the materialized prefix.
    pub fn component_separation(&self, radius: f64) -> Result<usize> {
        let len = self.len();
        if len == 1 {
            return Ok(0);
        }
        // ρ is increasing, so the closest other component is 0 (or 1 for n = 0).
        let separated = |n: usize| {
            let nearest = if n == 0 { 1 } else { 0 };
            self.component_distance(n, nearest) as f64 > radius
        };
        if !separated(len - 1) {
            return Err(Error::PrefixTooShort { radius, components: len });
        }
        let mut n_r = len - 1;
        while n_r > 0 && separated(n_r - 1) {
            n_r -= 1;
        }
        Ok(n_r)
    }
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InfeasibleDegreeSequence(format!("cycle needs n >= 3, got {n}")));
    }
    let adjacency = (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InfeasibleDegreeSequence(format!("complete graph needs n >= 2, got {n}")));
    }
    let adjacency = (0..n).map(|v| (0..n).filter(|&w| w != v).collect()).collect();
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InfeasibleDegreeSequence(format!("path needs n >= 2, got {n}")));
    }
    let edges: Vec<_> = (0..n - 1).map(|v| (v, v + 1)).collect();
    Graph::from_edges(&edges)
}

/// Complete binary tree with levels `0..=depth` (`2^(depth+1) - 1` vertices).
/// Vertex `v > 0` has parent `(v - 1) / 2`.
pub fn binary_tree(depth: usize) -> Result<Graph> {
    if depth == 0 || depth > 20 {
        return Err(Error::InfeasibleDegreeSequence(format!("binary tree depth {depth} out of range 1..=20")));
    }
    let n = (1usize << (depth + 1)) - 1;
    let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    Graph::from_edges(&edges)
}

/// The Petersen graph: outer 5-cycle, inner pentagram, five spokes.
pub fn petersen_graph() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, 5 + i));
    }
    Graph::from_edges(&edges).expect("Petersen graph is valid")
}

/// Random `d`-regular simple connected graph from the configuration model.
///
/// Pairings with loops, repeated edges or several components are rejected
/// and redrawn; the stream is a ChaCha8 generator seeded with `seed`, so
/// the output is a pure function of `(n, d, seed)`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    const MAX_ATTEMPTS: usize = 100_000;
    if n < 3 || d == 0 || d >= n || (n * d) % 2 != 0 {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "need n >= 3, 0 < d < n and n*d even (n = {n}, d = {d})"
        )));
    }
    if d == 1 {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "a 1-regular graph on {n} vertices is never connected"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        match Graph::from_edges(&edges) {
            Ok(g) => return Ok(g),
            Err(Error::DisconnectedGraph { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InfeasibleDegreeSequence(format!(
        "no simple connected pairing found in {MAX_ATTEMPTS} attempts (n = {n}, d = {d})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.girth(), Girth::Cycle(3));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Graph::from_edges(&[(0, 1), (2, 3)]), Err(Error::DisconnectedGraph { unreachable: 2 }));
        assert_eq!(Graph::from_edges(&[(0, 1), (1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(Graph::from_edges(&[(0, 1), (1, 2), (1, 0)]), Err(Error::DuplicateEdge(1, 0)));
        assert_eq!(Graph::from_edges(&[]), Err(Error::EmptyEdgeList));
        // vertex 1 never appears
        assert!(matches!(Graph::from_edges(&[(0, 2)]), Err(Error::DisconnectedGraph { unreachable: 1 })));
    }

    #[test]
    fn petersen_is_cubic() {
        let g = petersen_graph();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn small_distances() {
        let c6 = cycle_graph(6).unwrap().distance_matrix();
        assert_eq!(c6.get(0, 3), 3);
        let k5 = complete_graph(5).unwrap().distance_matrix();
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(k5.get(x, y), usize::from(x != y));
            }
        }
        assert_eq!(petersen_graph().diameter(), 2);
    }

    #[test]
    fn cycle_girths() {
        for n in 3..=12 {
            assert_eq!(cycle_graph(n).unwrap().girth(), Girth::Cycle(n));
        }
        assert_eq!(binary_tree(3).unwrap().girth(), Girth::Acyclic);
        assert_eq!(path_graph(7).unwrap().girth(), Girth::Acyclic);
        assert_eq!(complete_graph(4).unwrap().girth(), Girth::Cycle(3));
    }

    #[test]
    fn generators() {
        let c5 = cycle_graph(5).unwrap();
        assert_eq!((c5.girth(), c5.regular_degree()), (Girth::Cycle(5), Some(2)));
        let k4 = complete_graph(4).unwrap();
        assert_eq!((k4.girth(), k4.regular_degree()), (Girth::Cycle(3), Some(3)));
        let a = random_regular(20, 3, 7).unwrap();
        let b = random_regular(20, 3, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.regular_degree(), Some(3));
        assert!(random_regular(5, 3, 1).is_err());
        assert!(random_regular(4, 4, 1).is_err());
    }

    #[test]
    fn edge_list_format() {
        let g = Graph::parse_edge_list("# triangle\n0 1\n\n1 2\n2 0\n").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(matches!(Graph::parse_edge_list("0 1\n1 x\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn space_metric_rule() {
        let single = SpaceOfGraphs::new(vec![complete_graph(3).unwrap()]).unwrap();
        assert_eq!(single.distance(0, 2), 1);
        // ρ(0) = 0 + 1 + diam(C3) = 2, ρ(1) = 1 + 1 + max(1, 2) = 4
        let x = SpaceOfGraphs::new(vec![cycle_graph(3).unwrap(), cycle_graph(4).unwrap()]).unwrap();
        assert_eq!(x.rho(), &[2, 4]);
        assert_eq!(x.distance(0, 3), 6);
        assert_eq!(x.distance(3, 5), 2);
        assert_eq!(SpaceOfGraphs::new(vec![]).unwrap_err(), Error::EmptyFamily);
    }

    #[test]
    fn separation() {
        let x = SpaceOfGraphs::new((3..=5).map(|n| cycle_graph(n).unwrap()).collect()).unwrap();
        // ρ = [2, 4, 5]
        assert_eq!(x.component_separation(0.0).unwrap(), 0);
        let n_r = x.component_separation(6.0).unwrap();
        assert_eq!(n_r, 2);
        assert!(x.component_distance(1, 2) as f64 > 6.0);
        assert!(x.component_distance(0, 2) as f64 > 6.0);
        assert!(matches!(x.component_separation(100.0), Err(Error::PrefixTooShort { .. })));
    }

    #[test]
    fn locate_roundtrip() {
        let x = SpaceOfGraphs::new(vec![cycle_graph(3).unwrap(), complete_graph(4).unwrap()]).unwrap();
        for p in 0..x.total_vertices() {
            let (n, a) = x.locate(p);
            assert_eq!(x.global(n, a), p);
        }
        assert_eq!(x.locate(3), (1, 0));
    }
}
