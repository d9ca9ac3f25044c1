//! Normalized Laplacians `Δ = 1 - D^{-1/2} A D^{-1/2}`, their spectra,
//! expander verdicts, heat operators and Kazhdan projections.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{Graph, SpaceOfGraphs};
use crate::groups::{Character, FiniteGroup, QuotientTower};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::operators::{BlockOperator, IndexSpace};

/// Eigenvalues below this count as kernel.
pub const KERNEL_TOL: f64 = 1e-9;

/// Tolerances and thresholds for spectral decisions.
#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub kernel_tol: f64,
    /// Smallest gap accepted as "uniform" over a finite prefix.
    pub gap_floor: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            kernel_tol: KERNEL_TOL,
            gap_floor: 0.05,
        }
    }
}

/// Dense real Laplacian of a graph.
pub fn laplacian_dense(g: &Graph) -> Result<RMatrix> {
    let n = g.vertex_count();
    if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();
    let mut m = RMatrix::identity(n, n);
    for &(u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    Ok(m)
}

fn laplacian_triplets(g: &Graph, offset: usize) -> Result<Vec<(usize, usize, Complex64)>> {
    let n = g.vertex_count();
    if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();
    let mut t: Vec<_> = (0..n).map(|v| (offset + v, offset + v, Complex64::new(1.0, 0.0))).collect();
    for &(u, v) in g.edges() {
        let w = Complex64::new(-inv_sqrt[u] * inv_sqrt[v], 0.0);
        t.push((offset + u, offset + v, w));
        t.push((offset + v, offset + u, w));
    }
    Ok(t)
}

/// `e_0 e_0*` on a `k`-dimensional fiber.
pub fn fiber_projection(k: usize) -> CMatrix {
    let mut q = CMatrix::zeros(k, k);
    q[(0, 0)] = Complex64::new(1.0, 0.0);
    q
}

/// Laplacian of `g` on `space`; for `k > 1` tensored with `e_0 e_0*`.
pub fn laplacian(g: &Graph, space: IndexSpace, k: usize) -> Result<BlockOperator> {
    assert_eq!(space.len(), g.vertex_count(), "index space must match the graph");
    let op = BlockOperator::from_scalars(space, laplacian_triplets(g, 0)?);
    Ok(if k == 1 { op } else { op.tensor_fiber(&fiber_projection(k)) })
}

/// Block-diagonal Laplacian of a space of graphs.
pub fn family_laplacian(x: &SpaceOfGraphs, space: IndexSpace, k: usize) -> Result<BlockOperator> {
    assert_eq!(space.len(), x.total_vertices());
    let mut t = Vec::new();
    for n in 0..x.len() {
        t.extend(laplacian_triplets(x.component(n), x.range(n).start)?);
    }
    let op = BlockOperator::from_scalars(space, t);
    Ok(if k == 1 { op } else { op.tensor_fiber(&fiber_projection(k)) })
}

/// Laplacian eigenvalues, ascending.
pub fn laplacian_spectrum(g: &Graph) -> Result<Vec<f64>> {
    let m = laplacian_dense(g)?;
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Spectral data of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub index: usize,
    pub order: usize,
    pub max_degree: usize,
    pub eigenvalues: Vec<f64>,
    pub kernel_multiplicity: usize,
    /// Smallest eigenvalue at or above the kernel threshold.
    pub gap: Option<f64>,
    pub top: f64,
    /// Eigenvalues in `(1, 2]`.
    pub above_one: usize,
}

impl SpectralReport {
    pub fn compute(index: usize, g: &Graph, opts: &SpectralOptions) -> Result<Self> {
        let eigenvalues = laplacian_spectrum(g)?;
        let kernel_multiplicity = eigenvalues.iter().filter(|&&l| l.abs() < opts.kernel_tol).count();
        let gap = eigenvalues.iter().copied().find(|&l| l >= opts.kernel_tol);
        let top = *eigenvalues.last().unwrap();
        let above_one = eigenvalues.iter().filter(|&&l| l > 1.0 + opts.kernel_tol).count();
        Ok(SpectralReport {
            index,
            order: g.vertex_count(),
            max_degree: g.max_degree(),
            eigenvalues,
            kernel_multiplicity,
            gap,
            top,
            above_one,
        })
    }

    pub const CSV_HEADER: &'static str = "n,|G_n|,max_degree,gap,top,kernel_mult";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.12e},{}",
            self.index,
            self.order,
            self.max_degree,
            self.gap.map_or("none".to_string(), |g| format!("{g:.12e}")),
            self.top,
            self.kernel_multiplicity
        )
    }

    /// Every eigenvalue lies in `[0, 2]` up to `tol`.
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|&l| (-tol..=2.0 + tol).contains(&l))
    }
}

pub fn spectral_reports(x: &SpaceOfGraphs, opts: &SpectralOptions) -> Result<Vec<SpectralReport>> {
    (0..x.len())
        .into_par_iter()
        .map(|n| SpectralReport::compute(n, x.component(n), opts))
        .collect()
}

/// Finite-prefix verdict on the three expander conditions.
///
/// With `head` the first half of the prefix and `tail` the second half:
/// (i) the largest degree in the tail does not exceed the largest in the
/// head; (ii) sizes strictly increase; (iii) every gap is at least the
/// floor and the smallest tail gap is at least half the smallest head gap.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderVerdict {
    pub degree_bounded: bool,
    pub sizes_increasing: bool,
    pub uniform_gap: bool,
    pub degree_bound: usize,
    /// Smallest gap over the prefix (0 when some component has none).
    pub min_gap: f64,
    pub gap_floor: f64,
    /// Components with eigenvalues in `(1, 2]`.
    pub flagged: Vec<usize>,
}

impl ExpanderVerdict {
    pub fn from_reports(reports: &[SpectralReport], gap_floor: f64) -> Self {
        let len = reports.len();
        let split = len / 2;
        let degree_bound = reports.iter().map(|r| r.max_degree).max().unwrap_or(0);
        let degree_bounded = len < 2 || {
            let head = reports[..split.max(1)].iter().map(|r| r.max_degree).max().unwrap();
            let tail = reports[split.max(1)..].iter().map(|r| r.max_degree).max().unwrap_or(0);
            tail <= head
        };
        let sizes_increasing = reports.windows(2).all(|w| w[1].order > w[0].order);
        let gaps: Vec<f64> = reports
            .iter()
            .map(|r| if r.kernel_multiplicity == 1 { r.gap.unwrap_or(0.0) } else { 0.0 })
            .collect();
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let min_gap = if min_gap.is_finite() { min_gap } else { 0.0 };
        let trend_ok = len < 2 || {
            let head = gaps[..split.max(1)].iter().copied().fold(f64::INFINITY, f64::min);
            let tail = gaps[split.max(1)..].iter().copied().fold(f64::INFINITY, f64::min);
            tail >= 0.5 * head
        };
        let uniform_gap = min_gap >= gap_floor && trend_ok;
        let flagged = reports.iter().filter(|r| r.above_one > 0).map(|r| r.index).collect();
        ExpanderVerdict {
            degree_bounded,
            sizes_increasing,
            uniform_gap,
            degree_bound,
            min_gap,
            gap_floor,
            flagged,
        }
    }

    pub fn is_expander(&self) -> bool {
        self.degree_bounded && self.sizes_increasing && self.uniform_gap
    }

    pub fn is_weak_expander(&self) -> bool {
        self.sizes_increasing && self.uniform_gap
    }

    pub fn label(&self) -> &'static str {
        if self.is_expander() {
            "expander"
        } else if self.is_weak_expander() {
            "weak expander"
        } else {
            "not a weak expander"
        }
    }
}

impl fmt::Display for ExpanderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verdict={} degree_bounded={} sizes_increasing={} uniform_gap={} degree_bound={} min_gap={:.12e} gap_floor={}",
            self.label().replace(' ', "_"),
            self.degree_bounded,
            self.sizes_increasing,
            self.uniform_gap,
            self.degree_bound,
            self.min_gap,
            self.gap_floor
        )
    }
}

/// Verdict and per-component reports for a space of graphs.
pub fn expander_certificate(x: &SpaceOfGraphs, opts: &SpectralOptions) -> Result<(ExpanderVerdict, Vec<SpectralReport>)> {
    let reports = spectral_reports(x, opts)?;
    Ok((ExpanderVerdict::from_reports(&reports, opts.gap_floor), reports))
}

/// `e^{-tΔ}` as a dense operator on `space`.
pub fn heat_operator(g: &Graph, space: IndexSpace, t: f64) -> Result<BlockOperator> {
    assert!(t >= 0.0, "heat time must be nonnegative");
    let m = laplacian_dense(g)?;
    let h = linalg::hermitian_function(&linalg::complexify(&m), |l| (-t * l).exp());
    Ok(BlockOperator::from_dense(space, 1, &h))
}

/// `t* = ln(1/tol)/gap`, the time at which `‖e^{-tΔ} - P_ker‖ ≤ tol`.
pub fn heat_limit_time(gap: f64, tol: f64) -> f64 {
    (1.0 / tol).ln() / gap
}

/// Unit kernel vector `√deg / ‖√deg‖` of a connected graph's Laplacian.
pub fn kernel_vector(g: &Graph) -> Vec<f64> {
    let v: Vec<f64> = g.degrees().into_iter().map(|d| (d as f64).sqrt()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Projection onto the Laplacian kernel of each component: `1/|G_n|`
/// entries on regular components, `v vᵀ` with `v ∝ √deg` otherwise.
/// Each component must have a one-dimensional kernel and a gap.
pub fn basic_kazhdan(x: &SpaceOfGraphs, space: IndexSpace) -> Result<BlockOperator> {
    let reports = spectral_reports(x, &SpectralOptions::default())?;
    basic_kazhdan_with_reports(x, space, &reports)
}

/// [`basic_kazhdan`] reusing already computed spectra.
pub fn basic_kazhdan_with_reports(x: &SpaceOfGraphs, space: IndexSpace, reports: &[SpectralReport]) -> Result<BlockOperator> {
    assert_eq!(space.len(), x.total_vertices());
    for r in reports {
        if r.kernel_multiplicity != 1 || r.gap.is_none() {
            return Err(Error::NoSpectralGap { component: r.index });
        }
    }
    let mut t = Vec::new();
    for n in 0..x.len() {
        let g = x.component(n);
        let off = x.range(n).start;
        let size = g.vertex_count();
        if g.regular_degree().is_some() {
            let w = Complex64::new(1.0 / size as f64, 0.0);
            for a in 0..size {
                for b in 0..size {
                    t.push((off + a, off + b, w));
                }
            }
        } else {
            let v = kernel_vector(g);
            for a in 0..size {
                for b in 0..size {
                    t.push((off + a, off + b, Complex64::new(v[a] * v[b], 0.0)));
                }
            }
        }
    }
    Ok(BlockOperator::from_scalars(space, t))
}

/// `(p_σ)_{g,h} = dim(σ)/|Q| · χ_σ(g⁻¹h)` on the Cayley graph of `q`.
pub fn kazhdan_projection(q: &FiniteGroup, sigma: &Character, space: IndexSpace) -> Result<BlockOperator> {
    let order = q.order();
    if sigma.values.len() != order {
        return Err(Error::InvalidCharacter(format!(
            "character has {} values for a group of order {order}",
            sigma.values.len()
        )));
    }
    if (sigma.values[q.identity()] - sigma.dim as f64).norm() > 1e-9 {
        return Err(Error::InvalidCharacter(format!(
            "value at the identity is {}, dimension is {}",
            sigma.values[q.identity()],
            sigma.dim
        )));
    }
    assert_eq!(space.len(), order);
    let scale = sigma.dim as f64 / order as f64;
    let inverses: Vec<usize> = (0..order).map(|g| q.inv(g)).collect();
    let t: Vec<_> = (0..order)
        .into_par_iter()
        .flat_map_iter(|g| {
            let inv = inverses[g];
            (0..order).map(move |h| (g, h, sigma.values[q.mul(inv, h)] * scale))
        })
        .collect();
    Ok(BlockOperator::from_scalars(space, t))
}

/// `p_σ` of a character of tower level `level` on the space of Cayley
/// graphs of the tower: inflated along the reductions to every higher
/// level, pushed down to the lower levels it factors through, and zero on
/// the rest.
pub fn tower_kazhdan_projection(tower: &QuotientTower, level: usize, sigma: &Character, space: IndexSpace) -> Result<BlockOperator> {
    let x = space.as_space().cloned().ok_or_else(|| Error::IndexSpaceMismatch {
        left: space.id().to_string(),
        right: "a space of graphs".into(),
    })?;
    if x.len() != tower.len() || (0..x.len()).any(|n| x.range(n).len() != tower.level(n).order()) {
        return Err(Error::IndexSpaceMismatch {
            left: space.id().to_string(),
            right: format!("tower with moduli {:?}", tower.moduli()),
        });
    }
    let mut triplets = Vec::new();
    for n in 0..tower.len() {
        let q = tower.level(n);
        let chi = if n >= level {
            sigma.pull_back(&tower.reduction(n, level)?)
        } else {
            match sigma.push_forward(&tower.reduction(level, n)?, q.order()) {
                Some(chi) => chi,
                None => continue,
            }
        };
        let local = IndexSpace::graph(format!("level{n}"), x.component(n));
        let p = kazhdan_projection(q, &chi, local)?;
        let off = x.range(n).start;
        triplets.extend(p.blocks().map(|(a, b, blk)| (off + a, off + b, blk.to_vec())));
    }
    Ok(BlockOperator::from_triplets(space, 1, triplets))
}
