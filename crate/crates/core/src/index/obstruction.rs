use rayon::prelude::*;

use crate::covers::CoverMap;
use crate::error::{Error, Result};
use crate::graphs::SpaceOfGraphs;
use crate::linalg;
use crate::operators::{lift, IndexSpace};
use crate::spectral::{heat_limit_time, laplacian, spectral_reports, SpectralOptions};

/// Truncation depth of the universal cover used for each component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthRule {
    Fixed(usize),
    /// `factor · girth(G_n)`; acyclic components use `factor`.
    GirthMultiple(usize),
}

impl DepthRule {
    fn depth(self, girth: Option<usize>) -> usize {
        match self {
            DepthRule::Fixed(l) => l,
            DepthRule::GirthMultiple(f) => f * girth.unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObstructionConfig {
    pub depth: DepthRule,
    /// Walk-length margin removed from the truncated tree.
    pub margin: usize,
    /// `t*_n = ln(1/tol) / min_{k ≤ n} gap_k`.
    pub tol: f64,
    /// Extra times evaluated alongside `t*_n`.
    pub times: Vec<f64>,
    /// Relative slack allowed in the monotonicity of the `t*` ratios.
    pub monotone_slack: f64,
    pub spectral: SpectralOptions,
}

impl Default for ObstructionConfig {
    fn default() -> Self {
        ObstructionConfig {
            depth: DepthRule::Fixed(5),
            margin: 1,
            tol: 1e-6,
            times: Vec::new(),
            monotone_slack: 1e-3,
            spectral: SpectralOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionRow {
    pub component: usize,
    pub order: usize,
    pub t: f64,
    /// Whether `t` is the component's `t*`.
    pub is_t_star: bool,
    /// `Tr(P_n e^{-tΔ} P_n)`.
    pub base_trace: f64,
    /// `‖P_int e^{-tΔ̃} P_int‖` on the truncated universal cover.
    pub lifted_norm: f64,
    /// Bottom of the spectrum of the lifted Laplacian compressed to the interior.
    pub g0: f64,
    /// Bottom of the spectrum of the lifted Laplacian on the whole truncation;
    /// `e^{-t·g0_full}` bounds `lifted_norm`.
    pub g0_full: f64,
    /// `e^{-t·g0}`.
    pub bound: f64,
    pub ratio: f64,
    pub depth: usize,
    /// Interior vertices over all total vertices.
    pub interior_fraction: f64,
}

impl ObstructionRow {
    pub const CSV_HEADER: &'static str = "n,|G_n|,t,t_star,base_trace,lifted_norm,g0,g0_full,bound,ratio,depth,interior_fraction";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.6}",
            self.component,
            self.order,
            self.t,
            self.is_t_star,
            self.base_trace,
            self.lifted_norm,
            self.g0,
            self.g0_full,
            self.bound,
            self.ratio,
            self.depth,
            self.interior_fraction
        )
    }
}

#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub rows: Vec<ObstructionRow>,
    pub dropped: Vec<(usize, Error)>,
    /// `t*_n` per component, dropped components included.
    pub t_star: Vec<f64>,
    /// The `t*` ratios are nonincreasing in `n` up to the slack.
    pub ratio_monotone: bool,
}

impl ObstructionReport {
    pub fn t_star_rows(&self) -> impl Iterator<Item = &ObstructionRow> {
        self.rows.iter().filter(|r| r.is_t_star)
    }
}

/// Heat decay on the base cutdowns against the lifted heat operator on a
/// truncated universal cover of each component.
///
/// The base side is `Σ_λ e^{-tλ}` over the spectrum of `Δ_n`; the lifted
/// side compresses `e^{-t·lift(Δ_n)}` to the interior of the truncation.
/// Components whose cover is not faithful enough to lift `Δ_n` are dropped.
pub fn ghost_obstruction_experiment(x: &SpaceOfGraphs, cfg: &ObstructionConfig) -> Result<ObstructionReport> {
    let reports = spectral_reports(x, &cfg.spectral)?;
    let mut running = f64::INFINITY;
    let mut t_star = Vec::with_capacity(reports.len());
    for (n, r) in reports.iter().enumerate() {
        let gap = r.gap.ok_or(Error::NoSpectralGap { component: n })?;
        running = running.min(gap);
        t_star.push(heat_limit_time(running, cfg.tol));
    }
    let results: Vec<Result<Vec<ObstructionRow>>> = (0..x.len())
        .into_par_iter()
        .map(|n| {
            let g = x.component(n);
            let depth = cfg.depth.depth(g.girth().cycle_length());
            let cover = CoverMap::truncated_universal(g, 0, depth)?;
            let base = IndexSpace::graph(format!("G{n}"), g);
            let total = IndexSpace::cover_total(format!("G{n}~"), &cover);
            let delta = laplacian(g, base, 1)?;
            let lifted = lift(&delta, &cover, total).map_err(|e| match e {
                Error::FaithfulnessTooSmall { required, witness, .. } => Error::FaithfulnessTooSmall {
                    component: Some(n),
                    required,
                    witness,
                },
                other => other,
            })?;
            let dense = lifted.to_dense();
            let (values, vectors) = linalg::hermitian_eigen(&dense);
            let g0_full = values[0];
            let interior = cover.interior(cfg.margin);
            let g0 = linalg::hermitian_eigenvalues(&dense.select_rows(&interior).select_columns(&interior))[0];
            let interior_fraction = interior.len() as f64 / cover.total().vertex_count() as f64;
            let times = std::iter::once((t_star[n], true)).chain(cfg.times.iter().map(|&t| (t, false)));
            Ok(times
                .map(|(t, is_t_star)| {
                    let base_trace: f64 = reports[n].eigenvalues.iter().map(|l| (-t * l).exp()).sum();
                    let v = vectors.select_rows(&interior);
                    let weighted = v.map_with_location(|_, j, z| z * (-t * values[j]).exp());
                    let lifted_norm = linalg::spectral_norm(&(&weighted * v.adjoint()));
                    ObstructionRow {
                        component: n,
                        order: g.vertex_count(),
                        t,
                        is_t_star,
                        base_trace,
                        lifted_norm,
                        g0,
                        g0_full,
                        bound: (-t * g0).exp(),
                        ratio: lifted_norm / base_trace,
                        depth,
                        interior_fraction,
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(mut v) => rows.append(&mut v),
            Err(e @ Error::FaithfulnessTooSmall { .. }) => dropped.push((n, e)),
            Err(e) => return Err(e),
        }
    }
    let ratios: Vec<f64> = rows.iter().filter(|r| r.is_t_star).map(|r| r.ratio).collect();
    let ratio_monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + cfg.monotone_slack));
    Ok(ObstructionReport {
        rows,
        dropped,
        t_star,
        ratio_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, cycle_graph};

    #[test]
    fn cycles_do_not_decay() {
        let x = SpaceOfGraphs::new((6..=10).map(|n| cycle_graph(n).unwrap()).collect()).unwrap();
        let cfg = ObstructionConfig {
            depth: DepthRule::GirthMultiple(4),
            ..ObstructionConfig::default()
        };
        let r = ghost_obstruction_experiment(&x, &cfg).unwrap();
        assert!(r.dropped.is_empty());
        for row in r.t_star_rows() {
            assert!((row.base_trace - 1.0).abs() < 1e-3, "{row:?}");
            assert!(row.lifted_norm > 0.5, "{row:?}");
            assert!(row.lifted_norm <= (-row.t * row.g0_full).exp() + 1e-9);
            assert!(row.g0 >= row.g0_full);
        }
    }

    #[test]
    fn complete_graphs_are_dropped() {
        let x = SpaceOfGraphs::new((3..=5).map(|n| complete_graph(n).unwrap()).collect()).unwrap();
        let r = ghost_obstruction_experiment(&x, &ObstructionConfig::default()).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.dropped.len(), 3);
        assert!(r
            .dropped
            .iter()
            .all(|(_, e)| matches!(e, Error::FaithfulnessTooSmall { required: 2, .. })));
    }
}
