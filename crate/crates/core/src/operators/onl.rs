use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg;

use super::BlockOperator;

/// Best norm-localizing vector found by an exhaustive ball search.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationResult {
    /// `‖Tξ‖ / ‖T‖` for the witness `ξ`.
    pub ratio: f64,
    pub center: usize,
    /// Hop radius of the candidate balls, `⌊S/2⌋`.
    pub radius: u64,
    /// Diameter of the witness support.
    pub support_diameter: u64,
    pub support: Vec<usize>,
    /// Unit vector of length `|X|·k`, zero off the support.
    pub witness: Vec<Complex64>,
    pub localized_norm: f64,
    pub operator_norm: f64,
}

/// For every centre, the largest singular value of `T` restricted to the
/// columns of the ball of radius `⌊S/2⌋` (diameter at most `S`); returns
/// the best ratio against `‖T‖`. Ties go to the smallest centre.
pub fn onl_search(t: &BlockOperator, s: u64) -> LocalizationResult {
    let n = t.space().len();
    let k = t.fiber_dim();
    let radius = s / 2;
    let norm = t.operator_norm();
    let adj = t.adjoint();
    let space = t.space();
    let candidates: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|c| {
            let ball = ball(t, c, radius);
            let rows = touched_rows(&adj, &ball);
            let m = t.compress_dense(&rows, &ball);
            (linalg::spectral_norm(&m), c)
        })
        .collect();
    let (best, center) = candidates
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, usize::MAX), |acc, cand| if cand.0 > acc.0 { cand } else { acc });
    let support = ball(t, center, radius);
    let rows = touched_rows(&adj, &support);
    let m = t.compress_dense(&rows, &support);
    let mut witness = vec![Complex64::new(0.0, 0.0); n * k];
    let localized_norm = if rows.is_empty() {
        witness[support[0] * k] = Complex64::new(1.0, 0.0);
        0.0
    } else {
        let (sigma, v) = linalg::top_right_singular(&m);
        for (j, &y) in support.iter().enumerate() {
            for a in 0..k {
                witness[y * k + a] = v[j * k + a];
            }
        }
        sigma
    };
    let support_diameter = support
        .iter()
        .flat_map(|&a| support.iter().map(move |&b| (a, b)))
        .map(|(a, b)| space.distance(a, b))
        .max()
        .unwrap_or(0);
    LocalizationResult {
        ratio: if norm > 0.0 { best / norm } else { 0.0 },
        center,
        radius,
        support_diameter,
        support,
        witness,
        localized_norm,
        operator_norm: norm,
    }
}

fn ball(t: &BlockOperator, c: usize, radius: u64) -> Vec<usize> {
    let space = t.space();
    match space.graph_ref() {
        Some(g) => {
            let mut dist = vec![crate::graphs::UNREACHABLE; g.vertex_count()];
            let mut b = crate::covers::bounded_bfs(g, c, radius as usize, &mut dist);
            b.sort_unstable();
            b
        }
        None => (0..space.len()).filter(|&y| space.distance(c, y) <= radius).collect(),
    }
}

fn touched_rows(adj: &BlockOperator, cols: &[usize]) -> Vec<usize> {
    let mut rows: Vec<usize> = cols.iter().flat_map(|&y| adj.row(y).map(|(x, _)| x)).collect();
    rows.sort_unstable();
    rows.dedup();
    rows
}
