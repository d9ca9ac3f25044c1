use crate::error::{Error, Result};
use crate::graphs::SpaceOfGraphs;
use crate::linalg::{self, CMatrix};

use super::BlockOperator;

/// Largest block norm inside each component, and its tail suprema.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostProfile {
    /// `γ(n) = max_{x,y ∈ G_n} ‖T_{x,y}‖`.
    pub gamma: Vec<f64>,
    /// `sup_{n ≥ m} γ(n)`.
    pub tail_sup: Vec<f64>,
}

impl GhostProfile {
    /// Whether the tail supremum drops below `tol` within the prefix.
    pub fn vanishes_below(&self, tol: f64) -> bool {
        self.tail_sup.last().is_some_and(|&t| t < tol)
    }
}

fn check_indexed(t: &BlockOperator, x: &SpaceOfGraphs) -> Result<()> {
    if t.space().len() != x.total_vertices() {
        return Err(Error::IndexSpaceMismatch {
            left: format!("{}[{}]", t.space().id(), t.space().len()),
            right: format!("space of graphs[{}]", x.total_vertices()),
        });
    }
    Ok(())
}

pub fn ghost_profile(t: &BlockOperator, x: &SpaceOfGraphs) -> Result<GhostProfile> {
    check_indexed(t, x)?;
    let mut gamma = vec![0.0_f64; x.len()];
    for (a, b, _) in t.blocks() {
        let (n, _) = x.locate(a);
        if x.range(n).contains(&b) {
            gamma[n] = gamma[n].max(t.block_norm(a, b));
        }
    }
    let mut tail_sup = gamma.clone();
    for n in (0..tail_sup.len().saturating_sub(1)).rev() {
        tail_sup[n] = tail_sup[n].max(tail_sup[n + 1]);
    }
    Ok(GhostProfile { gamma, tail_sup })
}

/// `‖[T, P_n]‖` for each component projection `P_n`.
///
/// The commutator splits into `(1 - P_n) T P_n` and `P_n T (1 - P_n)`,
/// which act between orthogonal ranges; its norm is the larger of the two.
pub fn commutator_decay(t: &BlockOperator, x: &SpaceOfGraphs) -> Result<Vec<f64>> {
    check_indexed(t, x)?;
    let n_comp = x.len();
    let mut out_blocks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_comp];
    let mut in_blocks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_comp];
    for (a, b, _) in t.blocks() {
        let (na, _) = x.locate(a);
        let (nb, _) = x.locate(b);
        if na != nb {
            out_blocks[na].push((a, b));
            in_blocks[nb].push((a, b));
        }
    }
    let piece_norm = |pairs: &[(usize, usize)]| {
        if pairs.is_empty() {
            return 0.0;
        }
        let mut rows: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut cols: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let m: CMatrix = t.compress_dense(&rows, &cols);
        linalg::spectral_norm(&m)
    };
    Ok((0..n_comp).map(|n| piece_norm(&out_blocks[n]).max(piece_norm(&in_blocks[n]))).collect())
}
