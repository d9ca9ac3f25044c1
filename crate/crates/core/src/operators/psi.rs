use num_complex::Complex64;

use crate::covers::{CoverKind, CoverMap};
use crate::error::{Error, Result};

use super::{BlockOperator, IndexSpace};

/// Invariance tolerance, relative to the largest entry.
const INVARIANCE_TOL: f64 = 1e-12;

/// `T^{(g)}_{b,c} = T̃_{D(b), g·D(c)}` for each deck element `g`, indexed by
/// base vertices through the fundamental domain `D`.
#[derive(Debug, Clone)]
pub struct PsiDecomposition {
    /// Deck elements as indices into the cover's deck list; `0` is the identity.
    pub deck: Vec<usize>,
    pub parts: Vec<BlockOperator>,
}

impl PsiDecomposition {
    /// The identity coefficient `T^{(e)}`.
    pub fn identity_part(&self) -> &BlockOperator {
        &self.parts[0]
    }

    pub fn nonzero_parts(&self) -> usize {
        self.parts.iter().filter(|p| p.nnz_blocks() > 0).count()
    }

    /// Rebuilds `T̃` from the parts via `T̃_{h·D(b), h·g·D(c)} = T^{(g)}_{b,c}`.
    pub fn reconstruct(&self, cover: &CoverMap, total: IndexSpace) -> Result<BlockOperator> {
        let CoverKind::FiniteGalois { action, domain, .. } = cover.kind() else {
            return Err(Error::NotGalois);
        };
        let k = self.parts[0].fiber_dim();
        let mut triplets = Vec::new();
        for h in action {
            for (g, part) in self.parts.iter().enumerate() {
                let ag = &action[g];
                for (b, c, block) in part.blocks() {
                    triplets.push((h[domain[b]], h[ag[domain[c]]], block.to_vec()));
                }
            }
        }
        Ok(BlockOperator::from_triplets(total, k, triplets))
    }
}

fn galois_parts(cover: &CoverMap) -> Result<(&[Vec<usize>], &[usize])> {
    match cover.kind() {
        CoverKind::FiniteGalois { action, domain, .. } => Ok((action, domain)),
        _ => Err(Error::NotGalois),
    }
}

/// Largest `|T̃_{gx,gy} - T̃_{x,y}|` over stored blocks and deck elements.
pub fn invariance_defect(t: &BlockOperator, cover: &CoverMap) -> Result<f64> {
    let (action, _) = galois_parts(cover)?;
    let k = t.fiber_dim();
    let zero = vec![Complex64::new(0.0, 0.0); k * k];
    let mut worst: f64 = 0.0;
    for (x, y, b) in t.blocks() {
        for g in action {
            let moved = t.get(g[x], g[y]).unwrap_or(&zero);
            for (u, v) in b.iter().zip(moved) {
                worst = worst.max((u - v).norm());
            }
        }
    }
    Ok(worst)
}

fn require_invariant(t: &BlockOperator, cover: &CoverMap) -> Result<()> {
    let worst = invariance_defect(t, cover)?;
    if worst > INVARIANCE_TOL * t.max_abs_entry().max(1.0) {
        return Err(Error::NotInvariant { worst });
    }
    Ok(())
}

pub fn psi_decompose(t: &BlockOperator, cover: &CoverMap, base: IndexSpace) -> Result<PsiDecomposition> {
    let (action, domain) = galois_parts(cover)?;
    if t.space().len() != cover.total().vertex_count() {
        return Err(Error::IndexSpaceMismatch {
            left: format!("{}[{}]", t.space().id(), t.space().len()),
            right: format!("cover total[{}]", cover.total().vertex_count()),
        });
    }
    require_invariant(t, cover)?;
    let mut in_domain = vec![usize::MAX; t.space().len()];
    for (b, &x) in domain.iter().enumerate() {
        in_domain[x] = b;
    }
    let parts = action
        .iter()
        .map(|g| {
            // T̃_{D(b), g·D(c)}: walk the stored row of D(b) and pull columns back through g
            let mut inv = vec![usize::MAX; g.len()];
            for (x, &gx) in g.iter().enumerate() {
                inv[gx] = x;
            }
            let mut triplets = Vec::new();
            for (b, &d) in domain.iter().enumerate() {
                for (y, block) in t.row(d) {
                    let c = in_domain[inv[y]];
                    if c != usize::MAX {
                        triplets.push((b, c, block.to_vec()));
                    }
                }
            }
            BlockOperator::from_triplets(base.clone(), t.fiber_dim(), triplets)
        })
        .collect();
    Ok(PsiDecomposition {
        deck: (0..action.len()).collect(),
        parts,
    })
}

/// `τ(T̃) = Σ_{x ∈ D} tr T̃_{x,x}`, the trace of the identity coefficient.
pub fn equivariant_trace(t: &BlockOperator, cover: &CoverMap) -> Result<Complex64> {
    let (_, domain) = galois_parts(cover)?;
    require_invariant(t, cover)?;
    let k = t.fiber_dim();
    Ok(domain
        .iter()
        .filter_map(|&x| t.get(x, x))
        .map(|b| (0..k).map(|i| b[i * k + i]).sum::<Complex64>())
        .sum())
}
