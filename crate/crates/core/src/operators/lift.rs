use rayon::prelude::*;

use crate::covers::{bounded_bfs, CoverMap};
use crate::error::{Error, Result};
use crate::graphs::{SpaceOfGraphs, UNREACHABLE};

use super::{BlockOperator, IndexSpace};

fn check_base(t: &BlockOperator, cover: &CoverMap) -> Result<()> {
    if t.space().len() != cover.base().vertex_count() {
        return Err(Error::IndexSpaceMismatch {
            left: format!("{}[{}]", t.space().id(), t.space().len()),
            right: format!("cover base[{}]", cover.base().vertex_count()),
        });
    }
    Ok(())
}

/// Lifts `T` along `cover`: `T̃_{x,y} = T_{π(x), π(y)}` when
/// `d(x, y) ≤ prop(T)`, zero otherwise.
///
/// The cover must be a `2·prop(T)`-metric cover; otherwise the lift is
/// refused with the failing witness.
pub fn lift(t: &BlockOperator, cover: &CoverMap, total: IndexSpace) -> Result<BlockOperator> {
    check_base(t, cover)?;
    let required = 2 * t.propagation();
    let check = cover.verify_metric_cover(required)?;
    if !check.passed {
        return Err(Error::FaithfulnessTooSmall {
            component: None,
            required,
            witness: check.witness.map(|w| w.to_string()),
        });
    }
    Ok(lift_unchecked(t, cover, total))
}

/// [`lift`] without the faithfulness check.
pub fn lift_unchecked(t: &BlockOperator, cover: &CoverMap, total: IndexSpace) -> BlockOperator {
    assert_eq!(total.len(), cover.total().vertex_count());
    let s = t.propagation() as usize;
    let g = cover.total();
    let pi = cover.projection();
    let triplets: Vec<_> = (0..g.vertex_count())
        .into_par_iter()
        .map_init(
            || vec![UNREACHABLE; g.vertex_count()],
            |dist, x| {
                let ball = bounded_bfs(g, x, s, dist);
                let mut out = Vec::new();
                for &y in &ball {
                    if let Some(b) = t.get(pi[x], pi[y]) {
                        out.push((x, y, b.to_vec()));
                    }
                }
                for &y in &ball {
                    dist[y] = UNREACHABLE;
                }
                out
            },
        )
        .flatten()
        .collect();
    BlockOperator::from_triplets(total, t.fiber_dim(), triplets)
}

/// Component-wise lift of an operator on a space of graphs.
#[derive(Debug, Clone)]
pub struct LiftedFamily {
    /// `(component, lifted operator)` for every component that lifts.
    pub components: Vec<(usize, BlockOperator)>,
    /// Components left out, with the reason.
    pub dropped: Vec<(usize, Error)>,
}

impl LiftedFamily {
    /// Least `N` past which every component lifted.
    pub fn first_faithful(&self) -> Option<usize> {
        let last_dropped = self.dropped.iter().map(|(n, _)| *n).max();
        let n = last_dropped.map_or(0, |n| n + 1);
        self.components.iter().any(|(m, _)| *m >= n).then_some(n)
    }
}

/// Lifts the diagonal part of `T` component by component. Components
/// whose cover is not `2·prop`-faithful, or which `T` couples to another
/// component, are dropped and reported.
pub fn lift_family(t: &BlockOperator, x: &SpaceOfGraphs, covers: &[CoverMap]) -> Result<LiftedFamily> {
    if t.space().len() != x.total_vertices() || covers.len() != x.len() {
        return Err(Error::IndexSpaceMismatch {
            left: format!("{}[{}]", t.space().id(), t.space().len()),
            right: format!("space of graphs[{}] with {} covers", x.total_vertices(), covers.len()),
        });
    }
    let mut coupled = vec![false; x.len()];
    for (a, b, _) in t.blocks() {
        let (na, _) = x.locate(a);
        let (nb, _) = x.locate(b);
        if na != nb {
            coupled[na] = true;
            coupled[nb] = true;
        }
    }
    let results: Vec<_> = (0..x.len())
        .into_par_iter()
        .map(|n| {
            if coupled[n] {
                return Err(Error::NotSeparated { component: n });
            }
            let points: Vec<usize> = x.range(n).collect();
            let base = IndexSpace::graph(format!("{}/G{n}", t.space().id()), x.component(n));
            let tn = t.restrict(&points, base);
            let total = IndexSpace::cover_total(format!("{}/G{n}~", t.space().id()), &covers[n]);
            lift(&tn, &covers[n], total).map_err(|e| match e {
                Error::FaithfulnessTooSmall { required, witness, .. } => Error::FaithfulnessTooSmall {
                    component: Some(n),
                    required,
                    witness,
                },
                other => other,
            })
        })
        .collect();
    let mut components = Vec::new();
    let mut dropped = Vec::new();
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(op) => components.push((n, op)),
            Err(e) => dropped.push((n, e)),
        }
    }
    Ok(LiftedFamily { components, dropped })
}
