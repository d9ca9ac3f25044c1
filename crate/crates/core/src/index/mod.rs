//! The index idempotent `I(F)`, base and equivariant traces, per-component
//! d-sequences, and the trace-identity and heat-decay experiments.
//!
//! `I(F)` is formed with `S₀ = 1 - F*F` and `S₁ = 1 - FF*`:
//!
//! ```text
//! I(F) = [ 1 - S₁²        (1 + S₁) F S₀ ]
//!        [ S₀ F*          S₀²           ]
//! ```
//!
//! Each entry is stored as `scalar·1 + part`, so the scalar reduction is
//! read off exactly as `diag(1, 0)`.

mod obstruction;

pub use obstruction::{ghost_obstruction_experiment, DepthRule, ObstructionConfig, ObstructionReport, ObstructionRow};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::covers::CoverMap;
use crate::error::{Error, Result};
use crate::graphs::SpaceOfGraphs;
use crate::linalg;
use crate::operators::{equivariant_trace, lift_unchecked, BlockOperator, IndexSpace};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Idempotency defect below which a cutdown is rounded to a projection.
pub const RANK_DEFECT_THRESHOLD: f64 = 0.25;

/// `scalar·1 + part`.
#[derive(Debug, Clone)]
pub struct UnitizedEntry {
    pub scalar: Complex64,
    pub part: BlockOperator,
}

impl UnitizedEntry {
    pub fn to_operator(&self) -> BlockOperator {
        if self.scalar == Complex64::new(0.0, 0.0) {
            return self.part.clone();
        }
        let id = BlockOperator::identity(self.part.space().clone(), self.part.fiber_dim());
        id.linear_combination(self.scalar, &self.part, ONE).expect("same space")
    }
}

#[derive(Debug, Clone)]
pub struct IndexIdempotent {
    /// Row-major `[[TL, TR], [BL, BR]]`.
    pub entries: [[UnitizedEntry; 2]; 2],
}

impl IndexIdempotent {
    pub fn new(f: &BlockOperator) -> Result<Self> {
        let space = f.space().clone();
        let k = f.fiber_dim();
        let id = BlockOperator::identity(space.clone(), k);
        let fs = f.adjoint();
        let s0 = id.sub(&fs.mul(f)?)?;
        let s1 = id.sub(&f.mul(&fs)?)?;
        let tl = s1.mul(&s1)?.scale(-ONE);
        let f_s0 = f.mul(&s0)?;
        let tr = f_s0.add(&s1.mul(&f_s0)?)?;
        let bl = s0.mul(&fs)?;
        let br = s0.mul(&s0)?;
        let zero = Complex64::new(0.0, 0.0);
        Ok(IndexIdempotent {
            entries: [
                [UnitizedEntry { scalar: ONE, part: tl }, UnitizedEntry { scalar: zero, part: tr }],
                [UnitizedEntry { scalar: zero, part: bl }, UnitizedEntry { scalar: zero, part: br }],
            ],
        })
    }

    /// Image under the map from the unitization to `ℂ`.
    pub fn scalar_reduction(&self) -> [[Complex64; 2]; 2] {
        [
            [self.entries[0][0].scalar, self.entries[0][1].scalar],
            [self.entries[1][0].scalar, self.entries[1][1].scalar],
        ]
    }

    pub fn entry(&self, i: usize, j: usize) -> BlockOperator {
        self.entries[i][j].to_operator()
    }

    /// Largest propagation among the four parts.
    pub fn propagation(&self) -> u64 {
        self.entries.iter().flatten().map(|e| e.part.propagation()).max().unwrap_or(0)
    }

    /// `max_{i,j} ‖(I² - I)_{ij}‖`.
    pub fn idempotency_residual(&self) -> Result<f64> {
        let e = [[self.entry(0, 0), self.entry(0, 1)], [self.entry(1, 0), self.entry(1, 1)]];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let sq = e[i][0].mul(&e[0][j])?.add(&e[i][1].mul(&e[1][j])?)?;
                worst = worst.max(sq.sub(&e[i][j])?.operator_norm());
            }
        }
        Ok(worst)
    }

    /// `Tr(I(F) - e₁₁)`: the scalar reduction is `diag(1, 0)`, so this is
    /// the trace of the two diagonal parts.
    pub fn trace_minus_e11(&self) -> Complex64 {
        self.entries[0][0].part.trace() + self.entries[1][1].part.trace()
    }

    /// Applies `f` to every part, keeping the scalars.
    pub fn map_parts(&self, f: impl Fn(&BlockOperator) -> BlockOperator) -> Self {
        let m = |e: &UnitizedEntry| UnitizedEntry {
            scalar: e.scalar,
            part: f(&e.part),
        };
        IndexIdempotent {
            entries: [
                [m(&self.entries[0][0]), m(&self.entries[0][1])],
                [m(&self.entries[1][0]), m(&self.entries[1][1])],
            ],
        }
    }

    /// `max_{i,j} ‖self_{ij} - other_{ij}‖` (scalars must agree).
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (&self.entries[i][j], &other.entries[i][j]);
                let d = a.part.sub(&b.part)?.operator_norm() + (a.scalar - b.scalar).norm();
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }
}

/// `Σ_x tr T_{x,x}`.
pub fn base_trace(t: &BlockOperator) -> Complex64 {
    t.trace()
}

/// One component of a d-sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CutdownEntry {
    pub component: usize,
    pub trace: Complex64,
    /// `‖C² - C‖` for the cutdown `C = P_n T P_n`.
    pub defect: f64,
    /// Rank of the nearest projection when the defect is below the threshold.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct TraceReport {
    pub base_trace: Option<Complex64>,
    pub equivariant_trace: Option<Complex64>,
    pub d_sequence: Vec<CutdownEntry>,
    /// Named residuals, in insertion order.
    pub residuals: Vec<(String, f64)>,
}

impl TraceReport {
    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|r| r.1)
    }

    pub fn ranks(&self) -> Vec<Option<usize>> {
        self.d_sequence.iter().map(|e| e.rank).collect()
    }
}

/// Cutdown of `T` to each component: trace, idempotency defect and, when
/// the defect is small, the nearest-projection rank (eigenvalues above ½).
pub fn d_sequence(t: &BlockOperator, x: &SpaceOfGraphs) -> Result<TraceReport> {
    if t.space().len() != x.total_vertices() {
        return Err(Error::IndexSpaceMismatch {
            left: format!("{}[{}]", t.space().id(), t.space().len()),
            right: format!("space of graphs[{}]", x.total_vertices()),
        });
    }
    let entries = (0..x.len())
        .into_par_iter()
        .map(|n| {
            let pts: Vec<usize> = x.range(n).collect();
            let c = t.compress_dense(&pts, &pts);
            let trace: Complex64 = c.diagonal().iter().sum();
            let (defect, rank) = if linalg::hermitian_defect(&c) <= 1e-12 * (1.0 + c.norm()) {
                let ev = linalg::hermitian_eigenvalues(&c);
                let defect = ev.iter().map(|l| (l * l - l).abs()).fold(0.0, f64::max);
                (defect, ev.iter().filter(|&&l| l > 0.5).count())
            } else {
                let d = linalg::spectral_norm(&(&c * &c - &c));
                (d, trace.re.round().max(0.0) as usize)
            };
            CutdownEntry {
                component: n,
                trace,
                defect,
                rank: (defect < RANK_DEFECT_THRESHOLD).then_some(rank),
            }
        })
        .collect();
    Ok(TraceReport {
        d_sequence: entries,
        ..TraceReport::default()
    })
}

/// Compares `I(lift F)` with `lift(I(F))` and `Tr(I(F) - e₁₁)` with
/// `τ(I(lift F) - e₁₁)` on a finite Galois cover that is a
/// `6·prop(F)`-metric cover.
///
/// Residual names: `idempotency_base`, `idempotency_lift`, `lift_commutes`,
/// `trace_gap`, `base_trace_vanishes`.
pub fn atiyah_check(f: &BlockOperator, cover: &CoverMap, total: IndexSpace) -> Result<TraceReport> {
    if !cover.is_galois() {
        return Err(Error::NotGalois);
    }
    let required = 6 * f.propagation().max(1);
    let check = cover.verify_metric_cover(required)?;
    if !check.passed {
        return Err(Error::FaithfulnessTooSmall {
            component: None,
            required,
            witness: check.witness.map(|w| w.to_string()),
        });
    }
    let base_idem = IndexIdempotent::new(f)?;
    let lifted_f = lift_unchecked(f, cover, total.clone());
    let lifted_idem = IndexIdempotent::new(&lifted_f)?;
    let idem_lifted = base_idem.map_parts(|p| lift_unchecked(p, cover, total.clone()));
    let base = base_idem.trace_minus_e11();
    let tau = equivariant_trace(&lifted_idem.entries[0][0].part, cover)? + equivariant_trace(&lifted_idem.entries[1][1].part, cover)?;
    let residuals = vec![
        ("idempotency_base".to_string(), base_idem.idempotency_residual()?),
        ("idempotency_lift".to_string(), lifted_idem.idempotency_residual()?),
        ("lift_commutes".to_string(), lifted_idem.distance(&idem_lifted)?),
        ("trace_gap".to_string(), (base - tau).norm()),
        ("base_trace_vanishes".to_string(), base.norm()),
    ];
    Ok(TraceReport {
        base_trace: Some(base),
        equivariant_trace: Some(tau),
        d_sequence: Vec::new(),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, cycle_graph, Graph};
    use crate::groups::QuotientTower;
    use crate::spectral::basic_kazhdan;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_contraction(space: &IndexSpace, g: &Graph, seed: u64) -> BlockOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for x in 0..g.vertex_count() {
            for y in std::iter::once(x).chain(g.neighbors(x).iter().copied()) {
                t.push((x, y, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
        }
        let f = BlockOperator::from_scalars(space.clone(), t);
        let n = f.operator_norm();
        f.scale(Complex64::new(1.0 / n, 0.0))
    }

    #[test]
    fn unitary_and_zero() {
        let g = cycle_graph(5).unwrap();
        let s = IndexSpace::graph("C5", &g);
        let u = BlockOperator::diagonal(s.clone(), 1, |x| Complex64::from_polar(1.0, x as f64));
        let i = IndexIdempotent::new(&u).unwrap();
        assert!(i.entries.iter().flatten().all(|e| e.part.max_abs_entry() < 1e-15));
        assert_eq!(i.scalar_reduction(), [[ONE, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0); 2]]);
        let z = IndexIdempotent::new(&BlockOperator::zero(s.clone(), 1)).unwrap();
        assert!(z.entry(0, 0).max_abs_entry() == 0.0);
        assert!(z.entry(1, 1).sub(&BlockOperator::identity(s, 1)).unwrap().max_abs_entry() == 0.0);
        assert_eq!(z.trace_minus_e11(), Complex64::new(5.0 - 5.0, 0.0) + Complex64::new(0.0, 0.0));
    }

    #[test]
    fn random_idempotent() {
        let g = cycle_graph(8).unwrap();
        let s = IndexSpace::graph("C8", &g);
        for seed in 0..5 {
            let f = random_contraction(&s, &g, seed);
            let i = IndexIdempotent::new(&f).unwrap();
            assert!(i.idempotency_residual().unwrap() < 1e-10);
            assert!(i.trace_minus_e11().norm() < 1e-10);
            assert!(i.propagation() <= 5 * f.propagation());
        }
        // ‖F‖ = 2 is still fine
        let f = random_contraction(&s, &g, 7).scale(Complex64::new(2.0, 0.0));
        assert!(IndexIdempotent::new(&f).unwrap().idempotency_residual().unwrap() < 1e-9);
    }

    #[test]
    fn atiyah_on_cyclic_cover() {
        let t = QuotientTower::cyclic(3, 2, 4).unwrap();
        let cover = CoverMap::from_tower(&t, 3, 2).unwrap();
        let base = IndexSpace::graph("Z12", cover.base());
        let total = IndexSpace::graph("Z24", cover.total());
        let f = random_contraction(&base, cover.base(), 1);
        let r = atiyah_check(&f, &cover, total.clone()).unwrap();
        assert!(r.residual("lift_commutes").unwrap() < 1e-8);
        assert!(r.residual("trace_gap").unwrap() < 1e-8);
        assert!(r.residual("base_trace_vanishes").unwrap() < 1e-8);
        // τ∘lift = Tr
        let lf = lift_unchecked(&f, &cover, total);
        assert!((equivariant_trace(&lf, &cover).unwrap() - base_trace(&f)).norm() < 1e-12);

        let shallow = CoverMap::from_tower(&t, 1, 0).unwrap();
        let f = random_contraction(&IndexSpace::graph("Z3", shallow.base()), shallow.base(), 2);
        assert!(matches!(
            atiyah_check(&f, &shallow, IndexSpace::graph("Z6", shallow.total())),
            Err(Error::FaithfulnessTooSmall { required: 6, .. })
        ));
    }

    #[test]
    fn d_sequences() {
        let x = Arc::new(SpaceOfGraphs::new((3..=7).map(|n| complete_graph(n).unwrap()).collect()).unwrap());
        let space = IndexSpace::space("K", x.clone());
        let p = basic_kazhdan(&x, space.clone()).unwrap();
        let r = d_sequence(&p, &x).unwrap();
        assert!(r.ranks().iter().all(|&k| k == Some(1)));
        let id = BlockOperator::identity(space, 1);
        let r = d_sequence(&id, &x).unwrap();
        assert_eq!(r.ranks(), (3..=7).map(Some).collect::<Vec<_>>());
    }
}
