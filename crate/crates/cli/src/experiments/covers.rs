use coarse_core::covers::{CoverMap, FaithfulnessProfile};
use coarse_core::operators::{lift, lift_unchecked, random_local, BlockOperator, IndexSpace};
use coarse_core::{linalg, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{mix_seed, Context};
use crate::error::Result;
use crate::output::{fmt_f, Report, Table};

pub const DEFAULT_RADII: &[u64] = &[1, 2, 3, 4, 5, 6, 8, 10, 12];

/// Vertex budget for the truncated universal covers of `faithfulness`.
pub const TREE_BUDGET: f64 = 1.0e6;

/// Largest depth `≤ wanted` whose non-backtracking tree from a vertex of
/// degree at most `max_degree` stays within the budget.
fn affordable_depth(max_degree: usize, wanted: usize) -> usize {
    let d = max_degree as f64;
    let mut size = 1.0;
    let mut layer = 1.0;
    for depth in 1..=wanted {
        layer *= if depth == 1 { d } else { d - 1.0 };
        size += layer;
        if size > TREE_BUDGET {
            return (depth - 1).max(1);
        }
    }
    wanted.max(1)
}

/// Universal covers of every component checked on the radius grid, the
/// `R ↦ N_R` profile, and on towers the quotient covers between levels.
pub fn faithfulness(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let grid = ctx.int_grid(DEFAULT_RADII)?;
    let max_r = grid.iter().copied().max().unwrap_or(1);
    type RadiusCheck = (u64, Option<(bool, usize, usize, String)>);
    struct Row {
        cover: CoverMap,
        girth: Option<usize>,
        depth: usize,
        checks: Vec<RadiusCheck>,
        half: Option<(u64, bool, bool, String)>,
    }
    let rows: Vec<Row> = (0..x.len())
        .into_par_iter()
        .map(|n| -> Result<Row> {
            let g = x.component(n);
            let girth = g.girth().cycle_length();
            let wanted = (max_r.max(girth.unwrap_or(0) as u64)).saturating_sub(1) as usize;
            let depth = affordable_depth(g.max_degree(), wanted).max(girth.unwrap_or(1).saturating_sub(1));
            let cover = CoverMap::truncated_universal(g, 0, depth)?;
            let checks = grid
                .iter()
                .map(|&r| {
                    if r > depth as u64 + 1 && !g.is_tree() {
                        return Ok((r, None));
                    }
                    let c = cover.verify_metric_cover(r)?;
                    Ok((
                        r,
                        Some((
                            c.passed,
                            c.centers_checked,
                            c.base_vertices_covered,
                            c.witness.map(|w| w.to_string()).unwrap_or_default(),
                        )),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let half = match girth {
                Some(gi) => {
                    let at_half = cover.verify_metric_cover(gi as u64 / 2)?;
                    let at_girth = cover.verify_metric_cover(gi as u64)?;
                    Some((
                        gi as u64 / 2,
                        at_half.passed,
                        !at_girth.passed,
                        at_girth.witness.map(|w| w.to_string()).unwrap_or_default(),
                    ))
                }
                None => None,
            };
            Ok(Row {
                cover,
                girth,
                depth,
                checks,
                half,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Table::new(
        "metric_cover",
        "n,label,girth,depth,R,passed,centers_checked,base_vertices_covered,witness",
    );
    let mut universal = Table::new("universal", "n,label,girth,half_girth,passes_at_half,fails_at_girth,witness");
    let mut half_ok = true;
    for (n, r) in rows.iter().enumerate() {
        let girth = r.girth.map_or("inf".to_string(), |g| g.to_string());
        for (radius, c) in &r.checks {
            match c {
                Some((passed, centers, covered, witness)) => checks.push(format!(
                    "{n},{},{girth},{},{radius},{passed},{centers},{covered},\"{witness}\"",
                    ctx.label(n),
                    r.depth
                )),
                None => checks.push(format!("{n},{},{girth},{},{radius},untested,0,0,\"\"", ctx.label(n), r.depth)),
            }
        }
        match &r.half {
            Some((h, pass, fail, witness)) => {
                half_ok &= *pass && *fail && !witness.is_empty();
                universal.push(format!("{n},{},{girth},{h},{pass},{fail},\"{witness}\"", ctx.label(n)));
            }
            None => universal.push(format!("{n},{},inf,inf,true,false,\"{}\"", ctx.label(n), r.cover.notice().unwrap_or(""))),
        }
    }
    let testable: Vec<u64> = grid
        .iter()
        .copied()
        .filter(|&r| rows.iter().all(|row| row.checks.iter().any(|(rr, c)| *rr == r && c.is_some())))
        .collect();
    let untested: Vec<u64> = grid.iter().copied().filter(|r| !testable.contains(r)).collect();
    let covers: Vec<CoverMap> = rows.into_iter().map(|r| r.cover).collect();
    let profile = FaithfulnessProfile::compute(&covers, &testable)?;
    let mut prof = Table::new("profile", "R,N_R");
    for (r, n) in testable.iter().zip(&profile.n_r) {
        prof.push(format!("{r},{}", n.map_or("none".to_string(), |v| v.to_string())));
    }
    let mut report = Report::default();
    report.check("universal_covers_exact_at_half_girth", half_ok);
    report.check("profile_monotone", profile.is_monotone());
    report.set("profile_radii", testable.clone());
    report.set("n_r", profile.n_r.iter().map(|n| n.map_or(Value::Null, Value::from)).collect::<Vec<_>>());
    report.set("untested_radii", untested);
    if let Err(e) = profile.require_complete() {
        report.set("profile_incomplete", json!({ "error": e.kind(), "message": e.to_string() }));
    }
    report.tables = vec![checks, universal, prof];

    if let Some(tower) = &ctx.family.tower {
        let mut t = Table::new("tower_covers", "upper,lower,|upper|,|lower|,metric_cover_radius");
        for upper in 1..tower.len() {
            for lower in 0..upper {
                let c = CoverMap::from_tower(tower, upper, lower)?;
                t.push(format!(
                    "{},{},{},{},{}",
                    ctx.label(upper),
                    ctx.label(lower),
                    c.total().vertex_count(),
                    c.base().vertex_count(),
                    c.metric_cover_radius(max_r.max(2))?
                ));
            }
        }
        report.tables.push(t);
    }
    Ok(report)
}

/// A cover with the rows on which lifted products are compared.
pub(crate) struct TestCover {
    pub label: String,
    pub upper: String,
    pub lower: String,
    pub cover: CoverMap,
    pub rows: Vec<usize>,
}

/// Galois covers between all tower levels, or truncated universal covers
/// (depth `depth`, default 4) of every component compared on rows at
/// least one step inside the truncation.
pub(crate) fn test_covers(ctx: &Context) -> Result<Vec<TestCover>> {
    let mut out = Vec::new();
    if let Some(tower) = &ctx.family.tower {
        for upper in 1..tower.len() {
            for lower in 0..upper {
                let cover = CoverMap::from_tower(tower, upper, lower)?;
                let rows = (0..cover.total().vertex_count()).collect();
                out.push(TestCover {
                    label: format!("{}->{}", ctx.label(upper), ctx.label(lower)),
                    upper: ctx.label(upper).to_string(),
                    lower: ctx.label(lower).to_string(),
                    cover,
                    rows,
                });
            }
        }
    } else {
        let depth = ctx.params.depth.unwrap_or(4);
        for n in 0..ctx.family.space.len() {
            let cover = CoverMap::truncated_universal(ctx.family.space.component(n), 0, depth)?;
            let rows = cover.interior(1);
            out.push(TestCover {
                label: format!("{}~->{}", ctx.label(n), ctx.label(n)),
                upper: format!("{}~", ctx.label(n)),
                lower: ctx.label(n).to_string(),
                cover,
                rows,
            });
        }
    }
    Ok(out)
}

/// Outcome of the lifting test on one cover.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftOutcome {
    pub mult_defect: f64,
    pub adjoint_defect: f64,
    pub trials: usize,
}

/// `‖lift(TS) - lift(T)lift(S)‖` on the comparison rows and the exact
/// adjoint defect, over `trials` seeded pairs of propagation-1 operators.
pub(crate) fn lift_trials(tc: &TestCover, trials: usize, fiber: usize, seed: u64, item: u64) -> std::result::Result<LiftOutcome, Error> {
    let base = IndexSpace::graph(tc.lower.clone(), tc.cover.base());
    let total = IndexSpace::cover_total(tc.upper.clone(), &tc.cover);
    let mut mult: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let all_rows = tc.rows.len() == total.len();
    let cols: Vec<usize> = (0..total.len()).collect();
    for i in 0..trials as u64 {
        let t = random_local(tc.cover.base(), base.clone(), fiber, mix_seed(seed, item, 2 * i));
        let s = random_local(tc.cover.base(), base.clone(), fiber, mix_seed(seed, item, 2 * i + 1));
        let up = |op: &BlockOperator| {
            if i == 0 {
                lift(op, &tc.cover, total.clone())
            } else {
                Ok(lift_unchecked(op, &tc.cover, total.clone()))
            }
        };
        let lt = up(&t)?;
        let ls = up(&s)?;
        let lts = up(&t.mul(&s)?)?;
        let diff: BlockOperator = lt.mul(&ls)?.sub(&lts)?;
        let d = if all_rows {
            diff.operator_norm()
        } else {
            linalg::spectral_norm(&diff.compress_dense(&tc.rows, &cols))
        };
        mult = mult.max(d);
        adj = adj.max(lt.adjoint().max_abs_diff(&up(&t.adjoint())?)?);
    }
    Ok(LiftOutcome {
        mult_defect: mult,
        adjoint_defect: adj,
        trials,
    })
}

/// Multiplicativity and adjoint compatibility of the lift. `trials`
/// (default 100) pairs per cover; covers that are not 4-metric are
/// reported as dropped.
pub fn lift_check(ctx: &Context) -> Result<Report> {
    let covers = test_covers(ctx)?;
    let trials = ctx.params.trials.unwrap_or(100);
    let fiber = ctx.params.fiber.unwrap_or(1);
    let outcomes: Vec<_> = covers
        .par_iter()
        .enumerate()
        .map(|(i, tc)| lift_trials(tc, trials, fiber, ctx.seed, i as u64))
        .collect();
    let mut t = Table::new(
        "lift",
        "cover,|total|,|base|,compared_rows,trials,max_mult_defect,max_adjoint_defect,status",
    );
    let mut mult_ok = true;
    let mut adj_ok = true;
    let mut lifted = 0;
    let mut dropped = Vec::new();
    for (tc, o) in covers.iter().zip(outcomes) {
        let sizes = format!("{},{},{}", tc.cover.total().vertex_count(), tc.cover.base().vertex_count(), tc.rows.len());
        match o {
            Ok(o) => {
                lifted += 1;
                mult_ok &= o.mult_defect < 1e-10;
                adj_ok &= o.adjoint_defect == 0.0;
                t.push(format!(
                    "{},{sizes},{},{},{},ok",
                    tc.label,
                    o.trials,
                    fmt_f(o.mult_defect),
                    fmt_f(o.adjoint_defect)
                ));
            }
            Err(e @ Error::FaithfulnessTooSmall { .. }) => {
                t.push(format!("{},{sizes},0,none,none,{}", tc.label, e.kind()));
                dropped.push(json!({ "cover": tc.label, "error": e.kind(), "message": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut report = Report::default();
    report.check("multiplicative", mult_ok);
    report.check("adjoint_exact", adj_ok);
    report.set("covers_lifted", lifted);
    report.set("dropped", dropped);
    report.tables.push(t);
    Ok(report)
}
