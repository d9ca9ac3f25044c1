use coarse_core::index::{atiyah_check, IndexIdempotent};
use coarse_core::operators::{onl_search, random_local, IndexSpace};
use coarse_core::spectral::laplacian;
use coarse_core::Error;
use rayon::prelude::*;
use serde_json::json;

use super::covers::test_covers;
use super::{mix_seed, Context};
use crate::error::{LabError, Result};
use crate::output::{fmt_f, Plot, Report, Table};

/// Components up to this size also get an idempotency residual.
pub const IDEMPOTENCY_CHECK_LIMIT: usize = 400;

/// Exhaustive norm-localization search at each `S` in the grid (default
/// `[4]`). `operator`: `laplacian` (default) or `random`.
pub fn onl(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let grid = ctx.int_grid(&[4])?;
    let kind = ctx.params.operator.as_deref().unwrap_or("laplacian");
    if kind != "laplacian" && kind != "random" {
        return Err(LabError::Usage(format!("operator must be `laplacian` or `random`, got `{kind}`")));
    }
    let rows: Vec<Vec<coarse_core::LocalizationResult>> = (0..x.len())
        .into_par_iter()
        .map(|n| -> Result<_> {
            let g = x.component(n);
            let space = IndexSpace::graph(ctx.label(n), g);
            let t = if kind == "laplacian" {
                laplacian(g, space, 1)?
            } else {
                random_local(g, space, ctx.params.fiber.unwrap_or(1), mix_seed(ctx.seed, n as u64, 0))
            };
            Ok(grid.iter().map(|&s| onl_search(&t, s)).collect())
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("onl", "n,label,|G_n|,S,ratio,center,radius,support_diameter,localized_norm,operator_norm");
    let mut report = Report::default();
    let mut within = true;
    let mut stability = serde_json::Map::new();
    let mut series = Vec::new();
    for (si, &s) in grid.iter().enumerate() {
        let ratios: Vec<f64> = rows.iter().map(|r| r[si].ratio).collect();
        let dev = ratios.iter().map(|r| (r - ratios[0]).abs() / ratios[0]).fold(0.0, f64::max);
        stability.insert(s.to_string(), json!({ "ratios": ratios, "max_relative_deviation": dev }));
        series.push((format!("S={s}"), ratios.iter().enumerate().map(|(n, &r)| (n as f64, r)).collect()));
    }
    for (n, r) in rows.iter().enumerate() {
        for (si, res) in r.iter().enumerate() {
            within &= res.support_diameter <= grid[si];
            t.push(format!(
                "{n},{},{},{},{},{},{},{},{},{}",
                ctx.label(n),
                x.component(n).vertex_count(),
                grid[si],
                fmt_f(res.ratio),
                res.center,
                res.radius,
                res.support_diameter,
                fmt_f(res.localized_norm),
                fmt_f(res.operator_norm)
            ));
        }
    }
    report.check("support_diameter_within_s", within);
    report.set("operator", kind);
    report.set("localization", serde_json::Value::Object(stability));
    report.plots.push(Plot {
        name: "onl".into(),
        title: format!("localization ratio, {}", ctx.family.name),
        x_label: "n".into(),
        y_label: "ratio".into(),
        log_y: false,
        series,
    });
    report.tables.push(t);
    Ok(report)
}

/// `I(lift F)` against `lift(I F)` and the two traces on every test cover
/// that is a `6·prop(F)`-metric Galois cover (`trials` operators each,
/// default 5), plus `Tr(I(F) - e₁₁) = 0` on every component.
pub fn atiyah(ctx: &Context) -> Result<Report> {
    let trials = ctx.params.trials.unwrap_or(5);
    let fiber = ctx.params.fiber.unwrap_or(1);
    let covers = if ctx.family.tower.is_some() { test_covers(ctx)? } else { Vec::new() };
    let mut t = Table::new(
        "atiyah",
        "cover,trial,lift_commutes,trace_gap,base_trace_re,base_trace_im,equivariant_trace_re,equivariant_trace_im,idempotency_base,idempotency_lift,status",
    );
    let results: Vec<Vec<std::result::Result<coarse_core::TraceReport, Error>>> = covers
        .par_iter()
        .enumerate()
        .map(|(i, tc)| {
            let base = IndexSpace::graph(tc.lower.clone(), tc.cover.base());
            let total = IndexSpace::graph(tc.upper.clone(), tc.cover.total());
            let mut out = Vec::new();
            for k in 0..trials as u64 {
                let f = random_local(tc.cover.base(), base.clone(), fiber, mix_seed(ctx.seed, i as u64, k));
                let r = atiyah_check(&f, &tc.cover, total.clone());
                let stop = r.is_err();
                out.push(r);
                if stop {
                    break;
                }
            }
            out
        })
        .collect();
    let mut worst_commute: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut verified = 0;
    let mut dropped = Vec::new();
    for (tc, rs) in covers.iter().zip(results) {
        for (k, r) in rs.into_iter().enumerate() {
            match r {
                Ok(r) => {
                    let get = |n: &str| r.residual(n).unwrap_or(f64::NAN);
                    worst_commute = worst_commute.max(get("lift_commutes"));
                    worst_gap = worst_gap.max(get("trace_gap"));
                    worst_trace = worst_trace.max(get("base_trace_vanishes"));
                    let (b, e) = (r.base_trace.unwrap_or_default(), r.equivariant_trace.unwrap_or_default());
                    t.push(format!(
                        "{},{k},{},{},{},{},{},{},{},{},ok",
                        tc.label,
                        fmt_f(get("lift_commutes")),
                        fmt_f(get("trace_gap")),
                        fmt_f(b.re),
                        fmt_f(b.im),
                        fmt_f(e.re),
                        fmt_f(e.im),
                        fmt_f(get("idempotency_base")),
                        fmt_f(get("idempotency_lift"))
                    ));
                    if k == 0 {
                        verified += 1;
                    }
                }
                Err(e @ Error::FaithfulnessTooSmall { .. }) => {
                    t.push(format!("{},{k},none,none,none,none,none,none,none,none,{}", tc.label, e.kind()));
                    dropped.push(json!({ "cover": tc.label, "error": e.kind(), "message": e.to_string() }));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    let x = &ctx.family.space;
    let sanity: Vec<(f64, Option<f64>, u64, u64)> = (0..x.len())
        .into_par_iter()
        .map(|n| -> Result<_> {
            let g = x.component(n);
            let f = random_local(g, IndexSpace::graph(ctx.label(n), g), fiber, mix_seed(ctx.seed, 1 << 32 | n as u64, 0));
            let idem = IndexIdempotent::new(&f)?;
            let residual = if g.vertex_count() <= IDEMPOTENCY_CHECK_LIMIT {
                Some(idem.idempotency_residual()?)
            } else {
                None
            };
            Ok((idem.trace_minus_e11().norm(), residual, idem.propagation(), f.propagation()))
        })
        .collect::<Result<_>>()?;
    let mut s = Table::new("sanity", "n,label,|G_n|,trace_abs,idempotency,propagation,operator_propagation");
    let mut sanity_ok = true;
    let mut prop_ok = true;
    for (n, (tr, idem, p, pf)) in sanity.iter().enumerate() {
        sanity_ok &= *tr < 1e-8 && idem.is_none_or(|r| r < 1e-8);
        prop_ok &= *p <= 5 * pf;
        s.push(format!(
            "{n},{},{},{},{},{p},{pf}",
            ctx.label(n),
            x.component(n).vertex_count(),
            fmt_f(*tr),
            idem.map_or("none".to_string(), fmt_f)
        ));
    }
    let mut report = Report::default();
    report.check("lift_commutes", worst_commute < 1e-8);
    report.check("trace_gap", worst_gap < 1e-8);
    report.check("base_trace_vanishes", worst_trace < 1e-8 && sanity_ok);
    report.check("propagation_within_five", prop_ok);
    report.set("covers_verified", verified);
    report.set("worst_lift_commutes", worst_commute);
    report.set("worst_trace_gap", worst_gap);
    report.set("dropped", dropped);
    report.tables = vec![t, s];
    Ok(report)
}
