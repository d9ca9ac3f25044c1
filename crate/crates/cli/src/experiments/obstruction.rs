use coarse_core::index::{ghost_obstruction_experiment, DepthRule, ObstructionConfig, ObstructionRow};
use serde_json::json;

use super::Context;
use crate::error::Result;
use crate::output::{Plot, Report, Table};

/// Tolerance on the base heat trace at `t*`.
pub const BASE_TRACE_TOL: f64 = 1e-3;
/// Additive slack on `e^{-t*·g0}`.
pub const BOUND_SLACK: f64 = 0.05;
/// Rounding allowance on `e^{-t·g0_full}`, which bounds the lifted norm exactly.
pub const FULL_BOUND_TOL: f64 = 1e-9;

/// Heat decay on the base against the truncated lifted heat operator.
/// `--tol` sets `t* = ln(1/tol)/gap` (default 1e-6); `--grid` adds extra
/// times; `depth` (default 5) or `depth_girth_factor` set the truncation;
/// `margin` (default 1) the interior. The only check is the exact bound
/// `‖P e^{-tΔ̃} P‖ ≤ e^{-t·g0_full}`; the rest is reported as observations.
pub fn obstruction(ctx: &Context) -> Result<Report> {
    let depth = match ctx.params.depth_girth_factor {
        Some(f) => DepthRule::GirthMultiple(f),
        None => DepthRule::Fixed(ctx.params.depth.unwrap_or(5)),
    };
    let cfg = ObstructionConfig {
        depth,
        margin: ctx.params.margin.unwrap_or(1),
        tol: ctx.tol(1e-6),
        times: ctx.grid(&[]),
        ..ObstructionConfig::default()
    };
    let r = ghost_obstruction_experiment(&ctx.family.space, &cfg)?;
    let mut t = Table::new("obstruction", format!("{},label", ObstructionRow::CSV_HEADER));
    for row in &r.rows {
        t.push(format!("{},{}", row.csv_row(), ctx.label(row.component)));
    }
    let mut d = Table::new("dropped", "n,label,error,message");
    for (n, e) in &r.dropped {
        d.push(format!("{n},{},{},\"{}\"", ctx.label(*n), e.kind(), e.to_string().replace('"', "'")));
    }
    let star: Vec<&ObstructionRow> = r.t_star_rows().collect();
    let mut report = Report::default();
    report.check(
        "lifted_within_full_bound",
        r.rows.iter().all(|row| row.lifted_norm <= (-row.t * row.g0_full).exp() + FULL_BOUND_TOL),
    );
    report.set(
        "observations",
        json!({
            "base_trace_near_one": star.iter().all(|row| (row.base_trace - 1.0).abs() <= BASE_TRACE_TOL),
            "lifted_within_bound": star.iter().all(|row| row.lifted_norm <= row.bound + BOUND_SLACK),
            "ratio_monotone": r.ratio_monotone,
        }),
    );
    report.set("t_star", r.t_star.clone());
    report.set(
        "decay",
        star.iter()
            .map(|row| json!({ "n": row.component, "base_trace": row.base_trace, "lifted_norm": row.lifted_norm, "bound": row.bound, "ratio": row.ratio }))
            .collect::<Vec<_>>(),
    );
    report.set("min_lifted_norm", star.iter().map(|row| row.lifted_norm).fold(f64::INFINITY, f64::min));
    report.set(
        "dropped",
        r.dropped.iter().map(|(n, e)| json!({ "n": n, "error": e.kind() })).collect::<Vec<_>>(),
    );
    report.plots.push(Plot {
        name: "obstruction".into(),
        title: format!("lifted / base heat at t*, {}", ctx.family.name),
        x_label: "n".into(),
        y_label: "ratio".into(),
        log_y: true,
        series: vec![("lifted/base".into(), star.iter().map(|row| (row.component as f64, row.ratio)).collect())],
    });
    report.tables = vec![t, d];
    Ok(report)
}
