use coarse_core::rips::{rips_splitting, SimplicialComplex};
use coarse_core::Error;
use serde_json::json;

use super::Context;
use crate::error::Result;
use crate::output::{Report, Table};

/// Rips splitting at each `R` in the grid (default `0..=8`) with
/// simplices up to `dim_cap` (default 2). Radii above the first one that
/// exceeds the simplex budget are reported as too large without building.
pub fn rips(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let grid = ctx.grid(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    let cap = ctx.params.dim_cap.unwrap_or(2);
    let mut split = Table::new("rips", "R,N_R,separation,agrees,partition,skeleton_components,euler,truncated,status");
    let mut stats = Table::new("rips_stats", "R,dim,count");
    let mut agrees = true;
    let mut partition = true;
    let mut monotone = true;
    let mut truncated = false;
    let mut previous: Option<SimplicialComplex> = None;
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    let mut too_large: Option<Error> = None;
    for &r in &sorted {
        if let Some(e) = &too_large {
            split.push(format!("{r},none,none,none,none,none,none,none,{}", e.kind()));
            continue;
        }
        match rips_splitting(x, r, cap) {
            Ok(s) => {
                agrees &= s.agrees();
                partition &= s.is_partition();
                truncated |= s.total.is_truncated();
                if let Some(p) = &previous {
                    monotone &= p.is_subcomplex_of(&s.total);
                }
                split.push(format!(
                    "{r},{},{},{},{},{},{},{},ok",
                    s.n_r,
                    s.separation,
                    s.agrees(),
                    s.is_partition(),
                    s.total.components().len(),
                    s.total.euler_characteristic(),
                    s.total.is_truncated()
                ));
                for (d, c) in s.total.counts().iter().enumerate() {
                    stats.push(format!("{r},{d},{c}"));
                }
                previous = Some(s.total);
            }
            Err(e @ Error::ComplexTooLarge { .. }) => {
                split.push(format!("{r},none,none,none,none,none,none,none,{}", e.kind()));
                too_large = Some(e);
            }
            Err(e @ Error::PrefixTooShort { .. }) => {
                split.push(format!("{r},none,none,none,none,none,none,none,{}", e.kind()));
                previous = None;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut report = Report::default();
    report.check("splitting_agrees_with_separation", agrees);
    report.check("splitting_is_partition", partition);
    report.check("monotone_in_r", monotone);
    report.set("dim_cap", cap);
    if truncated {
        report.set(
            "euler_note",
            json!(format!("Euler characteristics count simplices up to dimension {cap} only")),
        );
    }
    report.tables = vec![split, stats];
    Ok(report)
}
