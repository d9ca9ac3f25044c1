use coarse_core::covers::universal_cover_radius;
use coarse_core::groups::{CharacterTable, TowerKind};
use coarse_core::index::d_sequence;
use coarse_core::operators::{commutator_decay, ghost_profile, IndexSpace};
use coarse_core::spectral::{
    basic_kazhdan_with_reports, expander_certificate, spectral_reports, tower_kazhdan_projection, SpectralOptions, SpectralReport, KERNEL_TOL,
};
use serde_json::{json, Value};

use super::Context;
use crate::error::{LabError, Result};
use crate::output::{fmt_f, Plot, Report, Table};

fn options(ctx: &Context) -> SpectralOptions {
    SpectralOptions {
        kernel_tol: ctx.tol(KERNEL_TOL),
        ..SpectralOptions::default()
    }
}

/// Spectra, gaps and the expander verdict. `--tol`: kernel threshold (1e-9).
pub fn expander_report(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let opts = options(ctx);
    let (verdict, reports) = expander_certificate(x, &opts)?;
    let mut spectra = Table::new("spectra", format!("{},label,above_one", SpectralReport::CSV_HEADER));
    let mut eigen = Table::new("eigenvalues", "n,i,lambda");
    for r in &reports {
        spectra.push(format!("{},{},{}", r.csv_row(), ctx.label(r.index), r.above_one));
        for (i, l) in r.eigenvalues.iter().enumerate() {
            eigen.push(format!("{},{i},{}", r.index, fmt_f(*l)));
        }
    }
    let mut report = Report::default();
    report.check("spectrum_within_0_2", reports.iter().all(|r| r.within_bounds(1e-9)));
    report.check("kernel_one_dimensional", reports.iter().all(|r| r.kernel_multiplicity == 1));
    report.set(
        "verdict",
        json!({
            "label": verdict.label(),
            "expander": verdict.is_expander(),
            "weak_expander": verdict.is_weak_expander(),
            "degree_bounded": verdict.degree_bounded,
            "sizes_increasing": verdict.sizes_increasing,
            "uniform_gap": verdict.uniform_gap,
            "degree_bound": verdict.degree_bound,
            "min_gap": verdict.min_gap,
            "gap_floor": verdict.gap_floor,
            "above_one_components": verdict.flagged,
        }),
    );
    report.set("gaps", reports.iter().map(|r| r.gap.map_or(Value::Null, Value::from)).collect::<Vec<_>>());
    report.plots.push(Plot {
        name: "gaps".into(),
        title: format!("spectral gap, {}", ctx.family.name),
        x_label: "n".into(),
        y_label: "gap".into(),
        log_y: false,
        series: vec![("gap".into(), reports.iter().map(|r| (r.index as f64, r.gap.unwrap_or(0.0))).collect())],
    });
    report.tables = vec![spectra, eigen];
    Ok(report)
}

/// Girth of each component.
pub fn girth_growth(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let mut t = Table::new("girth", "n,label,|G_n|,girth,universal_cover_radius");
    let girths: Vec<Option<usize>> = x.components().iter().map(|g| g.girth().cycle_length()).collect();
    for (n, g) in x.components().iter().enumerate() {
        t.push(format!(
            "{n},{},{},{},{}",
            ctx.label(n),
            g.vertex_count(),
            girths[n].map_or("inf".to_string(), |v| v.to_string()),
            universal_cover_radius(g).map_or("inf".to_string(), |v| v.to_string())
        ));
    }
    let key = |g: Option<usize>| g.unwrap_or(usize::MAX);
    let mut report = Report::default();
    report.set("girths", girths.iter().map(|g| g.map_or(Value::Null, Value::from)).collect::<Vec<_>>());
    report.set("strictly_increasing", girths.windows(2).all(|w| key(w[1]) > key(w[0])));
    report.set("nondecreasing", girths.windows(2).all(|w| key(w[1]) >= key(w[0])));
    report.plots.push(Plot {
        name: "girth".into(),
        title: format!("girth, {}", ctx.family.name),
        x_label: "n".into(),
        y_label: "girth".into(),
        log_y: false,
        series: vec![(
            "girth".into(),
            girths.iter().enumerate().filter_map(|(n, g)| g.map(|g| (n as f64, g as f64))).collect(),
        )],
    });
    report.tables.push(t);
    Ok(report)
}

/// Ghost profile and component commutators of the basic Kazhdan projection.
pub fn ghost_decay(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let reports = spectral_reports(x, &options(ctx))?;
    let p = basic_kazhdan_with_reports(x, IndexSpace::space("X", x.clone()), &reports)?;
    let profile = ghost_profile(&p, x)?;
    let comm = commutator_decay(&p, x)?;
    let mut t = Table::new("ghost", "n,label,|G_n|,gamma,tail_sup,commutator,entry_min,entry_max");
    let mut entries_exact = true;
    for (n, &commutator) in comm.iter().enumerate() {
        let range = x.range(n);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a in range.clone() {
            for b in range.clone() {
                let v = p.entry(a, b, 0, 0).re;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if x.component(n).regular_degree().is_some() {
            let want = 1.0 / range.len() as f64;
            entries_exact &= (lo - want).abs() <= 1e-10 && (hi - want).abs() <= 1e-10 && (profile.gamma[n] - want).abs() <= 1e-10;
        }
        t.push(format!(
            "{n},{},{},{},{},{},{},{}",
            ctx.label(n),
            range.len(),
            fmt_f(profile.gamma[n]),
            fmt_f(profile.tail_sup[n]),
            fmt_f(commutator),
            fmt_f(lo),
            fmt_f(hi)
        ));
    }
    let mut report = Report::default();
    report.check("commutes_with_components", comm.iter().all(|&c| c < 1e-12));
    report.check("regular_entries_are_inverse_order", entries_exact);
    report.set("gamma", profile.gamma.clone());
    report.set("tail_sup_last", *profile.tail_sup.last().unwrap());
    report.plots.push(Plot {
        name: "ghost".into(),
        title: format!("ghost profile, {}", ctx.family.name),
        x_label: "n".into(),
        y_label: "gamma(n)".into(),
        log_y: true,
        series: vec![("gamma".into(), profile.gamma.iter().enumerate().map(|(n, &g)| (n as f64, g)).collect())],
    });
    report.tables.push(t);
    Ok(report)
}

/// d-sequences of the basic Kazhdan projection and, on towers, of the
/// isotypical projections of the characters of `character_level`, which
/// have rank `dim²` exactly on the levels they factor through. Cyclic levels
/// use their abelian characters; `SL(2)` levels need a `characters` file.
pub fn kazhdan(ctx: &Context) -> Result<Report> {
    let x = &ctx.family.space;
    let space = IndexSpace::space("X", x.clone());
    let reports = spectral_reports(x, &options(ctx))?;
    let mut t = Table::new("d_sequence", "sigma,dim,n,label,trace_re,trace_im,defect,rank");
    let mut report = Report::default();
    let emit = |sigma: &str, dim: usize, op: &coarse_core::BlockOperator, t: &mut Table| -> Result<Vec<Option<usize>>> {
        let d = d_sequence(op, x)?;
        for e in &d.d_sequence {
            t.push(format!(
                "{sigma},{dim},{},{},{},{},{},{}",
                e.component,
                ctx.label(e.component),
                fmt_f(e.trace.re),
                fmt_f(e.trace.im),
                fmt_f(e.defect),
                e.rank.map_or("none".into(), |r| r.to_string())
            ));
        }
        Ok(d.ranks())
    };
    let basic = basic_kazhdan_with_reports(x, space.clone(), &reports)?;
    let basic_ranks = emit("basic", 1, &basic, &mut t)?;
    report.check("basic_ranks_one", basic_ranks.iter().all(|&r| r == Some(1)));
    let mut sequences = serde_json::Map::new();
    sequences.insert("basic".into(), json!(basic_ranks));

    if let Some(tower) = &ctx.family.tower {
        let level = ctx.params.character_level.unwrap_or(0);
        if level >= tower.len() {
            return Err(LabError::Usage(format!(
                "character_level {level} is beyond the {} tower levels",
                tower.len()
            )));
        }
        let group = tower.level(level);
        let table = match (&ctx.params.characters, tower.kind()) {
            (Some(path), _) => {
                let p = ctx.loaded.resolve_path(path);
                let text = std::fs::read_to_string(&p).map_err(|source| LabError::Io { path: p.clone(), source })?;
                Some(CharacterTable::load(&text, group)?)
            }
            (None, TowerKind::Cyclic) => Some(CharacterTable::abelian_characters(group)?),
            (None, TowerKind::Sl2) => None,
        };
        match table {
            Some(table) => {
                let mut all_ok = true;
                for (j, c) in table.characters().iter().enumerate() {
                    let name = format!("chi{j}@{}", ctx.label(level));
                    let p = tower_kazhdan_projection(tower, level, c, space.clone())?;
                    let ranks = emit(&name, c.dim, &p, &mut t)?;
                    let expected = (0..tower.len())
                        .map(|n| {
                            let factors = n >= level || c.push_forward(&tower.reduction(level, n)?, tower.level(n).order()).is_some();
                            Ok(Some(if factors { c.dim * c.dim } else { 0 }))
                        })
                        .collect::<std::result::Result<Vec<_>, coarse_core::Error>>()?;
                    all_ok &= ranks == expected;
                    sequences.insert(name, json!(ranks));
                }
                report.check("character_d_sequences", all_ok);
                report.set("character_level", level);
            }
            None => report.set(
                "character_note",
                "no character table for a non-abelian level; only the basic projection was run",
            ),
        }
    }
    report.set("d_sequences", Value::Object(sequences));
    report.tables.push(t);
    Ok(report)
}
