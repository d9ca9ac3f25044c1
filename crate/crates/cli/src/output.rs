//! CSV tables, the JSON summary and static SVG plots.
//!
//! Everything is formatted deterministically: rows are emitted in
//! component order and floats with fixed formats, so reruns with the same
//! manifest and seed produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{LabError, Result};

/// Version tag of every CSV schema; bumped on any column change.
pub const CSV_SCHEMA: &str = "v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; written as `<name>.csv`.
    pub name: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: impl Into<String>) -> Self {
        Table {
            name: name.into(),
            header: header.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// `{:.12e}`, or `none`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), fmt_f)
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

/// A line plot with one or more series.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

impl Plot {
    pub fn to_svg(&self) -> String {
        let (w, h, ml, mr, mt, mb) = (640.0, 420.0, 70.0, 150.0, 40.0, 50.0);
        let ty = |y: f64| if self.log_y { y.max(1e-300).log10() } else { y };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.1.iter().map(|&(x, y)| (x, ty(y))))
            .filter(|p| p.1.is_finite())
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |a, &(x, y)| {
                (a.0.min(x), a.1.max(x), a.2.min(y), a.3.max(y))
            });
        if pts.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pw = w - ml - mr;
        let ph = h - mt - mb;
        let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| mt + ph - (y - y0) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            ml + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(s, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let label_y = if self.log_y { format!("1e{fy:.1}") } else { format!("{fy:.3}") };
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{fx:.3}</text>"#,
                sx(fx),
                mt + ph + 16.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label_y}</text>"#,
                ml - 6.0,
                sy(fy) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            h - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            mt + ph / 2.0,
            mt + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, (label, data)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = data
                .iter()
                .map(|&(x, y)| (x, ty(y)))
                .filter(|p| p.1.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            for p in &path {
                let (cx, cy) = p.split_once(',').unwrap();
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
            }
            let ly = mt + 14.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                w - mr + 10.0,
                w - mr + 30.0
            );
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - mr + 36.0, ly + 4.0, escape(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    /// Experiment-specific summary fields.
    pub summary: Map<String, Value>,
    /// Named pass/fail checks.
    pub checks: Map<String, Value>,
}

impl Report {
    pub fn check(&mut self, name: &str, passed: bool) {
        self.checks.insert(name.to_string(), Value::Bool(passed));
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|v| v.as_bool() == Some(true))
    }
}

/// Writes tables, `summary.json` and (optionally) plots into `dir`, one
/// file at a time; returns the paths written.
pub fn write_report(report: &Report, header: Map<String, Value>, dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LabError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    for t in &report.tables {
        let p = dir.join(format!("{}.csv", t.name));
        std::fs::write(&p, t.to_csv()).map_err(io(&p))?;
        written.push(p);
    }
    if plots {
        for plot in &report.plots {
            let p = dir.join(format!("{}.svg", plot.name));
            std::fs::write(&p, plot.to_svg()).map_err(io(&p))?;
            written.push(p);
        }
    }
    let mut summary = header;
    summary.insert("csv_schema".into(), CSV_SCHEMA.into());
    summary.insert(
        "tables".into(),
        report
            .tables
            .iter()
            .map(|t| (format!("{}.csv", t.name), Value::String(t.header.clone())))
            .collect::<Map<_, _>>()
            .into(),
    );
    summary.insert("checks".into(), report.checks.clone().into());
    summary.insert("passed".into(), report.all_checks_pass().into());
    summary.extend(report.summary.clone());
    let p = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&Value::Object(summary)).expect("summary serializes");
    text.push('\n');
    std::fs::write(&p, text).map_err(io(&p))?;
    written.push(p);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_svg() {
        let mut t = Table::new("x", "a,b");
        t.push("1,2".into());
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
        let p = Plot {
            name: "p".into(),
            title: "t <1>".into(),
            x_label: "n".into(),
            y_label: "y".into(),
            log_y: true,
            series: vec![("s".into(), vec![(0.0, 1.0), (1.0, 1e-3)])],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.contains("t &lt;1&gt;") && svg.contains("<polyline"));
    }
}
