//! Acceptance suite. Prints one line per criterion and exits nonzero if
//! any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use coarse_core::graphs::{complete_graph, cycle_graph};
use coarse_core::spectral::{basic_kazhdan, laplacian_spectrum};
use coarse_core::IndexSpace;
use coarse_lab::{execute, Context, Experiment, Overrides, Report};
use serde_json::Value;

/// Achieved localization ratio at `S = 4` on the depth-4 binary tree.
const ONL_DEPTH4: f64 = 0.9835627661835317;
/// Smallest spectral gap of the bundled `SL(2, Z/q)` family.
const SL2_GAP: f64 = 0.155727767304014;

const BUNDLED: [&str; 6] = ["cycles", "complete", "cyclic-tower", "sl2", "sl2-tower", "binary-trees"];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

type Criterion = fn() -> Outcome;

fn context(manifest: &str, overrides: Overrides) -> Context {
    Context::new(manifest, &overrides).unwrap_or_else(|e| panic!("{manifest}: {e}"))
}

fn report(experiment: Experiment, manifest: &str, overrides: Overrides) -> Report {
    execute(experiment, &context(manifest, overrides)).unwrap_or_else(|e| panic!("{} on {manifest}: {e}", experiment.name()))
}

/// Rows of a table as maps from column name to raw field. Only the
/// columns before the first quoted field are kept.
fn rows(report: &Report, table: &str) -> Vec<BTreeMap<String, String>> {
    let t = report.table(table).unwrap_or_else(|| panic!("no table {table}"));
    let header: Vec<&str> = t.header.split(',').collect();
    t.rows
        .iter()
        .map(|r| {
            let plain = r.split('"').next().unwrap_or("");
            header.iter().zip(plain.split(',')).map(|(h, v)| (h.to_string(), v.to_string())).collect()
        })
        .collect()
}

fn num(row: &BTreeMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap_or_else(|_| panic!("column {col}: `{}`", row[col]))
}

fn check(report: &Report, name: &str) -> bool {
    report.checks.get(name).and_then(Value::as_bool).unwrap_or(false)
}

fn ghost_entries() -> Outcome {
    let ctx = context("complete", Overrides::default());
    let x = &ctx.family.space;
    let p = basic_kazhdan(x, IndexSpace::space("X", x.clone())).unwrap();
    let mut worst: f64 = 0.0;
    let mut counts = vec![0usize; x.len()];
    for (a, b, blk) in p.blocks() {
        let (n, _) = x.locate(a);
        assert_eq!(n, x.locate(b).0, "basic projection couples components");
        let size = x.range(n).len() as f64;
        worst = worst.max((blk[0].re - 1.0 / size).abs().max(blk[0].im.abs()));
        counts[n] += 1;
    }
    let dense = (0..x.len()).all(|n| counts[n] == x.range(n).len().pow(2));
    let ghost = report(Experiment::GhostDecay, "complete", Overrides::default());
    let gamma_ok = rows(&ghost, "ghost")
        .iter()
        .all(|r| (num(r, "gamma") - 1.0 / num(r, "|G_n|")).abs() < 1e-12);
    Outcome::new(
        worst < 1e-10 && dense && gamma_ok,
        format!("K3..K12: max |p_xy - 1/n| = {worst:.1e} (tol 1e-10), all entries present {dense}, gamma(n) = 1/n {gamma_ok}"),
    )
}

fn d_sequences() -> Outcome {
    let mut ok = true;
    let mut worst_defect: f64 = 0.0;
    let mut notes = Vec::new();
    for m in ["cycles", "complete", "cyclic-tower", "sl2", "sl2-tower"] {
        let r = report(Experiment::Kazhdan, m, Overrides::default());
        ok &= check(&r, "basic_ranks_one");
        if r.checks.contains_key("character_d_sequences") {
            ok &= check(&r, "character_d_sequences");
        }
        for row in rows(&r, "d_sequence") {
            worst_defect = worst_defect.max(num(&row, "defect"));
        }
        if m == "cyclic-tower" {
            let seqs = &r.summary["d_sequences"];
            let primitive = seqs["chi1@Z/12"] == serde_json::json!([0, 0, 1, 1, 1]);
            let trivial = seqs["chi0@Z/12"] == serde_json::json!([1, 1, 1, 1, 1]);
            ok &= primitive && trivial;
            notes.push(format!("primitive chi on Z/12 -> {}", seqs["chi1@Z/12"]));
        }
    }
    ok &= worst_defect < 0.25;
    Outcome::new(
        ok,
        format!("basic ranks all 1, {}, max defect {worst_defect:.1e} (tol 0.25)", notes.join(", ")),
    )
}

fn lifting() -> Outcome {
    let mut ok = true;
    let mut tested = Vec::new();
    let mut worst: f64 = 0.0;
    for m in ["cyclic-tower", "sl2", "sl2-tower"] {
        let r = report(Experiment::LiftCheck, m, Overrides::default());
        for row in rows(&r, "lift") {
            match row["status"].as_str() {
                "ok" => {
                    let d = num(&row, "max_mult_defect");
                    worst = worst.max(d);
                    ok &= d < 1e-10 && num(&row, "max_adjoint_defect") == 0.0 && row["trials"] == "100";
                    tested.push(row["cover"].clone());
                }
                "FaithfulnessTooSmall" => {}
                other => {
                    ok = false;
                    tested.push(format!("{} failed: {other}", row["cover"]));
                }
            }
        }
    }
    ok &= tested.iter().any(|c| c.starts_with("Z/")) && tested.iter().any(|c| c.starts_with("SL2"));
    Outcome::new(
        ok,
        format!(
            "{} covers x 100 pairs, max ||lift(TS) - lift(T)lift(S)|| = {worst:.1e} (tol 1e-10), adjoint exact; covers {}",
            tested.len(),
            tested.join(" ")
        ),
    )
}

fn atiyah() -> Outcome {
    let mut ok = true;
    let mut verified = 0;
    let mut worst: f64 = 0.0;
    for m in ["cyclic-tower", "cycles", "complete", "sl2"] {
        let r = report(Experiment::Atiyah, m, Overrides::default());
        ok &= ["lift_commutes", "trace_gap", "base_trace_vanishes", "propagation_within_five"]
            .iter()
            .all(|c| check(&r, c));
        verified += r.summary["covers_verified"].as_u64().unwrap_or(0);
        for key in ["worst_lift_commutes", "worst_trace_gap"] {
            worst = worst.max(r.summary[key].as_f64().unwrap_or(f64::INFINITY));
        }
    }
    ok &= verified > 0;
    Outcome::new(
        ok,
        format!("{verified} verified covers, worst identity defect {worst:.1e} (tol 1e-8), base traces vanish within 1e-8"),
    )
}

fn obstruction() -> Outcome {
    let r = report(Experiment::Obstruction, "sl2", Overrides::default());
    let star: Vec<_> = rows(&r, "obstruction").into_iter().filter(|row| row["t_star"] == "true").collect();
    let traces_ok = star.iter().all(|row| (num(row, "base_trace") - 1.0).abs() <= 1e-3);
    let bound_ok = star
        .iter()
        .all(|row| num(row, "lifted_norm") <= (-num(row, "t") * num(row, "g0")).exp() + 0.05);
    let ratios: Vec<f64> = star.iter().map(|row| num(row, "ratio")).collect();
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-3));
    let times: Vec<f64> = star.iter().map(|row| num(row, "t")).collect();
    let control = report(
        Experiment::Obstruction,
        "cycles",
        Overrides {
            grid: Some(times.clone()),
            ..Overrides::default()
        },
    );
    let floor = rows(&control, "obstruction")
        .iter()
        .map(|row| num(row, "lifted_norm"))
        .fold(f64::INFINITY, f64::min);
    let largest = star.iter().map(|row| num(row, "lifted_norm")).fold(0.0, f64::max);
    Outcome::new(
        traces_ok && bound_ok && monotone && floor >= 0.5 && !star.is_empty(),
        format!(
            "sl2: {} components, base traces within 1e-3 {traces_ok}, lifted <= e^(-t*g0) + 0.05 {bound_ok} (largest {largest:.2e}), ratio monotone (rel slack 1e-3) {monotone}; cycles at the same t: min lifted {floor:.3} (>= 0.5)",
            star.len()
        ),
    )
}

fn faithfulness() -> Outcome {
    let mut ok = true;
    let mut checked = 0;
    let mut acyclic = 0;
    for m in BUNDLED {
        let r = report(Experiment::Faithfulness, m, Overrides::default());
        for row in rows(&r, "universal") {
            checked += 1;
            if row["girth"] == "inf" {
                acyclic += 1;
                ok &= row["passes_at_half"] == "true";
            } else {
                ok &= row["passes_at_half"] == "true" && row["fails_at_girth"] == "true";
            }
        }
    }
    Outcome::new(
        ok,
        format!("{checked} components pass at floor(g/2) and fail at g with a witness; {acyclic} acyclic components are their own universal cover"),
    )
}

fn onl() -> Outcome {
    let r = report(Experiment::Onl, "binary-trees", Overrides::default());
    let table = rows(&r, "onl");
    let ratios: Vec<f64> = table.iter().map(|row| num(row, "ratio")).collect();
    let oracle = (ratios[0] - ONL_DEPTH4).abs() < 1e-9;
    let stable = ratios.iter().all(|c| (c - ONL_DEPTH4).abs() <= 0.1 * ONL_DEPTH4);
    let support = table.iter().all(|row| num(row, "support_diameter") <= 4.0) && check(&r, "support_diameter_within_s");
    Outcome::new(
        oracle && stable && support && table.len() == 4,
        format!("depths 4-7 at S=4: c = {ratios:.6?}, depth-4 oracle within 1e-9 {oracle}, within 10% {stable}, support diameter <= 4 {support}"),
    )
}

fn spectra() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 3..=24 {
        let ev = laplacian_spectrum(&cycle_graph(n).unwrap()).unwrap();
        let mut expected: Vec<f64> = (0..n).map(|j| 1.0 - (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        expected.sort_by(f64::total_cmp);
        worst = ev.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        let ev = laplacian_spectrum(&complete_graph(n).unwrap()).unwrap();
        worst = worst.max(ev[0].abs());
        worst = ev[1..].iter().map(|l| (l - n as f64 / (n - 1) as f64).abs()).fold(worst, f64::max);
    }
    let verdict = |m: &str| report(Experiment::ExpanderReport, m, Overrides::default()).summary["verdict"].clone();
    let complete = verdict("complete");
    let cycles = verdict("cycles");
    let sl2 = verdict("sl2");
    let gap = sl2["min_gap"].as_f64().unwrap_or(f64::NAN);
    let verdicts = complete["weak_expander"] == true
        && complete["degree_bounded"] == false
        && cycles["weak_expander"] == false
        && sl2["expander"] == true
        && (gap - SL2_GAP).abs() < 1e-9;
    Outcome::new(
        worst < 1e-9 && verdicts,
        format!(
            "K_n and C_n spectra (n = 3..24) max error {worst:.1e} (tol 1e-9); verdicts complete: {}, cycles: {}, sl2: {} with c = {gap:.15} (pinned {SL2_GAP}, tol 1e-9)",
            complete["label"], cycles["label"], sl2["label"]
        ),
    )
}

fn rips() -> Outcome {
    let plan: [(&str, &[f64]); 4] = [
        ("cycles", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        ("complete", &[0.0, 1.0, 2.0, 3.0]),
        ("cyclic-tower", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]),
        ("binary-trees", &[0.0, 1.0, 2.0, 3.0]),
    ];
    let mut pairs = 0;
    let mut ok = true;
    let mut merged = 0;
    for (m, grid) in plan {
        let r = report(
            Experiment::Rips,
            m,
            Overrides {
                grid: Some(grid.to_vec()),
                ..Overrides::default()
            },
        );
        ok &= check(&r, "monotone_in_r") && check(&r, "splitting_is_partition");
        for row in rows(&r, "rips") {
            if row["status"] == "ok" {
                pairs += 1;
                ok &= row["agrees"] == "true" && row["N_R"] == row["separation"];
                merged += usize::from(row["N_R"] != "0");
            }
        }
    }
    Outcome::new(
        ok && pairs >= 20,
        format!("{pairs} (family, R) pairs match the component separation ({merged} with a merged prefix); simplex sets nested in R"),
    )
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_coarse-lab");
    let root = tempfile::tempdir().unwrap();
    let mut runs = 0;
    let mut mismatches = Vec::new();
    for m in BUNDLED {
        for e in Experiment::ALL {
            let mut outputs = Vec::new();
            for (pass, threads) in [(0, None), (1, Some("2"))] {
                let dir = root.path().join(format!("{m}-{}-{pass}", e.name()));
                let mut cmd = Command::new(bin);
                cmd.args([e.name(), "--manifest", m, "--out"]).arg(&dir).args(["--seed", "7"]);
                match threads {
                    Some(t) => cmd.env("COARSE_LAB_THREADS", t),
                    None => cmd.env_remove("COARSE_LAB_THREADS"),
                };
                let status = cmd.output().unwrap().status;
                assert!(status.success(), "{} on {m} exited with {status}", e.name());
                outputs.push(csv_files(&dir));
            }
            runs += 1;
            if outputs[0].is_empty() || outputs[0] != outputs[1] {
                mismatches.push(format!("{}/{m}", e.name()));
            }
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!("{runs} experiment/manifest pairs run twice (default threads, then 2 threads): byte-identical CSVs; mismatches {mismatches:?}"),
    )
}

fn main() {
    let criteria: [(&str, Criterion, Option<Duration>); 10] = [
        ("ghost entries", ghost_entries, Some(Duration::from_secs(5))),
        ("d-sequences", d_sequences, Some(Duration::from_secs(30))),
        ("lifting homomorphism", lifting, Some(Duration::from_secs(60))),
        ("index identities", atiyah, Some(Duration::from_secs(60))),
        ("lifted heat decay", obstruction, Some(Duration::from_secs(300))),
        ("faithfulness profile", faithfulness, Some(Duration::from_secs(60))),
        ("norm localization on trees", onl, Some(Duration::from_secs(120))),
        ("spectral baselines", spectra, Some(Duration::from_secs(30))),
        ("rips splitting", rips, Some(Duration::from_secs(60))),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = outcome.passed && in_time;
        failed += usize::from(!passed);
        let budget = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        println!(
            "[{}] {:>2}. {name}: {}; {:.2}s{budget}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
