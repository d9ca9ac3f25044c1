use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coarse_lab::{init_threads, run, Experiment, ExperimentSpec, Overrides};

/// Coarse-geometry experiments on expanders, covers and Roe-type operators.
#[derive(Parser)]
#[command(name = "coarse-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Laplacian spectra, gaps and the expander verdict.
    ExpanderReport(Common),
    /// Girth of every component.
    GirthGrowth(Common),
    /// Metric-cover radii of universal and quotient covers.
    Faithfulness(Common),
    /// Ghost profile of the basic Kazhdan projection.
    GhostDecay(Common),
    /// d-sequences of Kazhdan projections.
    Kazhdan(Common),
    /// Operator norm localization search.
    Onl(Common),
    /// Multiplicativity of the lift along covers.
    LiftCheck(Common),
    /// Index idempotents and trace identities along covers.
    Atiyah(Common),
    /// Base against lifted heat decay.
    Obstruction(Common),
    /// Rips complexes and their component splitting.
    Rips(Common),
    /// List the bundled manifests.
    Manifests,
}

#[derive(Args)]
struct Common {
    /// Manifest file, or the name of a bundled manifest.
    #[arg(long)]
    manifest: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Use only the first N components or tower levels.
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated grid (radii, scales or times, by experiment).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    grid: Option<Vec<f64>>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::ExpanderReport(c) => (Experiment::ExpanderReport, c),
        Command::GirthGrowth(c) => (Experiment::GirthGrowth, c),
        Command::Faithfulness(c) => (Experiment::Faithfulness, c),
        Command::GhostDecay(c) => (Experiment::GhostDecay, c),
        Command::Kazhdan(c) => (Experiment::Kazhdan, c),
        Command::Onl(c) => (Experiment::Onl, c),
        Command::LiftCheck(c) => (Experiment::LiftCheck, c),
        Command::Atiyah(c) => (Experiment::Atiyah, c),
        Command::Obstruction(c) => (Experiment::Obstruction, c),
        Command::Rips(c) => (Experiment::Rips, c),
        Command::Manifests => {
            for (name, _) in coarse_lab::manifest::BUNDLED {
                let m = coarse_lab::Manifest::bundled(name).expect("bundled");
                println!("{name}\t{}", m.description.unwrap_or_default());
            }
            return ExitCode::SUCCESS;
        }
    };
    let spec = ExperimentSpec {
        experiment,
        manifest: common.manifest,
        out: common.out,
        overrides: Overrides {
            prefix: common.prefix,
            seed: common.seed,
            tol: common.tol,
            grid: common.grid,
        },
        plots: common.plot,
    };
    match init_threads().and_then(|_| run(&spec)) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
