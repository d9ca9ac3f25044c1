//! The ten experiments. Each builds a [`Report`] from a [`Context`]; the
//! runner writes it out.

mod covers;
mod obstruction;
mod operators;
mod rips;
mod spectral;

use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::error::{LabError, Result};
use crate::manifest::{self, Family, LoadedManifest, Params};
use crate::output::{write_report, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    ExpanderReport,
    GirthGrowth,
    Faithfulness,
    GhostDecay,
    Kazhdan,
    Onl,
    LiftCheck,
    Atiyah,
    Obstruction,
    Rips,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::ExpanderReport,
        Experiment::GirthGrowth,
        Experiment::Faithfulness,
        Experiment::GhostDecay,
        Experiment::Kazhdan,
        Experiment::Onl,
        Experiment::LiftCheck,
        Experiment::Atiyah,
        Experiment::Obstruction,
        Experiment::Rips,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ExpanderReport => "expander-report",
            Experiment::GirthGrowth => "girth-growth",
            Experiment::Faithfulness => "faithfulness",
            Experiment::GhostDecay => "ghost-decay",
            Experiment::Kazhdan => "kazhdan",
            Experiment::Onl => "onl",
            Experiment::LiftCheck => "lift-check",
            Experiment::Atiyah => "atiyah",
            Experiment::Obstruction => "obstruction",
            Experiment::Rips => "rips",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// Command-line overrides of manifest parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub prefix: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    /// File path or bundled manifest name.
    pub manifest: String,
    pub out: PathBuf,
    pub overrides: Overrides,
    pub plots: bool,
}

/// A loaded manifest, its family and the effective parameters.
#[derive(Debug, Clone)]
pub struct Context {
    pub loaded: LoadedManifest,
    pub family: Family,
    pub params: Params,
    pub seed: u64,
}

impl Context {
    pub fn new(manifest: &str, overrides: &Overrides) -> Result<Self> {
        let loaded = manifest::load(manifest)?;
        Self::from_loaded(loaded, overrides)
    }

    pub fn from_loaded(loaded: LoadedManifest, overrides: &Overrides) -> Result<Self> {
        let mut params = loaded.manifest.params.clone();
        if overrides.prefix.is_some() {
            params.prefix = overrides.prefix;
        }
        if overrides.seed.is_some() {
            params.seed = overrides.seed;
        }
        if overrides.tol.is_some() {
            params.tol = overrides.tol;
        }
        if overrides.grid.is_some() {
            params.grid = overrides.grid.clone();
        }
        if let Some(t) = params.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(LabError::Usage(format!("tolerance must be positive, got {t}")));
            }
        }
        let seed = params.seed.unwrap_or(0);
        let family = loaded.family(params.prefix, seed)?;
        Ok(Context {
            loaded,
            family,
            params,
            seed,
        })
    }

    pub fn grid(&self, default: &[f64]) -> Vec<f64> {
        self.params.grid.clone().unwrap_or_else(|| default.to_vec())
    }

    /// The grid as nonnegative integers.
    pub fn int_grid(&self, default: &[u64]) -> Result<Vec<u64>> {
        match &self.params.grid {
            None => Ok(default.to_vec()),
            Some(g) => g
                .iter()
                .map(|&v| {
                    if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
                        Ok(v as u64)
                    } else {
                        Err(LabError::Usage(format!("grid value {v} must be a nonnegative integer here")))
                    }
                })
                .collect(),
        }
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.params.tol.unwrap_or(default)
    }

    pub fn label(&self, n: usize) -> &str {
        &self.family.labels[n]
    }

    fn header(&self, experiment: Experiment) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("experiment".into(), experiment.name().into());
        m.insert("manifest".into(), self.loaded.manifest.name.clone().into());
        m.insert("components".into(), self.family.labels.clone().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("params".into(), serde_json::to_value(&self.params).expect("params serialize"));
        m
    }
}

/// Deterministic seed for trial `trial` of item `item`.
pub(crate) fn mix_seed(seed: u64, item: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ item.wrapping_mul(0xBF58_476D_1CE4_E5B9) ^ trial.wrapping_mul(0x94D0_49BB_1331_11EB)
}

pub fn execute(experiment: Experiment, ctx: &Context) -> Result<Report> {
    match experiment {
        Experiment::ExpanderReport => spectral::expander_report(ctx),
        Experiment::GirthGrowth => spectral::girth_growth(ctx),
        Experiment::Faithfulness => covers::faithfulness(ctx),
        Experiment::GhostDecay => spectral::ghost_decay(ctx),
        Experiment::Kazhdan => spectral::kazhdan(ctx),
        Experiment::Onl => operators::onl(ctx),
        Experiment::LiftCheck => covers::lift_check(ctx),
        Experiment::Atiyah => operators::atiyah(ctx),
        Experiment::Obstruction => obstruction::obstruction(ctx),
        Experiment::Rips => rips::rips(ctx),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub report: Report,
}

/// Loads, runs and writes one experiment.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutcome> {
    let ctx = Context::new(&spec.manifest, &spec.overrides)?;
    let report = execute(spec.experiment, &ctx)?;
    let files = write_report(&report, ctx.header(spec.experiment), &spec.out, spec.plots)?;
    Ok(RunOutcome { files, report })
}
