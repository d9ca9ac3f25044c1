//! TOML family manifests.
//!
//! A manifest names a family either as an explicit list of components or
//! as a quotient tower, plus optional parameter defaults:
//!
//! ```toml
//! name = "sl2"
//! component = [{ kind = "sl2", q = 5 }, { kind = "sl2", q = 7 }]
//!
//! [params]
//! depth = 5
//! ```
//!
//! ```toml
//! name = "cyclic-tower"
//! [tower]
//! kind = "cyclic"
//! base = 3
//! ratio = 2
//! levels = 5
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use coarse_core::graphs::{binary_tree, complete_graph, cycle_graph, path_graph, petersen_graph, random_regular, Graph, SpaceOfGraphs};
use coarse_core::groups::{FiniteGroup, QuotientTower, TowerKind};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Manifests shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("cycles", include_str!("../manifests/cycles.toml")),
    ("complete", include_str!("../manifests/complete.toml")),
    ("cyclic-tower", include_str!("../manifests/cyclic-tower.toml")),
    ("sl2", include_str!("../manifests/sl2.toml")),
    ("sl2-tower", include_str!("../manifests/sl2-tower.toml")),
    ("binary-trees", include_str!("../manifests/binary-trees.toml")),
];

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, rename = "component", skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    Petersen,
    /// Seed defaults to the run seed plus the component index.
    RandomRegular {
        n: usize,
        d: usize,
        seed: Option<u64>,
    },
    /// Cayley graph of `Z/n` with generators `±1`.
    Cyclic {
        n: u64,
    },
    /// Cayley graph of `SL(2, Z/q)` with the standard generators.
    Sl2 {
        q: u64,
    },
    BinaryTree {
        depth: usize,
    },
    /// Edge-list file, relative to the manifest.
    EdgeList {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerKindSpec {
    Cyclic,
    Sl2,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub kind: TowerKindSpec,
    pub base: u64,
    pub ratio: u64,
    pub levels: usize,
}

/// Parameter defaults; command-line flags take precedence. Every field is
/// optional and each experiment documents its own fallback.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<usize>,
    /// Truncation depth of universal covers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Truncation depth as a multiple of each component's girth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_girth_factor: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_cap: Option<usize>,
    /// Random operators (or pairs) per cover.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber: Option<usize>,
    /// Tower level whose characters are inflated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub character_level: Option<usize>,
    /// Character-table file for a non-abelian level, relative to the manifest.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<PathBuf>,
    /// `laplacian` or `random`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
}

/// Where a manifest came from; relative paths inside it resolve against `dir`.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: Manifest,
    pub source_name: String,
    pub dir: Option<PathBuf>,
}

impl Manifest {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| LabError::Manifest {
            source_name: source_name.to_string(),
            message: e.message().to_string(),
        })?;
        match (m.components.is_empty(), &m.tower) {
            (true, None) => Err(manifest_err(source_name, "one of `component` or `tower` is required")),
            (false, Some(_)) => Err(manifest_err(source_name, "`component` and `tower` are mutually exclusive")),
            _ => Ok(m),
        }
    }

    pub fn bundled(name: &str) -> Option<Self> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| Self::parse(text, n).expect("bundled manifests parse"))
    }
}

fn manifest_err(source_name: &str, message: impl Into<String>) -> LabError {
    LabError::Manifest {
        source_name: source_name.to_string(),
        message: message.into(),
    }
}

/// Reads `spec` as a file path, falling back to a bundled manifest name.
pub fn load(spec: &str) -> Result<LoadedManifest> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        return Ok(LoadedManifest {
            manifest: Manifest::parse(&text, spec)?,
            source_name: spec.to_string(),
            dir: path.parent().map(Path::to_path_buf),
        });
    }
    match Manifest::bundled(spec) {
        Some(manifest) => Ok(LoadedManifest {
            manifest,
            source_name: spec.to_string(),
            dir: None,
        }),
        None => Err(LabError::Usage(format!(
            "`{spec}` is neither a file nor a bundled manifest ({})",
            BUNDLED.iter().map(|b| b.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// A materialized family.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub space: Arc<SpaceOfGraphs>,
    pub tower: Option<QuotientTower>,
    /// Human-readable label per component.
    pub labels: Vec<String>,
}

impl LoadedManifest {
    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        match &self.dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Builds the first `prefix` components (all when `None`).
    pub fn family(&self, prefix: Option<usize>, seed: u64) -> Result<Family> {
        let m = &self.manifest;
        if prefix == Some(0) {
            return Err(LabError::Usage("--prefix must be at least 1".into()));
        }
        if let Some(t) = &m.tower {
            let levels = prefix.map_or(t.levels, |p| p.min(t.levels));
            let kind = match t.kind {
                TowerKindSpec::Cyclic => TowerKind::Cyclic,
                TowerKindSpec::Sl2 => TowerKind::Sl2,
            };
            let tower = QuotientTower::build(kind, t.base, t.ratio, levels)?;
            let space = Arc::new(tower.space_of_graphs()?);
            let prefix_name = if t.kind == TowerKindSpec::Cyclic { "Z" } else { "SL2" };
            let labels = tower.moduli().iter().map(|q| format!("{prefix_name}/{q}")).collect();
            return Ok(Family {
                name: m.name.clone(),
                space,
                tower: Some(tower),
                labels,
            });
        }
        let count = prefix.map_or(m.components.len(), |p| p.min(m.components.len()));
        let mut graphs = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        for (i, c) in m.components[..count].iter().enumerate() {
            let (g, label) = self.component(c, seed.wrapping_add(i as u64))?;
            graphs.push(g);
            labels.push(label);
        }
        Ok(Family {
            name: m.name.clone(),
            space: Arc::new(SpaceOfGraphs::new(graphs)?),
            tower: None,
            labels,
        })
    }

    fn component(&self, c: &ComponentSpec, seed: u64) -> Result<(Graph, String)> {
        Ok(match c {
            ComponentSpec::Cycle { n } => (cycle_graph(*n)?, format!("C{n}")),
            ComponentSpec::Complete { n } => (complete_graph(*n)?, format!("K{n}")),
            ComponentSpec::Path { n } => (path_graph(*n)?, format!("P{n}")),
            ComponentSpec::Petersen => (petersen_graph(), "Petersen".into()),
            ComponentSpec::RandomRegular { n, d, seed: s } => {
                let s = s.unwrap_or(seed);
                (random_regular(*n, *d, s)?, format!("RR({n},{d},{s})"))
            }
            ComponentSpec::Cyclic { n } => (FiniteGroup::cyclic(*n)?.cayley_graph()?, format!("Z/{n}")),
            ComponentSpec::Sl2 { q } => (FiniteGroup::sl2(*q)?.cayley_graph()?, format!("SL2/{q}")),
            ComponentSpec::BinaryTree { depth } => (binary_tree(*depth)?, format!("T{depth}")),
            ComponentSpec::EdgeList { path } => {
                let p = self.resolve_path(path);
                let text = std::fs::read_to_string(&p).map_err(|source| LabError::Io { path: p.clone(), source })?;
                (Graph::parse_edge_list(&text)?, p.display().to_string())
            }
        })
    }
}
