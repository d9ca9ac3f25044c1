use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex 0")]
    DisconnectedGraph { unreachable: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("family of graphs is empty")]
    EmptyFamily,
    #[error("prefix of {components} components is too short to separate at R = {radius}")]
    PrefixTooShort { radius: f64, components: usize },
    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegreeSequence(String),

    #[error("bad modulus {modulus}: {reason}")]
    BadModulus { modulus: u64, reason: String },
    #[error("generating set reaches {reached} of {expected} elements")]
    NotGenerating { reached: usize, expected: usize },
    #[error("group of order {order} exceeds the limit {limit}")]
    GroupTooLarge { order: u64, limit: u64 },
    #[error("levels with moduli {from} and {to} are not comparable")]
    IncomparableLevels { from: u64, to: u64 },
    #[error("group is not abelian")]
    NonAbelianGroup,
    #[error("character table fails orthogonality (worst residual {residual:e})")]
    OrthogonalityFailure { residual: f64 },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("truncation depth {depth} too shallow for radius {radius}")]
    TruncationTooShallow { radius: u64, depth: usize },
    #[error("cover would have more than {limit} vertices")]
    CoverTooLarge { limit: usize },
    #[error("faithfulness profile incomplete: no N_R for R = {radius} within the prefix")]
    ProfileIncomplete { radius: u64 },

    #[error("index spaces differ: `{left}` vs `{right}`")]
    IndexSpaceMismatch { left: String, right: String },
    #[error("fiber dimensions differ: {left} vs {right}")]
    FiberMismatch { left: usize, right: usize },
    #[error("dimension {dim} is too large for a dense norm (limit {limit})")]
    TooLargeForDenseNorm { dim: usize, limit: usize },
    #[error("cover{} is not a {required}-metric cover{}", component_label(.component), witness_label(.witness))]
    FaithfulnessTooSmall {
        component: Option<usize>,
        required: u64,
        witness: Option<String>,
    },
    #[error("component {component} is within propagation range of another component")]
    NotSeparated { component: usize },
    #[error("operator is not deck-invariant (worst violation {worst:e})")]
    NotInvariant { worst: f64 },
    #[error("cover is not a finite Galois cover")]
    NotGalois,

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("component {component} has no spectral gap")]
    NoSpectralGap { component: usize },

    #[error("dimension cap {cap} exceeds the maximum {max}")]
    DimCapTooLarge { cap: usize, max: usize },
    #[error("complex exceeds {limit} simplices")]
    ComplexTooLarge { limit: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn component_label(component: &Option<usize>) -> String {
    component.map(|c| format!(" of component {c}")).unwrap_or_default()
}

fn witness_label(witness: &Option<String>) -> String {
    witness.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyEdgeList => "EmptyEdgeList",
            Error::DisconnectedGraph { .. } => "DisconnectedGraph",
            Error::SelfLoop(_) => "SelfLoop",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::EmptyFamily => "EmptyFamily",
            Error::PrefixTooShort { .. } => "PrefixTooShort",
            Error::InfeasibleDegreeSequence(_) => "InfeasibleDegreeSequence",
            Error::BadModulus { .. } => "BadModulus",
            Error::NotGenerating { .. } => "NotGenerating",
            Error::GroupTooLarge { .. } => "GroupTooLarge",
            Error::IncomparableLevels { .. } => "IncomparableLevels",
            Error::NonAbelianGroup => "NonAbelianGroup",
            Error::OrthogonalityFailure { .. } => "OrthogonalityFailure",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::InvalidCharacter(_) => "InvalidCharacter",
            Error::TruncationTooShallow { .. } => "TruncationTooShallow",
            Error::CoverTooLarge { .. } => "CoverTooLarge",
            Error::ProfileIncomplete { .. } => "ProfileIncomplete",
            Error::IndexSpaceMismatch { .. } => "IndexSpaceMismatch",
            Error::FiberMismatch { .. } => "FiberMismatch",
            Error::TooLargeForDenseNorm { .. } => "TooLargeForDenseNorm",
            Error::FaithfulnessTooSmall { .. } => "FaithfulnessTooSmall",
            Error::NotSeparated { .. } => "NotSeparated",
            Error::NotInvariant { .. } => "NotInvariant",
            Error::NotGalois => "NotGalois",
            Error::IsolatedVertex(_) => "IsolatedVertex",
            Error::NoSpectralGap { .. } => "NoSpectralGap",
            Error::DimCapTooLarge { .. } => "DimCapTooLarge",
            Error::ComplexTooLarge { .. } => "ComplexTooLarge",
            Error::Parse { .. } => "Parse",
        }
    }
}
