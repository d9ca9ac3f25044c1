use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] coarse_core::Error),

    #[error("manifest {source_name}: {message}")]
    Manifest { source_name: String, message: String },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    /// Stable name for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Core(e) => e.kind(),
            LabError::Manifest { .. } => "ManifestInvalid",
            LabError::Usage(_) => "Usage",
            LabError::Io { .. } => "Io",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
