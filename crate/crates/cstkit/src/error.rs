use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum KitError {
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("parser produced no tree")]
    ParseFatal,
    #[error("cannot infer input format of {0}")]
    UnknownFormat(PathBuf),
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cstkit_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl KitError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> KitError {
        KitError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = KitError> = std::result::Result<T, E>;
