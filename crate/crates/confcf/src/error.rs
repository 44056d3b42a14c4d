use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: Box<CliError>,
    },
    #[error("invalid schema file: {0}")]
    Config(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("{0}")]
    Data(String),
    #[error("label column `{column}` contains only one class (`{value}`); training needs both")]
    SingleClass { column: String, value: String },
    #[error("invalid model file: {0}")]
    ModelFile(String),
    #[error("schema does not match the model: {0}")]
    SchemaMismatch(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] confcf_core::Error),
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (CliError::Io { .. } | CliError::InFile { .. }) => e,
            e => CliError::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }

    /// 1 for usage errors, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::InFile { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
