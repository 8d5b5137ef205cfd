use std::path::PathBuf;

use crate::corpus::TokenKey;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate token key {0}")]
    DuplicateKey(TokenKey),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dump is missing {} corpus token(s): {}", .0.len(), format_keys(.0))]
    Coverage(Vec<TokenKey>),

    #[error("surface mismatch at {key}: corpus {corpus:?} vs dump {dump:?}")]
    Alignment {
        key: TokenKey,
        corpus: String,
        dump: String,
    },

    #[error("singular design: column {column:?} is collinear with {with:?}")]
    SingularDesign { column: String, with: Vec<String> },

    #[error("degenerate fit: residual sum of squares is zero")]
    DegenerateFit,

    #[error("models are not nested: {0}")]
    NotNested(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined statistic: {0}")]
    Undefined(String),
}

fn format_keys(keys: &[TokenKey]) -> String {
    const SHOWN: usize = 20;
    let mut out: Vec<String> = keys.iter().take(SHOWN).map(|k| k.to_string()).collect();
    if keys.len() > SHOWN {
        out.push(format!("... ({} more)", keys.len() - SHOWN));
    }
    out.join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
