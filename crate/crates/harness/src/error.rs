use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] tangle::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for bad input, 3 for numeric trouble.
    pub fn exit_code(&self) -> i32 {
        use tangle::Error as E;
        match self {
            HarnessError::Usage(_) | HarnessError::Io(_) => 2,
            HarnessError::Core(e) => match e {
                E::Parse(_) | E::Domain(_) | E::Arity { .. } | E::Size(_) | E::InvalidState(_)
                | E::UnsupportedRank { .. } => 2,
                _ => 3,
            },
        }
    }
}
