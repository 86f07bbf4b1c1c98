use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("system too large: {atoms} atoms exceeds the cap of {cap}")]
    SizeCap { atoms: u32, cap: u32 },

    /// A numerical post-condition (Hermiticity, eigen residual, ...) failed.
    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
