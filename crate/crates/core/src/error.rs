use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Adaptive quadrature hit its subdivision budget. `partial` is the best
    /// estimate available at that point.
    #[error("quadrature did not converge: partial = {partial:e}, est_error = {est_error:e}")]
    Convergence { partial: f64, est_error: f64 },

    #[error("extrapolation unreliable: {0}")]
    ExtrapolationUnreliable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
