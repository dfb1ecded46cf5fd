use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid damping spec: {0}")]
    Damping(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("invalid geometry input: {0}")]
    Geometry(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("tau = {0} is within {1:e} of an eigenfrequency")]
    AtEigenvalue(num_complex::Complex64, f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numerical(e.to_string())
    }
}
