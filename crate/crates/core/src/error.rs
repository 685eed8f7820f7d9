use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a Bogoliubov transform (residual {residual:.3e} > tol {tol:.3e})")]
    NotBogoliubov { residual: f64, tol: f64 },

    #[error("invalid generator matrix: {0}")]
    InvalidGenerator(String),

    #[error("matrix is not symmetric (residual {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unphysical bath: |m| = {m_abs} exceeds sqrt(n(n+1)) = {bound}")]
    UnphysicalBath { m_abs: f64, bound: f64 },

    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("unstable drift (max real eigenvalue part {max_real:.3e}): dark mode present")]
    Unstable { max_real: f64 },

    #[error("target is not preparable: {0}")]
    NotPreparable(String),

    #[error("normal modes do not pair into opposite frequencies (residual {residual:.3e})")]
    ChiralPairing { residual: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
