use thiserror::Error;

use crate::complex4::{Chart, MultiIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("address {chart:?} {k:?} lies outside the domain")]
    OutOfDomain { chart: Chart, k: MultiIndex },

    #[error("degree {0} is not a valid form degree here")]
    InvalidDegree(usize),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("operands live on different copies of the double complex")]
    CopyMismatch,

    #[error("operands live on different domains")]
    DomainMismatch,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("coefficient is not su(2)-valued (max deviation {max_deviation:.3e})")]
    NotSu2Algebra { max_deviation: f64 },

    #[error("coefficient is not SU(2)-valued (max deviation {max_deviation:.3e})")]
    NotSu2Group { max_deviation: f64 },

    #[error("singular gauge coefficient")]
    SingularGauge,

    #[error("malformed form file: {0}")]
    Malformed(String),

    #[error("unsupported form file version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("objective became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
