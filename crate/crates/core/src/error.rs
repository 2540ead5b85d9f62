//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("EmptyRegion: {0}")]
    EmptyRegion(&'static str),

    #[error("GridMismatch: {0}")]
    GridMismatch(String),

    #[error("DegenerateHeight: {0}")]
    DegenerateHeight(String),

    #[error("OutsideDomain: point ({0}, {1}) is not in the domain")]
    OutsideDomain(f64, f64),

    #[error("CrossSectionTooThin: {0} interior nodes (need at least 3)")]
    CrossSectionTooThin(usize),

    #[error("EigSolveFailed: {0}")]
    EigSolveFailed(String),

    #[error("LinearSolveFailed: {0}")]
    LinearSolveFailed(String),

    #[error("OracleTooLarge: {0} unknowns exceeds the dense-oracle cap of {1}")]
    OracleTooLarge(usize, usize),

    #[error("LevelEmpty: no node reaches level {0}")]
    LevelEmpty(f64),

    #[error("EmptyDomain: {0}")]
    EmptyDomain(&'static str),

    #[error("AtDomainEdge: {0}")]
    AtDomainEdge(String),

    #[error("ResolutionTooCoarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("SweepTooSmall: need at least 3 parameters, got {0}")]
    SweepTooSmall(usize),

    #[error("InvalidDomain: {0}")]
    InvalidDomain(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-readable kind for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyRegion(_) => "EmptyRegion",
            Error::GridMismatch(_) => "GridMismatch",
            Error::DegenerateHeight(_) => "DegenerateHeight",
            Error::OutsideDomain(_, _) => "OutsideDomain",
            Error::CrossSectionTooThin(_) => "CrossSectionTooThin",
            Error::EigSolveFailed(_) => "EigSolveFailed",
            Error::LinearSolveFailed(_) => "LinearSolveFailed",
            Error::OracleTooLarge(_, _) => "OracleTooLarge",
            Error::LevelEmpty(_) => "LevelEmpty",
            Error::EmptyDomain(_) => "EmptyDomain",
            Error::AtDomainEdge(_) => "AtDomainEdge",
            Error::ResolutionTooCoarse(_) => "ResolutionTooCoarse",
            Error::SweepTooSmall(_) => "SweepTooSmall",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
