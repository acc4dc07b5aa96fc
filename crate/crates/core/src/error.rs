use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("z = {0} lies on the essential spectrum or the branch cut")]
    BranchCut(String),
    #[error("m has a pole at z = {0}")]
    Pole(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid bracket [{lo}, {hi}]: no sign change")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("condition integral diverges (partial value {partial:.6e} on [0, {extent}])")]
    Divergent { partial: f64, extent: f64 },
    #[error("no consistent tail fit: {0}")]
    TailFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
