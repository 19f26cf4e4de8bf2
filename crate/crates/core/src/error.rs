use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("graph is disconnected: node {unreached} unreachable from node 0")]
    Disconnected { unreached: usize },
    #[error("node {node} has zero degree; normalized shift operators are undefined")]
    DegenerateDegree { node: usize },
    #[error("process is unstable: spectral radius {radius} >= 1")]
    Unstable { radius: f64 },
    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("matrix is singular or rank deficient ({context}); consider a ridge term")]
    Singular { context: &'static str },
    #[error("F-form evaluation needs (NM)^2 storage; NM = {nm} exceeds the cap of {cap}, use the B-form")]
    TooLarge { nm: usize, cap: usize },
    #[error("graph generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("{0}")]
    Undefined(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
