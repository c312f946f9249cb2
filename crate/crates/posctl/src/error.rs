use thiserror::Error;

/// Errors raised by the numeric and control routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no bracket for {what} after {expansions} expansions")]
    Bracket { what: String, expansions: usize },
    #[error("root solver did not converge for {0}")]
    Solver(String),
    #[error("quadrature did not converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },
    #[error("infeasible point: {0}")]
    Infeasible(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("feedback returned non-positive control {value} at t = {t}")]
    Contract { t: f64, value: f64 },
    #[error("state diverged at t = {t}")]
    Divergence { t: f64 },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
