//! Contractors, expanders, penalties and the composite maps built from them.

mod analysis;
mod contractor;
mod expander;
mod gamma;
mod penalty;

pub use analysis::{asymptotic_exponent, reciprocal_symmetry_residual, Side};
pub use contractor::{ConditionCheck, Contractor, ContractorKind, ContractorReport, ScalarMap};
pub use expander::Expander;
pub use gamma::GammaMaps;
pub use penalty::{volterra_lyapunov, Penalty, PenaltyForm, PenaltyOptions, MATCH_OFFSET, MODEL_RADIUS, QUAD_TOL};
