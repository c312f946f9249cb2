use super::contractor::{Contractor, ContractorKind};
use super::expander::Expander;
use super::penalty::{Penalty, PenaltyForm};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// `Γ = Θ ∘ (Ψ′)⁻¹` and its inverse `Γ⁻¹ = Ψ′ ∘ Σ`.
#[derive(Debug, Clone)]
pub struct GammaMaps<T> {
    expander: Expander<T>,
    penalty: Penalty<T>,
}

impl<T: Scalar> GammaMaps<T> {
    /// The penalty must have been generated from `contractor`.
    pub fn new(contractor: &Contractor<T>, penalty: &Penalty<T>) -> Result<Self> {
        let pc = penalty.contractor();
        if pc.kind() != contractor.kind() || pc.name() != contractor.name() {
            return Err(domain(format!(
                "penalty built from `{}` cannot pair with contractor `{}`",
                pc.name(),
                contractor.name()
            )));
        }
        Ok(Self { expander: Expander::new(contractor.clone()), penalty: penalty.clone() })
    }

    pub fn contractor(&self) -> &Contractor<T> {
        self.expander.contractor()
    }

    pub fn penalty(&self) -> &Penalty<T> {
        &self.penalty
    }

    pub fn expander(&self) -> &Expander<T> {
        &self.expander
    }

    fn closed_sqrt(&self) -> bool {
        self.contractor().kind() == ContractorKind::Sqrt && self.penalty.form() == PenaltyForm::ClosedSqrt
    }

    fn closed_volterra(&self) -> bool {
        self.contractor().kind() == ContractorKind::Volterra && self.penalty.form() == PenaltyForm::ClosedVolterra
    }

    /// `Γ(y)` for `y ≥ 0`; `Γ(0) = 1`.
    pub fn gamma(&self, y: T) -> Result<T> {
        if !(y >= T::zero()) {
            return Err(domain(format!("gamma needs a nonnegative argument, got {y}")));
        }
        if y == T::zero() {
            return Ok(T::one());
        }
        if self.closed_sqrt() {
            if !(y < T::one()) {
                return Err(domain(format!("gamma argument {y} outside [0, 1)")));
            }
            return Ok(T::one() / (T::one() - y));
        }
        let s = self.penalty.prime_inverse(y)?;
        self.contractor().eval(s)
    }

    /// `Γ⁻¹(w)` for `w ≥ 1`; `Γ⁻¹(1) = 0`.
    pub fn gamma_inverse(&self, w: T) -> Result<T> {
        if !(w >= T::one()) || !w.is_finite() {
            return Err(domain(format!("gamma inverse needs an argument in [1, inf), got {w}")));
        }
        if w == T::one() {
            return Ok(T::zero());
        }
        if self.closed_sqrt() {
            return Ok(T::one() - T::one() / w);
        }
        let s = self.expander.eval(w)?;
        if self.closed_volterra() {
            return Ok(T::one() - T::one() / s);
        }
        self.penalty.prime(s)
    }
}
