//! Inverse-optimal redesign `ω* = Σ(ω₀)` of a stabilizing nominal feedback.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::log_singular_integral;
use crate::predprey;
use crate::scalar::Scalar;
use crate::shaping::{Contractor, Expander, Penalty, MODEL_RADIUS, QUAD_TOL};
use crate::sysmodel::{lie_pair, ControlLyapunov, GridReport, LiePair, PositiveSystem};

/// State feedback returning the abstract input.
pub type Feedback<T> = Arc<dyn Fn(&[T]) -> Result<T> + Send + Sync>;

/// How points where the nominal input already rests at 1 are judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignmentPolicy {
    /// `sign(Σ(ω₀) − 1) = −sign(L_gV)` everywhere.
    #[default]
    Strict,
    /// Additionally accept `ω₀ = 1` where `a < 0` (the drift alone decreases V).
    AllowPinned,
}

pub struct RedesignProblem<T> {
    pub system: PositiveSystem<T>,
    pub clf: ControlLyapunov<T>,
    nominal: Feedback<T>,
    expander: Expander<T>,
    penalty: Penalty<T>,
}

impl<T: fmt::Debug> fmt::Debug for RedesignProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RedesignProblem")
            .field("system", &self.system)
            .field("expander", &self.expander)
            .field("penalty", &self.penalty)
            .finish()
    }
}

/// `r·Ψ(ω)` by direct product and by the exponential-integral route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyProduct<T> {
    pub direct: T,
    /// `None` when `ω` and `ω*` lie on different sides of 1.
    pub via_integral: Option<T>,
}

impl<T: Scalar> RedesignProblem<T> {
    /// Builds the problem; the penalty is generated from `contractor` with default options.
    pub fn new(
        system: PositiveSystem<T>,
        clf: ControlLyapunov<T>,
        nominal: Feedback<T>,
        contractor: Contractor<T>,
    ) -> Result<Self> {
        let penalty = Penalty::new(&contractor)?;
        Self::with_penalty(system, clf, nominal, penalty)
    }

    pub fn with_penalty(
        system: PositiveSystem<T>,
        clf: ControlLyapunov<T>,
        nominal: Feedback<T>,
        penalty: Penalty<T>,
    ) -> Result<Self> {
        let at_eq = nominal(&system.equilibrium_state)?;
        if (at_eq - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::Constraint(format!("nominal feedback must equal 1 at equilibrium, got {at_eq}")));
        }
        let expander = Expander::new(penalty.contractor().clone());
        Ok(Self { system, clf, nominal, expander, penalty })
    }

    /// Prey/predator with input `U/Y`, nominal `ω₀ = Y/X`.
    pub fn predator_prey(contractor: Contractor<T>) -> Result<Self> {
        Self::new(
            predprey::scaled_system(),
            predprey::clf_model(),
            Arc::new(|v: &[T]| Ok(v[1] / v[0])),
            contractor,
        )
    }

    pub fn expander(&self) -> &Expander<T> {
        &self.expander
    }

    pub fn penalty(&self) -> &Penalty<T> {
        &self.penalty
    }

    pub fn lie(&self, x: &[T]) -> Result<LiePair<T>> {
        lie_pair(&self.system, &self.clf, x)
    }

    pub fn nominal(&self, x: &[T]) -> Result<T> {
        (self.nominal)(x)
    }

    /// `q = −(a + b(ω₀ − 1))`, the decrease certified by the nominal law.
    pub fn state_cost(&self, x: &[T]) -> Result<T> {
        let lp = self.lie(x)?;
        Ok(-lp.vdot(self.nominal(x)?))
    }

    pub fn check_sign_alignment(&self, grid: &[Vec<T>], policy: AlignmentPolicy) -> GridReport {
        let mut rep = GridReport {
            condition: "sign(Sigma(w0) - 1) = -sign(L_gV)".into(),
            checked: 0,
            applicable: 0,
            violations: 0,
            first_counterexample: None,
        };
        for x in grid {
            if self.system.is_equilibrium(x) {
                continue;
            }
            rep.checked += 1;
            rep.applicable += 1;
            let ok = (|| -> Result<bool> {
                let lp = self.lie(x)?;
                let w0 = self.nominal(x)?;
                let ws = self.expander.eval(w0)?;
                let lhs = sign(ws - T::one());
                let aligned = lhs == -sign(lp.b);
                let pinned = policy == AlignmentPolicy::AllowPinned && w0 == T::one() && lp.a < T::zero();
                Ok(aligned || pinned)
            })()
            .unwrap_or(false);
            if !ok {
                rep.violations += 1;
                if rep.first_counterexample.is_none() {
                    rep.first_counterexample = Some(x.iter().map(|v| v.as_f64()).collect());
                }
            }
        }
        rep
    }

    /// `ω* = Σ(ω₀(ξ))`.
    pub fn redesigned_feedback(&self, x: &[T]) -> Result<T> {
        self.expander.eval(self.nominal(x)?)
    }

    /// `r = −L_gV/Ψ′(ω*)`; `+∞` where `ω* = 1` (the penalty then pins the input).
    pub fn weight_r(&self, x: &[T]) -> Result<T> {
        let lp = self.lie(x)?;
        let ws = self.redesigned_feedback(x)?;
        if ws == T::one() {
            return Ok(T::infinity());
        }
        Ok(-lp.b / self.penalty.prime(ws)?)
    }

    /// `V̇ + q + rΨ(ω)`: nonnegative, zero only at `ω*`.
    pub fn hamiltonian(&self, x: &[T], omega: T) -> Result<T> {
        let lp = self.lie(x)?;
        let cost = self.penalty_product(x, omega)?.direct;
        Ok(lp.vdot(omega) + self.state_cost(x)? + cost)
    }

    pub fn penalty_product(&self, x: &[T], omega: T) -> Result<PenaltyProduct<T>> {
        if !(omega > T::zero()) {
            return Err(domain(format!("input must be positive, got {omega}")));
        }
        let r = self.weight_r(x)?;
        let psi = self.penalty.eval(omega)?;
        let direct = if r.is_infinite() {
            if psi == T::zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            r * psi
        };
        if omega == T::one() {
            return Ok(PenaltyProduct { direct, via_integral: Some(T::zero()) });
        }
        let w0 = self.nominal(x)?;
        let ws = self.expander.eval(w0)?;
        let same_side = (ws - T::one()) * (omega - T::one()) > T::zero();
        if !same_side {
            return Ok(PenaltyProduct { direct, via_integral: None });
        }
        let lp = self.lie(x)?;
        let c = self.penalty.contractor();
        let e = &self.expander;
        let target = c.eval(omega)?;
        // Σ′(σ)/(Σ(σ) − σ) with τ = Σ(σ): 1/(Θ′(τ)·(τ − Θ(τ)))
        let h = |sigma: T| match e.eval(sigma) {
            Ok(tau) => match c.derivative(tau) {
                Ok(d) => T::one() / (d * c.raw_gap(tau)),
                Err(_) => T::nan(),
            },
            Err(_) => T::nan(),
        };
        let integral =
            log_singular_integral(&h, c.local_exponent(), w0, target, T::lit(MODEL_RADIUS), T::tol(QUAD_TOL))?;
        Ok(PenaltyProduct { direct, via_integral: Some(lp.b * (w0 - ws) * integral.exp()) })
    }
}

fn sign<T: Scalar>(v: T) -> i8 {
    if v > T::zero() {
        1
    } else if v < T::zero() {
        -1
    } else {
        0
    }
}
