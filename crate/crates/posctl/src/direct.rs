//! Direct inverse-optimal design from a strong CLF: pick a contractor, then a
//! weight `r` inside the admissible interval, and read off the feedback.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shaping::{Contractor, GammaMaps, Penalty};
use crate::sysmodel::in_strong_set;

/// Rule choosing `r(a, b)` inside the admissible interval.
#[derive(Clone)]
pub enum RRule<T> {
    /// Midpoint of the interval on the active branch.
    Midpoint,
    /// Geometric mean of the interval ends, `−b/√ζ`.
    SqrtMean,
    Custom(Arc<dyn Fn(T, T) -> T + Send + Sync>),
}

impl<T> fmt::Debug for RRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Midpoint => "Midpoint",
            Self::SqrtMean => "SqrtMean",
            Self::Custom(_) => "Custom",
        })
    }
}

/// Admissible weights at one `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Admissible<T> {
    /// Open interval `(lo, hi)`; `hi` may be `+∞`.
    Interval { lo: T, hi: T },
    /// Only `r = +∞`.
    Infinite,
}

impl<T: Scalar> Admissible<T> {
    pub fn contains(&self, r: T) -> bool {
        match *self {
            Self::Interval { lo, hi } => r > lo && (r < hi || (hi.is_infinite() && r.is_infinite())),
            Self::Infinite => r.is_infinite() && r > T::zero(),
        }
    }
}

/// Feedback pair and costs at one `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectFeedback<T> {
    pub omega_star: T,
    pub omega_0: T,
    pub r: T,
    pub q: T,
}

#[derive(Debug, Clone)]
pub struct DirectDesign<T> {
    gamma: GammaMaps<T>,
    rule: RRule<T>,
}

impl<T: Scalar> DirectDesign<T> {
    /// Needs a penalty whose slope range is `(−∞, 1)`, so that `−b/r` can be
    /// inverted for every `r > −b`.
    pub fn new(contractor: Contractor<T>, rule: RRule<T>) -> Result<Self> {
        let penalty = Penalty::new(&contractor)?;
        if penalty.prime_range() != Some((T::neg_infinity(), T::one())) {
            return Err(Error::Constraint(format!(
                "direct design needs a penalty with slope range (-inf, 1); {} has none known",
                contractor.name()
            )));
        }
        Ok(Self { gamma: GammaMaps::new(&contractor, &penalty)?, rule })
    }

    pub fn contractor(&self) -> &Contractor<T> {
        self.gamma.contractor()
    }

    pub fn penalty(&self) -> &Penalty<T> {
        self.gamma.penalty()
    }

    pub fn gamma(&self) -> &GammaMaps<T> {
        &self.gamma
    }

    pub fn rule(&self) -> &RRule<T> {
        &self.rule
    }

    fn check(a: T, b: T) -> Result<()> {
        if in_strong_set(a, b) {
            Ok(())
        } else {
            Err(Error::Infeasible(format!("(a, b) = ({a}, {b}) outside the admissible set")))
        }
    }

    /// `ζ = Γ⁻¹(1 − a/b)` on the active branch `b < 0 < a`.
    pub fn zeta(&self, a: T, b: T) -> Result<T> {
        self.gamma.gamma_inverse(T::one() - a / b)
    }

    pub fn admissible_r_interval(&self, a: T, b: T) -> Result<Admissible<T>> {
        Self::check(a, b)?;
        if b >= T::zero() {
            return Ok(Admissible::Infinite);
        }
        let hi = if a > T::zero() { -b / self.zeta(a, b)? } else { T::infinity() };
        Ok(Admissible::Interval { lo: -b, hi })
    }

    /// `r(a, b)` from the configured rule.
    pub fn r(&self, a: T, b: T) -> Result<T> {
        Self::check(a, b)?;
        match &self.rule {
            RRule::Midpoint | RRule::SqrtMean => {
                if !(b < T::zero() && a > T::zero()) {
                    return Ok(T::infinity());
                }
                let z = self.zeta(a, b)?;
                Ok(match self.rule {
                    RRule::Midpoint => -b * (T::one() + z) / (z + z),
                    _ => -b / z.sqrt(),
                })
            }
            RRule::Custom(f) => {
                let r = f(a, b);
                let adm = self.admissible_r_interval(a, b)?;
                if adm.contains(r) {
                    Ok(r)
                } else {
                    Err(Error::Constraint(format!("weight {r} outside the admissible set {adm:?}")))
                }
            }
        }
    }

    /// The midpoint weight, whatever the configured rule.
    pub fn midpoint_r(&self, a: T, b: T) -> Result<T> {
        Self::check(a, b)?;
        if !(b < T::zero() && a > T::zero()) {
            return Ok(T::infinity());
        }
        let z = self.zeta(a, b)?;
        Ok(-b * (T::one() + z) / (z + z))
    }

    /// Feedback for an explicit admissible weight.
    pub fn feedback_with_r(&self, a: T, b: T, r: T) -> Result<DirectFeedback<T>> {
        Self::check(a, b)?;
        if r.is_infinite() {
            return Ok(DirectFeedback { omega_star: T::one(), omega_0: T::one(), r, q: -a });
        }
        let y = -b / r;
        let omega_star = self.penalty().prime_inverse(y)?;
        let omega_0 = self.contractor().eval(omega_star)?;
        // q = −a + b − bΓ(−b/r) with Γ(−b/r) = Θ(ω*)
        let q = -a + b - b * omega_0;
        Ok(DirectFeedback { omega_star, omega_0, r, q })
    }

    pub fn feedback(&self, a: T, b: T) -> Result<DirectFeedback<T>> {
        let r = self.r(a, b)?;
        self.feedback_with_r(a, b, r)
    }

    pub fn direct_feedback(&self, a: T, b: T) -> Result<(T, T)> {
        self.feedback(a, b).map(|f| (f.omega_star, f.omega_0))
    }

    pub fn q(&self, a: T, b: T) -> Result<T> {
        self.feedback(a, b).map(|f| f.q)
    }

    /// Midpoint-weight feedback from `(L_fV, L_gV)` and the equilibrium input.
    pub fn continuous_feedback(&self, lf: T, lg: T, equilibrium_input: T) -> Result<(T, T)> {
        let a = lf + lg * equilibrium_input;
        let b = lg;
        Self::check(a, b)?;
        if !(b < T::zero() && a > T::zero()) {
            return Ok((T::one(), T::one()));
        }
        let z = self.zeta(a, b)?;
        let omega_star = self.penalty().prime_inverse((z + z) / (T::one() + z))?;
        Ok((omega_star, self.contractor().eval(omega_star)?))
    }
}

/// Closed-form direct design for the Volterra contractor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolterraDirect<T> {
    pub omega_star: T,
    pub omega_0: T,
    pub q: T,
}

/// `ω* = r/(r+b)`, `ω₀ = ln(1 + b/r)/(b/r)`, `q = −a + b + r ln(r/(r+b))`.
pub fn volterra_direct<T: Scalar>(a: T, b: T, r: T) -> Result<VolterraDirect<T>> {
    if !in_strong_set(a, b) {
        return Err(Error::Infeasible(format!("(a, b) = ({a}, {b}) outside the admissible set")));
    }
    if r.is_infinite() || b == T::zero() {
        return Ok(VolterraDirect { omega_star: T::one(), omega_0: T::one(), q: -a });
    }
    if b > T::zero() {
        return Err(Error::Constraint("r must be +inf when b >= 0".into()));
    }
    if !(r > -b) {
        return Err(Error::Constraint(format!("r > -b violated: r = {r}, b = {b}")));
    }
    let z = b / r;
    let log_term = z.ln_1p();
    let q = -a + b - r * log_term;
    if !(q > T::zero()) && !(a == T::zero() && b == T::zero()) {
        return Err(Error::Constraint(format!("r ln(r/(r+b)) > a - b violated: r = {r}, a = {a}, b = {b}")));
    }
    Ok(VolterraDirect { omega_star: r / (r + b), omega_0: log_term / z, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sqrt_mid() -> DirectDesign<f64> {
        DirectDesign::new(Contractor::sqrt(), RRule::Midpoint).unwrap()
    }

    #[test]
    fn interval_examples() {
        let d = sqrt_mid();
        assert_eq!(d.admissible_r_interval(-1.0, -1.0).unwrap(), Admissible::Interval { lo: 1.0, hi: f64::INFINITY });
        match d.admissible_r_interval(1.0, -1.0).unwrap() {
            Admissible::Interval { lo, hi } => assert!(lo == 1.0 && (hi - 2.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(d.admissible_r_interval(-3.0, 2.0).unwrap(), Admissible::Infinite);
        assert!(matches!(d.admissible_r_interval(1.0, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn midpoint_examples() {
        let d = sqrt_mid();
        assert!((d.midpoint_r(1.0, -1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(d.midpoint_r(-1.0, -1.0).unwrap().is_infinite());
        assert!(d.midpoint_r(-1.0, 0.5).unwrap().is_infinite());
    }

    #[test]
    fn feedback_examples() {
        let d = sqrt_mid();
        let f = d.feedback(1.0, -1.0).unwrap();
        assert!((f.omega_star - 9.0).abs() < 1e-12 && (f.omega_0 - 3.0).abs() < 1e-12);
        assert!((f.q - 1.0).abs() < 1e-12);
        assert_eq!(d.direct_feedback(-2.0, 3.0).unwrap(), (1.0, 1.0));
        assert_eq!(d.q(-2.0, 3.0).unwrap(), 2.0);
        assert_eq!(d.q(0.0, 0.0).unwrap(), 0.0);
        let v = DirectDesign::new(Contractor::<f64>::volterra(), RRule::Midpoint).unwrap();
        let f = v.feedback_with_r(0.0, -1.0, 2.0).unwrap();
        assert!((f.omega_star - 2.0).abs() < 1e-12 && (f.omega_0 - 2f64.ln() / 0.5).abs() < 1e-12);
    }

    #[test]
    fn volterra_closed_forms() {
        let v = volterra_direct(0.0f64, -1.0, 2.0).unwrap();
        assert!((v.omega_star - 2.0).abs() < 1e-15);
        assert!((v.omega_0 - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((v.q - (-1.0 + 2.0 * 2f64.ln())).abs() < 1e-15);
        let tiny = volterra_direct(-1.0f64, -1e-12, 1.0).unwrap();
        assert!((tiny.omega_star - 1.0).abs() < 1e-11);
        assert!(matches!(volterra_direct(0.0f64, -1.0, 0.5), Err(Error::Constraint(m)) if m.contains("r > -b")));
        // r just above −b can still fail the logarithmic inequality
        assert!(matches!(volterra_direct(5.0f64, -1.0, 1.5), Err(Error::Constraint(m)) if m.contains("ln")));
    }

    #[test]
    fn continuous_feedback_on_scalar_example() {
        let d = sqrt_mid();
        // ẋ = x² − u, V = x²/2: lf = x³, lg = −x, ωₑ = 0
        let (ws, _) = d.continuous_feedback(1.0, -1.0, 0.0).unwrap();
        assert!((ws - 1.0 - 8.0).abs() < 1e-12);
        assert_eq!(d.continuous_feedback(-1.0, 1.0, 0.0).unwrap(), (1.0, 1.0));
        let (ws, w0) = d.continuous_feedback(1e-9, -1.0, 0.0).unwrap();
        assert!((ws - 1.0).abs() < 1e-8 && (w0 - 1.0).abs() < 1e-8);
        assert!(matches!(d.continuous_feedback(1.0, 1.0, 0.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn unbounded_slope_penalty_rejected() {
        // the rational penalty grows faster than linearly, so its slope is unbounded
        assert!(matches!(DirectDesign::new(Contractor::<f64>::rational(), RRule::Midpoint), Err(Error::Constraint(_))));
    }

    #[test]
    fn custom_rule_is_checked() {
        let d = DirectDesign::new(Contractor::<f64>::sqrt(), RRule::Custom(Arc::new(|_, b| -2.0 * b))).unwrap();
        assert!(d.r(-1.0, -1.0).is_ok());
        // (1,−1) has interval (1, 2); r = 2 sits on the open end
        assert!(matches!(d.r(1.0, -1.0), Err(Error::Constraint(_))));
    }

    fn admissible_point() -> impl Strategy<Value = (f64, f64)> {
        (-5.0f64..5.0, -5.0f64..5.0).prop_filter("in S", |(a, b)| *b < 0.0 || *a < 0.0)
    }

    proptest! {
        #[test]
        fn hjb_and_penalty_identities((a, b) in admissible_point(), sqrt_rule in any::<bool>()) {
            for c in [Contractor::<f64>::sqrt(), Contractor::volterra()] {
                // Volterra ζ = 1 − 1/Σ(1 − a/b) rounds to 1 once Σ ~ e^20
                if c.kind() == crate::shaping::ContractorKind::Volterra && b < 0.0 && a / b < -20.0 {
                    continue;
                }
                let rule = if sqrt_rule { RRule::SqrtMean } else { RRule::Midpoint };
                let d = DirectDesign::new(c.clone(), rule).unwrap();
                let f = d.feedback(a, b).unwrap();
                prop_assert!(f.omega_star > 0.0 && f.omega_0 > 0.0);
                prop_assert!(d.admissible_r_interval(a, b).unwrap().contains(f.r));
                let cost = if f.r.is_infinite() { 0.0 } else { f.r * d.penalty().eval(f.omega_star).unwrap() };
                let hjb = a + b * (f.omega_star - 1.0) + cost + f.q;
                prop_assert!(hjb.abs() <= 1e-10 * (1.0 + a.abs() + b.abs() + cost));
                if f.r.is_finite() {
                    let alt = -b * (f.omega_star - c.eval(f.omega_star).unwrap());
                    prop_assert!((cost - alt).abs() <= 1e-10 * (1.0 + cost));
                }
                prop_assert!(f.q > 0.0 || a == 0.0);
                prop_assert!(a + b * (f.omega_0 - 1.0) < 0.0 || a == 0.0);
            }
        }
    }
}
