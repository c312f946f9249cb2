use std::fmt;

use serde::Serialize;

use super::contractor::{Contractor, ContractorKind};
use crate::error::{domain, Error, Result};
use crate::numerics::{log_singular_integral, solve_bracketed};
use crate::scalar::Scalar;

/// `Ω(s) = s − 1 − ln s`, with a series near 1.
pub fn volterra_lyapunov<T: Scalar>(s: T) -> T {
    let e = s - T::one();
    if e.abs() < T::lit(1e-3) {
        // Σ_{k≥2} (−1)^k e^k / k
        let mut sum = T::zero();
        let mut pow = e * e;
        for k in 2..=9 {
            let term = pow / T::lit(k as f64);
            sum += if k % 2 == 0 { term } else { -term };
            pow *= e;
        }
        sum
    } else {
        e - s.ln()
    }
}

/// How a penalty is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyForm {
    /// `s − 1 − ln s`
    ClosedVolterra,
    /// `(√s − 1)²`
    ClosedSqrt,
    Quadrature,
}

/// Construction options for [`Penalty::from_contractor`].
#[derive(Debug, Clone, Copy)]
pub struct PenaltyOptions<T> {
    pub anchors: (T, T),
    /// Values at the anchors; defaults to the local power-law normalization.
    pub scales: Option<(T, T)>,
    /// Use quadrature even when a closed form exists.
    pub force_quadrature: bool,
}

impl<T: Scalar> Default for PenaltyOptions<T> {
    fn default() -> Self {
        Self { anchors: (T::lit(0.5), T::lit(2.0)), scales: None, force_quadrature: false }
    }
}

/// Radius around 1 where the integrand is replaced by its pole model.
pub const MODEL_RADIUS: f64 = 1e-6;
/// Offset from 1 at which the two branches are matched.
pub const MATCH_OFFSET: f64 = 1e-4;
/// Absolute tolerance per accepted Simpson subinterval.
pub const QUAD_TOL: f64 = 1e-10;

/// Convex control penalty generated from a contractor, minimal (zero) at 1.
#[derive(Clone)]
pub struct Penalty<T> {
    contractor: Contractor<T>,
    form: PenaltyForm,
    anchors: (T, T),
    scales: (T, T),
    exponent: T,
}

impl<T: fmt::Debug> fmt::Debug for Penalty<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Penalty")
            .field("contractor", &self.contractor)
            .field("form", &self.form)
            .field("anchors", &self.anchors)
            .field("scales", &self.scales)
            .finish()
    }
}

impl<T: Scalar> Penalty<T> {
    /// Penalty with default anchors and normalization.
    pub fn new(contractor: &Contractor<T>) -> Result<Self> {
        Self::from_contractor(contractor, PenaltyOptions::default())
    }

    pub fn from_contractor(contractor: &Contractor<T>, opts: PenaltyOptions<T>) -> Result<Self> {
        let (lo, hi) = opts.anchors;
        if !(lo > T::zero() && lo < T::one() && hi > T::one() && hi.is_finite()) {
            return Err(domain("anchors must satisfy 0 < s0- < 1 < s0+"));
        }
        let theta1 = contractor.derivative_at_one();
        if !(theta1 > T::zero() && theta1 < T::one()) {
            return Err(domain(format!("contractor slope at 1 must lie in (0, 1), got {theta1}")));
        }
        let form = match (contractor.kind(), opts.force_quadrature) {
            (ContractorKind::Volterra, false) => PenaltyForm::ClosedVolterra,
            (ContractorKind::Sqrt, false) => PenaltyForm::ClosedSqrt,
            _ => PenaltyForm::Quadrature,
        };
        let mut p = Self {
            contractor: contractor.clone(),
            form,
            anchors: opts.anchors,
            scales: (T::one(), T::one()),
            exponent: contractor.local_exponent(),
        };
        p.scales = match (form, opts.scales) {
            (PenaltyForm::Quadrature, Some(sc)) => {
                if !(sc.0 > T::zero() && sc.1 > T::zero()) {
                    return Err(domain("branch scales must be positive"));
                }
                sc
            }
            (PenaltyForm::Quadrature, None) => {
                let h = T::lit(MATCH_OFFSET);
                let up = p.log_integral(T::one() + h)?;
                let down = p.log_integral(T::one() - h)?;
                ((up - down).exp(), T::one())
            }
            _ => (p.closed(lo), p.closed(hi)),
        };
        Ok(p)
    }

    pub fn contractor(&self) -> &Contractor<T> {
        &self.contractor
    }

    pub fn form(&self) -> PenaltyForm {
        self.form
    }

    pub fn anchors(&self) -> (T, T) {
        self.anchors
    }

    /// `(c⁻, c⁺)`: the penalty values at the two anchors.
    pub fn branch_scales(&self) -> (T, T) {
        self.scales
    }

    /// Local power `p` with `Ψ(s) ∝ |s − 1|^p` near 1.
    pub fn local_exponent(&self) -> T {
        self.exponent
    }

    fn closed(&self, s: T) -> T {
        match self.form {
            PenaltyForm::ClosedVolterra => volterra_lyapunov(s),
            PenaltyForm::ClosedSqrt => {
                let d = (s - T::one()) / (s.sqrt() + T::one());
                d * d
            }
            PenaltyForm::Quadrature => unreachable!(),
        }
    }

    /// `ln(Ψ(s)/c±)` from the anchor on the same side as `s`.
    fn log_integral(&self, s: T) -> Result<T> {
        let anchor = if s > T::one() { self.anchors.1 } else { self.anchors.0 };
        let c = &self.contractor;
        let h = |t: T| T::one() / c.raw_gap(t);
        log_singular_integral(&h, self.exponent, anchor, s, T::lit(MODEL_RADIUS), T::tol(QUAD_TOL))
    }

    fn check(s: T) -> Result<()> {
        if s > T::zero() && s.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("penalty argument must be positive and finite, got {s}")))
        }
    }

    pub fn eval(&self, s: T) -> Result<T> {
        Self::check(s)?;
        if s == T::one() {
            return Ok(T::zero());
        }
        match self.form {
            PenaltyForm::Quadrature => {
                let c = if s > T::one() { self.scales.1 } else { self.scales.0 };
                Ok(c * self.log_integral(s)?.exp())
            }
            _ => Ok(self.closed(s)),
        }
    }

    pub fn prime(&self, s: T) -> Result<T> {
        Self::check(s)?;
        if s == T::one() {
            return Ok(T::zero());
        }
        match self.form {
            PenaltyForm::ClosedVolterra => Ok((s - T::one()) / s),
            PenaltyForm::ClosedSqrt => {
                let r = s.sqrt();
                Ok((s - T::one()) / (r + T::one()) / r)
            }
            PenaltyForm::Quadrature => Ok(self.eval(s)? / self.contractor.raw_gap(s)),
        }
    }

    /// Central-difference second derivative.
    pub fn second_derivative(&self, s: T) -> Result<T> {
        let h = s * T::lit(1e-4);
        Ok((self.prime(s + h)? - self.prime(s - h)?) / (h + h))
    }

    /// Range of `Ψ′` when it is known in closed form.
    pub fn prime_range(&self) -> Option<(T, T)> {
        match self.form {
            PenaltyForm::Quadrature => None,
            _ => Some((T::neg_infinity(), T::one())),
        }
    }

    /// `(Ψ′)⁻¹(y)`.
    pub fn prime_inverse(&self, y: T) -> Result<T> {
        if y.is_nan() {
            return Err(domain("NaN passed to penalty inverse derivative"));
        }
        if y == T::zero() {
            return Ok(T::one());
        }
        match self.form {
            PenaltyForm::ClosedVolterra | PenaltyForm::ClosedSqrt => {
                if !(y < T::one()) || y == T::neg_infinity() {
                    return Err(domain(format!("{y} outside the derivative range (-inf, 1)")));
                }
                let base = T::one() / (T::one() - y);
                Ok(if self.form == PenaltyForm::ClosedSqrt { base * base } else { base })
            }
            PenaltyForm::Quadrature => self.prime_inverse_numeric(y),
        }
    }

    fn prime_inverse_numeric(&self, y: T) -> Result<T> {
        let two = T::lit(2.0);
        let f = |s: T| self.prime(s).map(|v| v - y).unwrap_or(T::nan());
        let outside = || Error::Domain(format!("{y} outside the sampled derivative range of {}", self.contractor.name()));
        let (lo, hi) = if y > T::zero() {
            let (mut lo, mut hi) = (T::one(), two);
            let mut n = 0;
            while f(hi) < T::zero() {
                lo = hi;
                hi *= two;
                n += 1;
                if n > 200 || !hi.is_finite() {
                    return Err(outside());
                }
            }
            (lo, hi)
        } else {
            let (mut lo, mut hi) = (T::lit(0.5), T::one());
            let mut n = 0;
            while f(lo) > T::zero() {
                hi = lo;
                lo /= two;
                n += 1;
                if n > 200 || lo <= T::zero() {
                    return Err(outside());
                }
            }
            (lo, hi)
        };
        if f(lo).is_nan() || f(hi).is_nan() {
            return Err(outside());
        }
        solve_bracketed(&f, lo, hi, T::tol(1e-12), "penalty inverse derivative")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_grid;

    fn grid() -> Vec<f64> {
        log_grid(1e-3f64, 1e3, 121).into_iter().filter(|s| (s - 1.0).abs() >= 1e-6).collect()
    }

    #[test]
    fn omega_series_matches_direct_form() {
        for e in [-9.9e-4, -1e-4, 2e-4, 9.9e-4] {
            let s: f64 = 1.0 + e;
            // direct form loses digits only at the e^3 level here
            assert!((volterra_lyapunov(s) - (e - s.ln())).abs() < 1e-15);
        }
        assert_eq!(volterra_lyapunov(1.0f64), 0.0);
    }

    #[test]
    fn closed_form_values() {
        let v = Penalty::new(&Contractor::<f64>::volterra()).unwrap();
        assert!((v.eval(2.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert_eq!(v.eval(1.0).unwrap(), 0.0);
        let q = Penalty::new(&Contractor::<f64>::sqrt()).unwrap();
        assert!((q.eval(4.0).unwrap() - 1.0).abs() < 1e-15);
        let (lo, hi) = v.branch_scales();
        assert!((lo - (-0.5 + 2f64.ln())).abs() < 1e-15 && (hi - (1.0 - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn closed_inverse_derivatives() {
        let v = Penalty::new(&Contractor::<f64>::volterra()).unwrap();
        let q = Penalty::new(&Contractor::<f64>::sqrt()).unwrap();
        assert_eq!(v.prime_inverse(0.0).unwrap(), 1.0);
        assert!((q.prime_inverse(2.0 / 3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((v.prime_inverse(-1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(v.prime_inverse(1.0), Err(Error::Domain(m)) if m.contains("(-inf, 1)")));
    }

    #[test]
    fn quadrature_reproduces_closed_forms() {
        for c in [Contractor::<f64>::volterra(), Contractor::sqrt()] {
            let closed = Penalty::new(&c).unwrap();
            let opts = PenaltyOptions { scales: Some(closed.branch_scales()), force_quadrature: true, ..Default::default() };
            let quad = Penalty::from_contractor(&c, opts).unwrap();
            for s in [1e-3, 0.2, 0.9, 0.999_99, 1.000_01, 1.5, 10.0, 1e3] {
                let a = closed.eval(s).unwrap();
                let b = quad.eval(s).unwrap();
                assert!(((a - b) / a).abs() < 1e-7, "{:?} {s}: {a} vs {b}", c.kind());
            }
        }
    }

    #[test]
    fn default_normalization_is_nearly_symmetric_for_volterra() {
        let c = Contractor::<f64>::volterra();
        let quad = Penalty::from_contractor(&c, PenaltyOptions { force_quadrature: true, ..Default::default() }).unwrap();
        // Ω(1 ± h) differ only at relative order h
        let ratio = quad.eval(0.99).unwrap() / quad.eval(1.01).unwrap();
        let expect = volterra_lyapunov(0.99) / volterra_lyapunov(1.01);
        assert!((ratio / expect - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ode_identity_and_shape_for_builtins() {
        for c in [Contractor::<f64>::volterra(), Contractor::sqrt(), Contractor::rational()] {
            let p = Penalty::new(&c).unwrap();
            for s in grid() {
                let v = p.eval(s).unwrap();
                let d = p.prime(s).unwrap();
                assert!(v > 0.0);
                assert!(((d * (s - c.eval(s).unwrap())) / v - 1.0).abs() < 1e-6, "{:?} {s}", c.kind());
                assert!(if s < 1.0 { d < 0.0 } else { d > 0.0 });
                assert!(p.second_derivative(s).unwrap() > 0.0, "{:?} {s}", c.kind());
            }
        }
    }

    #[test]
    fn numeric_inverse_derivative_round_trips() {
        let p = Penalty::new(&Contractor::<f64>::rational()).unwrap();
        for s in [0.05, 0.5, 0.99, 1.01, 3.0, 40.0] {
            let y = p.prime(s).unwrap();
            let back = p.prime_inverse(y).unwrap();
            assert!(((back - s) / s).abs() < 1e-9, "{s} -> {back}");
        }
    }

    #[test]
    fn bad_anchors_rejected() {
        let c = Contractor::<f64>::volterra();
        let opts = PenaltyOptions { anchors: (1.5, 2.0), ..Default::default() };
        assert!(Penalty::from_contractor(&c, opts).is_err());
    }
}
