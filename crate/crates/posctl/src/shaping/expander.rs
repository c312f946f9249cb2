use super::contractor::{Contractor, ContractorKind};
use crate::error::{domain, Result};
use crate::numerics::{bracket_increasing, solve_bracketed};
use crate::scalar::Scalar;

/// The inverse `Σ = Θ⁻¹` of a contractor; it pushes arguments away from 1.
#[derive(Debug, Clone)]
pub struct Expander<T> {
    contractor: Contractor<T>,
}

impl<T: Scalar> Expander<T> {
    pub fn new(contractor: Contractor<T>) -> Self {
        Self { contractor }
    }

    pub fn contractor(&self) -> &Contractor<T> {
        &self.contractor
    }

    pub fn eval(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s.is_finite()) {
            return Err(domain(format!("expander argument must be positive and finite, got {s}")));
        }
        if s == T::one() {
            return Ok(T::one());
        }
        if self.contractor.kind() == ContractorKind::Sqrt {
            return Ok(s * s);
        }
        let c = &self.contractor;
        let f = |x: T| c.raw(x) - s;
        let (lo, hi) = bracket_increasing(&f, s, "expander")?;
        solve_bracketed(&f, lo, hi, T::tol(1e-12), "expander")
    }

    /// `Σ′(s) = 1/Θ′(Σ(s))`.
    pub fn derivative(&self, s: T) -> Result<T> {
        let x = self.eval(s)?;
        Ok(T::one() / self.contractor.derivative(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_grid;

    #[test]
    fn sqrt_expander_squares() {
        assert_eq!(Expander::new(Contractor::<f64>::sqrt()).eval(3.0).unwrap(), 9.0);
    }

    #[test]
    fn volterra_expander_at_fig_ratio() {
        let e = Expander::new(Contractor::<f64>::volterra());
        let v = e.eval(0.35).unwrap();
        // independent check: Θ(v) must reproduce the argument
        assert!((v * v.ln() / (v - 1.0) - 0.35).abs() < 1e-13);
        assert!((v - 0.160).abs() < 0.005);
        assert_eq!(e.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn round_trip_and_expansion() {
        for c in [Contractor::<f64>::volterra(), Contractor::sqrt(), Contractor::rational()] {
            let e = Expander::new(c.clone());
            for s in log_grid(1e-3f64, 1e3, 97) {
                if (s - 1.0).abs() < 1e-6 {
                    continue;
                }
                let back = e.eval(c.eval(s).unwrap()).unwrap_or_else(|err| panic!("{:?} {s}: {err}", c.kind()));
                assert!(((back - s) / s).abs() < 1e-10, "{:?} {s}", c.kind());
                // the Volterra expander grows like e^s, so stay representable
                if s < 100.0 {
                    let x = e.eval(s).unwrap();
                    assert!(if s < 1.0 { x < s } else { x > s });
                }
            }
        }
    }

    #[test]
    fn volterra_slope_at_one_is_two() {
        let e = Expander::new(Contractor::<f64>::volterra());
        let h = 1e-4;
        let d = (e.eval(1.0 + h).unwrap() - e.eval(1.0 - h).unwrap()) / (2.0 * h);
        assert!((d - 2.0).abs() < 1e-6);
        assert!((e.derivative(1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_target_without_bracket_errors() {
        let c = Contractor::<f64>::custom("saturating", |s| 2.0 * s / (1.0 + s));
        assert!(Expander::new(c).eval(3.0).is_err());
    }
}
