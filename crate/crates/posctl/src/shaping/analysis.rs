use super::penalty::Penalty;
use crate::error::{domain, Result};
use crate::numerics::least_squares_slope;
use crate::scalar::Scalar;

/// `Υ(s) + Υ(1/s) − 1` with `Υ(s) = Ψ(s)/((s − 1)Ψ′(s))`.
pub fn reciprocal_symmetry_residual<T: Scalar>(p: &Penalty<T>, s: T) -> Result<T> {
    if s == T::one() {
        return Err(domain("reciprocal symmetry is undefined at s = 1"));
    }
    let upsilon = |x: T| -> Result<T> { Ok(p.eval(x)? / ((x - T::one()) * p.prime(x)?)) };
    Ok(upsilon(s)? + upsilon(T::one() / s)? - T::one())
}

/// Which end of `(0, ∞)` an asymptotic fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Zero,
    Infinity,
}

/// Least-squares slope of `ln f` against `ln s` over a geometric window.
pub fn asymptotic_exponent<T: Scalar>(f: impl Fn(T) -> Result<T>, side: Side, window: &[T]) -> Result<T> {
    if window.len() < 8 {
        return Err(domain("asymptotic window needs at least 8 points"));
    }
    let on_side = |s: T| match side {
        Side::Zero => s > T::zero() && s < T::one(),
        Side::Infinity => s > T::one() && s.is_finite(),
    };
    if !window.iter().all(|&s| on_side(s)) {
        return Err(domain("window does not lie on the requested side of 1"));
    }
    let ratio = window[1] / window[0];
    let geometric = window.windows(2).all(|w| ((w[1] / w[0]) / ratio - T::one()).abs() < T::tol(1e-6));
    if !geometric || !(ratio > T::one()) {
        return Err(domain("window must be increasing and geometric"));
    }
    let mut xs = Vec::with_capacity(window.len());
    let mut ys = Vec::with_capacity(window.len());
    for &s in window {
        let v = f(s)?;
        if !(v > T::zero()) {
            return Err(domain(format!("function not positive at {s} (value {v})")));
        }
        xs.push(s.ln());
        ys.push(v.ln());
    }
    least_squares_slope(&xs, &ys)
}
