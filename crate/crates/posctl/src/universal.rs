//! Universal-formula feedbacks for positive scalar input.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::predprey::{lie_lg, PredPreyState};
use crate::scalar::Scalar;

/// Output of a universal formula at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniversalEval<T> {
    /// Abstract control, equilibrium value 1.
    pub omega: T,
    /// `omega − 1`, kept separately so halving it is exact.
    pub deviation: T,
    /// Formula-specific weight: `√(lf²+lg²) − lf` for the basic formula,
    /// the weight on `(ω − 1)²` for the inverse-optimal one (`+∞` when `b ≥ 0`).
    pub r: T,
    /// Certified `V̇` under `omega`.
    pub vdot: T,
    /// State running cost; for the basic formula the certified decrease `−V̇`.
    pub q_run: T,
}

impl<T: Scalar> UniversalEval<T> {
    fn at_rest() -> Self {
        Self { omega: T::one(), deviation: T::zero(), r: T::zero(), vdot: T::zero(), q_run: T::zero() }
    }
}

/// `ω = 1 − lg/r` with `r = −lf + √(lf² + lg²)`.
///
/// Needs `lg ≥ 0 ⇒ lf < 0` away from the origin.
pub fn universal_basic<T: Scalar>(lf: T, lg: T) -> Result<UniversalEval<T>> {
    if lf == T::zero() && lg == T::zero() {
        return Ok(UniversalEval::at_rest());
    }
    if lg >= T::zero() && lf >= T::zero() {
        return Err(Error::Infeasible(format!("L_gV = {lg} >= 0 with L_fV = {lf} >= 0")));
    }
    let h = lf.hypot(lg);
    let r = if lf > T::zero() { lg * lg / (lf + h) } else { h - lf };
    let deviation = -lg / r;
    let vdot = lg - h;
    Ok(UniversalEval { omega: T::one() + deviation, deviation, r, vdot, q_run: -vdot })
}

/// Second form of the decrease, `−lf²/(lg + √(lf²+lg²))`; `None` where its denominator vanishes.
pub fn vdot_alternative<T: Scalar>(lf: T, lg: T) -> Option<T> {
    let den = lg + lf.hypot(lg);
    (den != T::zero()).then(|| -lf * lf / den)
}

/// Basic universal formula on the prey/predator pair `(L, G)`.
pub fn predprey_universal<T: Scalar>(s: PredPreyState<T>) -> Result<T> {
    let (l, g) = lie_lg(s);
    if l == T::zero() && g == T::zero() {
        return Ok(T::one());
    }
    let den = l.hypot(g) - l;
    Ok(T::one() - g / den)
}

/// Inverse-optimal universal formula on the shifted pair `(a, b)`.
///
/// For `b ≥ 0` the control rests at 1 with infinite weight; otherwise
/// `ω = 1 − κ` with `κ = (a + √(a²+b²))/b`.
pub fn universal_invopt<T: Scalar>(a: T, b: T) -> Result<UniversalEval<T>> {
    if a == T::zero() && b == T::zero() {
        return Ok(UniversalEval::at_rest());
    }
    if b >= T::zero() {
        if a >= T::zero() {
            return Err(Error::Infeasible(format!("(a, b) = ({a}, {b}) outside the admissible set")));
        }
        return Ok(UniversalEval { omega: T::one(), deviation: T::zero(), r: T::infinity(), vdot: a, q_run: -a });
    }
    let h = a.hypot(b);
    // a + h and b²/(a + h) rewritten for a < 0 to avoid cancellation
    let (a_plus_h, q) = if a < T::zero() { (b * b / (h - a), h - a) } else { (a + h, b * b / (a + h)) };
    let kappa = a_plus_h / b;
    Ok(UniversalEval { omega: T::one() - kappa, deviation: -kappa, r: q, vdot: -h, q_run: q })
}

/// `ω_{κ/2} = 1 + (ω_κ − 1)/2`.
pub fn half_universal<T: Scalar>(a: T, b: T) -> Result<UniversalEval<T>> {
    let full = universal_invopt(a, b)?;
    let deviation = full.deviation / T::lit(2.0);
    Ok(UniversalEval { omega: T::one() + deviation, deviation, vdot: a + b * deviation, ..full })
}

/// `u(x) = x² + √(x⁴ + 1)` for `x > 0`, else 0, for `ẋ = x² − u`, `V = x²/2`.
pub fn scalar_example_feedback<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x * x + (x * x * x * x + T::one()).sqrt()
    } else {
        T::zero()
    }
}
