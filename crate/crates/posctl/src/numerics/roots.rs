use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Maximum number of doublings (or halvings) used while searching for a bracket.
pub const MAX_EXPANSIONS: usize = 200;
const MAX_ITER: usize = 500;

/// Brackets the root of an increasing map `f` on `(0, ∞)` by stepping away from `start`.
///
/// Upward the step factor doubles every time (2, 4, 8, ...), so maps with
/// logarithmic growth are still bracketed; downward the point is halved.
pub fn bracket_increasing<T: Scalar>(f: &impl Fn(T) -> T, start: T, what: &str) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let f0 = f(start);
    if f0.is_nan() {
        return Err(Error::Solver(format!("{what}: NaN at bracket start")));
    }
    if f0 == T::zero() {
        return Ok((start, start));
    }
    if f0 < T::zero() {
        let mut lo = start;
        let mut factor = two;
        let mut hi = start * factor;
        for _ in 0..MAX_EXPANSIONS {
            let v = f(hi);
            if v >= T::zero() {
                return Ok((lo, hi));
            }
            if !hi.is_finite() {
                break;
            }
            lo = hi;
            factor *= two;
            hi *= factor;
        }
    } else {
        let mut hi = start;
        let mut lo = start / two;
        for _ in 0..MAX_EXPANSIONS {
            if lo <= T::zero() {
                break;
            }
            let v = f(lo);
            if v <= T::zero() {
                return Ok((lo, hi));
            }
            hi = lo;
            lo /= two;
        }
    }
    Err(Error::Bracket { what: what.to_string(), expansions: MAX_EXPANSIONS })
}

/// Finds a root of `f` inside the sign-changing bracket `[lo, hi]`.
///
/// Secant (Illinois) steps with a bisection fallback; stops once the bracket
/// width drops below `rel_tol` times its magnitude.
pub fn solve_bracketed<T: Scalar>(
    f: &impl Fn(T) -> T,
    lo: T,
    hi: T,
    rel_tol: T,
    what: &str,
) -> Result<T> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::Bracket { what: what.to_string(), expansions: 0 });
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    let mut last_width = hi - lo;
    for it in 0..MAX_ITER {
        let w = hi - lo;
        let scale = lo.abs().max(hi.abs());
        if w <= rel_tol * scale || w <= T::min_positive_value() {
            let x = hi - fhi * w / (fhi - flo);
            return Ok(if x > lo && x < hi { x } else { lo + w * half });
        }
        // every third iteration demand the bracket has at least halved
        let force_bisect = it % 3 == 2 && w > last_width * half;
        if it % 3 == 2 {
            last_width = w;
        }
        let mut x = hi - fhi * w / (fhi - flo);
        if force_bisect || !(x > lo && x < hi) {
            // wide positive brackets are split in log scale
            x = if lo > T::zero() && hi > lo * T::lit(4.0) { (lo * hi).sqrt() } else { lo + w * half };
        }
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::Solver(format!("{what}: NaN inside bracket")));
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= half;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= half;
            }
            side = 1;
        }
    }
    Err(Error::Solver(what.to_string()))
}
