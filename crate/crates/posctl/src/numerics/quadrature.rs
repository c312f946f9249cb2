use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
///
/// `abs_tol` is applied to every accepted subinterval as is, without halving
/// per refinement level.
pub fn adaptive_simpson<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T, abs_tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if b < a {
        return adaptive_simpson(f, b, a, abs_tol).map(|v| -v);
    }
    // seed panels so that a lucky coarse estimate cannot terminate early
    let panels = 8usize;
    let h = (b - a) / T::lit(panels as f64);
    let mut total = T::zero();
    let mut x0 = a;
    let mut f0 = eval(f, a)?;
    for k in 1..=panels {
        let x1 = if k == panels { b } else { a + h * T::lit(k as f64) };
        let f1 = eval(f, x1)?;
        let m = (x0 + x1) * T::lit(0.5);
        let fm = eval(f, m)?;
        let whole = simpson(x0, x1, f0, fm, f1);
        total += refine(f, x0, x1, f0, fm, f1, whole, abs_tol, MAX_DEPTH)?;
        x0 = x1;
        f0 = f1;
    }
    Ok(total)
}

fn eval<T: Scalar>(f: &impl Fn(T) -> T, x: T) -> Result<T> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature { lo: x.as_f64(), hi: x.as_f64() })
    }
}

#[inline]
fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Scalar>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let m = (a + b) * T::lit(0.5);
    let lm = (a + m) * T::lit(0.5);
    let rm = (m + b) * T::lit(0.5);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    if depth == 0 || !(lm > a && rm < b) {
        return Err(Error::Quadrature { lo: a.as_f64(), hi: b.as_f64() });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol, depth - 1)?)
}

/// Integrates `h` from `x0` to `x1` where `h(x) − p/(x−1)` is smooth near the pole at 1.
///
/// Both limits must be positive and on the same side of 1. Inside
/// `|x−1| < radius` the integrand is replaced by its local model `p/(x−1)`,
/// which is integrated exactly; the smooth remainder is integrated in
/// `u = ln x`.
pub fn log_singular_integral<T: Scalar>(
    h: &impl Fn(T) -> T,
    p: T,
    x0: T,
    x1: T,
    radius: T,
    abs_tol: T,
) -> Result<T> {
    let one = T::one();
    if !(x0 > T::zero() && x1 > T::zero()) {
        return Err(domain("integration limits must be positive"));
    }
    if x0 == one || x1 == one || (x0 - one).signum() != (x1 - one).signum() {
        return Err(domain("integration limits must lie strictly on one side of 1"));
    }
    let clamp = |x: T| {
        let e = x - one;
        if e.abs() < radius {
            one + radius * e.signum()
        } else {
            x
        }
    };
    let (a, b) = (clamp(x0), clamp(x1));
    let smooth = if a == b {
        T::zero()
    } else {
        let g = |u: T| {
            let x = u.exp();
            (h(x) - p / (x - one)) * x
        };
        adaptive_simpson(&g, a.ln(), b.ln(), abs_tol)?
    };
    Ok(smooth + p * ((x1 - one).abs() / (x0 - one).abs()).ln())
}
