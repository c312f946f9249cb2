use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain("slope fit needs two or more paired samples"));
    }
    let n = T::lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |s, &x| s + x) / n;
    let my = ys.iter().fold(T::zero(), |s, &y| s + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(domain("slope fit needs distinct abscissae"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((least_squares_slope(&xs, &ys).unwrap() - 3.0).abs() < 1e-14);
    }
}
