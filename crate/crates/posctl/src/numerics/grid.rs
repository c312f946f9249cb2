use crate::scalar::Scalar;

/// `n` log-uniformly spaced points from `lo` to `hi` inclusive.
pub fn log_grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / T::lit((n - 1) as f64);
            (0..n)
                .map(|k| match k {
                    0 => lo,
                    k if k == n - 1 => hi,
                    k => (a + step * T::lit(k as f64)).exp(),
                })
                .collect()
        }
    }
}

/// Cartesian product of per-axis samples, first axis varying slowest.
pub fn product_grid<T: Scalar>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
