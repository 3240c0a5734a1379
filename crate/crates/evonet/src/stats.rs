//! Small shared statistics helpers: quantiles, least squares, percentiles.

use crate::scalar::{cast, Real};

/// Empirical quantile with linear interpolation (type 7) on a sorted slice.
pub fn quantile_sorted<F: Real>(sorted: &[F], q: f64) -> F {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let q = q.clamp(0.0, 1.0);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let w: F = cast(pos - lo as f64);
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

/// Empirical quantile of an unsorted sample.
pub fn quantile<F: Real>(sample: &[F], q: f64) -> F {
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    quantile_sorted(&v, q)
}

/// Evenly spaced quantile grid of `points` thresholds over `[lo_q, hi_q]`.
pub fn quantile_grid<F: Real>(sample: &[F], lo_q: f64, hi_q: f64, points: usize) -> Vec<F> {
    assert!(points >= 1 && lo_q <= hi_q);
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    (0..points)
        .map(|i| {
            let q = if points == 1 {
                lo_q
            } else {
                lo_q + (hi_q - lo_q) * i as f64 / (points - 1) as f64
            };
            quantile_sorted(&v, q)
        })
        .collect()
}

/// Ordinary least squares y = slope * x + intercept, plus r-squared.
pub fn linear_fit<F: Real>(x: &[F], y: &[F]) -> (F, F, F) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points for a line");
    let n: F = cast(x.len() as f64);
    let mx = x.iter().copied().sum::<F>() / n;
    let my = y.iter().copied().sum::<F>() / n;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == F::zero() {
        return (F::zero(), my, F::zero());
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == F::zero() {
        F::one() // constant y is fit exactly
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r2)
}

/// Mean of a slice.
pub fn mean<F: Real>(v: &[F]) -> F {
    assert!(!v.is_empty());
    v.iter().copied().sum::<F>() / cast(v.len() as f64)
}

/// Median of an unsorted slice.
pub fn median<F: Real>(v: &[F]) -> F {
    quantile(v, 0.5)
}
