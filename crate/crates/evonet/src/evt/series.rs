//! Synthetic series with known tail and extremal indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::scalar::{cast, Real};

/// ARMAX process `X_t = max((1 - theta) X_{t-1}, theta Z_t)` with iid
/// unit-Frechet innovations and `X_0 = Z_0`. Its stationary marginal is unit
/// Frechet and its extremal index is exactly `theta`.
pub fn armax_series<F: Real>(n: usize, theta: f64, rng_seed: u64) -> Vec<F> {
    assert!(theta > 0.0 && theta <= 1.0, "theta must lie in (0, 1]");
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let t: F = cast(theta);
    let keep: F = cast(1.0 - theta);
    let mut x: F = frechet(&mut rng);
    out.push(x);
    for _ in 1..n {
        let z: F = frechet(&mut rng);
        let cand = t * z;
        let carry = keep * x;
        x = if carry > cand { carry } else { cand };
        out.push(x);
    }
    out
}

/// iid Pareto sample with `P(X > x) = x^(-alpha)` on [1, inf).
pub fn pareto_sample<F: Real>(n: usize, alpha: f64, rng_seed: u64) -> Vec<F> {
    assert!(alpha > 0.0);
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    (0..n).map(|_| pareto(&mut rng, alpha)).collect()
}

/// iid unit-Frechet sample, `P(X <= x) = exp(-1/x)`.
pub fn frechet_sample<F: Real>(n: usize, rng_seed: u64) -> Vec<F> {
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    (0..n).map(|_| frechet(&mut rng)).collect()
}

pub(crate) fn pareto<F: Real>(rng: &mut impl Rng, alpha: f64) -> F {
    let u: f64 = 1.0 - rng.gen::<f64>(); // in (0, 1]
    cast(u.powf(-1.0 / alpha))
}

fn frechet<F: Real>(rng: &mut impl Rng) -> F {
    let u: f64 = 1.0 - rng.gen::<f64>(); // in (0, 1]
    cast(-1.0 / u.ln().min(-f64::MIN_POSITIVE))
}
