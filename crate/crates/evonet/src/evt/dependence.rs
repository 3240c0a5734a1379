//! Dependence diagnostics for paired community score samples: distance
//! correlation with a permutation test, and the angular empirical
//! distribution of the largest radii under the polar transform.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::EvtError;
use crate::scalar::Real;

/// Distance correlation plus permutation-test p-value.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DcorTest {
    pub dcor: f64,
    pub p_value: f64,
    pub permutations: usize,
}

/// Double-centered pairwise distance matrix of a scalar sample (row-major).
fn centered_distances<F: Real>(x: &[F]) -> Vec<f64> {
    let n = x.len();
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (x[i] - x[j]).abs().to_f64().unwrap_or(f64::NAN);
        }
    }
    let mut row_mean = vec![0.0f64; n];
    let mut grand = 0.0f64;
    for i in 0..n {
        let s: f64 = a[i * n..(i + 1) * n].iter().sum();
        row_mean[i] = s / n as f64;
        grand += s;
    }
    grand /= (n * n) as f64;
    for i in 0..n {
        for j in 0..n {
            // symmetric distances: column mean equals row mean of j
            a[i * n + j] += grand - row_mean[i] - row_mean[j];
        }
    }
    a
}

fn v2(a: &[f64], b: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n * n {
        s += a[i] * b[i];
    }
    s / (n * n) as f64
}

fn v2_permuted(a: &[f64], b: &[f64], n: usize, perm: &[usize]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        let pi = perm[i];
        for j in 0..n {
            s += a[i * n + j] * b[pi * n + perm[j]];
        }
    }
    s / (n * n) as f64
}

/// Sample distance correlation of two scalar samples, in [0, 1].
pub fn distance_correlation<F: Real>(x: &[F], y: &[F]) -> Result<f64, EvtError> {
    if x.len() != y.len() {
        return Err(EvtError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(EvtError::TooSmallSample { n: x.len(), min: 2 });
    }
    let n = x.len();
    let a = centered_distances(x);
    let b = centered_distances(y);
    Ok(dcor_from_centered(&a, &b, n))
}

fn dcor_from_centered(a: &[f64], b: &[f64], n: usize) -> f64 {
    let vxy = v2(a, b, n);
    let vx = v2(a, a, n);
    let vy = v2(b, b, n);
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0; // a constant sample is independent of anything
    }
    let dcor2 = vxy / (vx * vy).sqrt();
    dcor2.max(0.0).sqrt()
}

/// Distance correlation with a permutation test: the p-value is the
/// proportion of `permutations` shuffles of y whose dcor is at least the
/// observed one.
pub fn distance_correlation_test<F: Real>(
    x: &[F],
    y: &[F],
    permutations: usize,
    rng_seed: u64,
) -> Result<DcorTest, EvtError> {
    if x.len() != y.len() {
        return Err(EvtError::LengthMismatch);
    }
    if x.len() < 10 {
        return Err(EvtError::TooSmallSample { n: x.len(), min: 10 });
    }
    let n = x.len();
    let a = centered_distances(x);
    let b = centered_distances(y);
    let observed = dcor_from_centered(&a, &b, n);

    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut at_least = 0usize;
    let vx = v2(&a, &a, n);
    let vy = v2(&b, &b, n);
    for _ in 0..permutations {
        perm.shuffle(&mut rng);
        let vxy = v2_permuted(&a, &b, n, &perm);
        let d = if vx <= 0.0 || vy <= 0.0 {
            0.0
        } else {
            (vxy / (vx * vy).sqrt()).max(0.0).sqrt()
        };
        if d >= observed {
            at_least += 1;
        }
    }
    Ok(DcorTest {
        dcor: observed,
        p_value: at_least as f64 / permutations.max(1) as f64,
        permutations,
    })
}

/// Angular empirical distribution of the k largest radii.
#[derive(Clone, Debug)]
pub struct AngularEdf {
    /// Sorted angles in [0, pi/2] of the k largest-radius pairs.
    pub angles: Vec<f64>,
    /// Mass inside the middle third [pi/6, pi/3]: near 1 means dependence.
    pub middle_third_mass: f64,
    /// Mass in the outer thirds: near 1 means asymptotic independence.
    pub outer_thirds_mass: f64,
}

/// Polar-transform diagnostic: angles `atan2(y, x)` of the `k` pairs with the
/// largest radius `sqrt(x^2 + y^2)`.
pub fn angular_edf<F: Real>(x: &[F], y: &[F], k: usize) -> Result<AngularEdf, EvtError> {
    if x.len() != y.len() {
        return Err(EvtError::LengthMismatch);
    }
    if k == 0 || k > x.len() {
        return Err(EvtError::InvalidK { k, max: x.len() });
    }
    let mut radii: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let xf = xi.to_f64().unwrap_or(f64::NAN);
            let yf = yi.to_f64().unwrap_or(f64::NAN);
            ((xf * xf + yf * yf).sqrt(), yf.atan2(xf))
        })
        .collect();
    radii.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite radii"));
    let mut angles: Vec<f64> = radii[..k].iter().map(|&(_, a)| a).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let third = std::f64::consts::FRAC_PI_2 / 3.0;
    let middle = angles.iter().filter(|&&a| a >= third && a <= 2.0 * third).count();
    let middle_third_mass = middle as f64 / k as f64;
    Ok(AngularEdf { angles, middle_third_mass, outer_thirds_mass: 1.0 - middle_third_mass })
}
