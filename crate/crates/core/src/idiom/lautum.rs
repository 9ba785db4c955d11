use alloc::vec::Vec;

use super::IdiomError;
use crate::prob::{logsumexp, RandomStream};

/// Log-likelihood assigned to pairs whose likelihood is not finite.
pub const LOG_LIKELIHOOD_FLOOR: f64 = -50.0;

/// Sample-mean Lautum estimate from pre-drawn samples: `xs` from the memory
/// prior, `ys` from the perception prior. Identical `x` samples are
/// evaluated once and weighted by multiplicity, which leaves the value
/// unchanged.
pub fn lautum_from_samples<X, Y, F>(xs: &[X], ys: &[Y], mut log_lik: F) -> Result<f64, IdiomError>
where
    X: PartialEq,
    F: FnMut(&Y, &X) -> f64,
{
    if xs.is_empty() || ys.is_empty() {
        return Err(IdiomError::EmptySamples);
    }
    let mut unique: Vec<(&X, f64)> = Vec::new();
    for x in xs {
        match unique.iter_mut().find(|(u, _)| *u == x) {
            Some(entry) => entry.1 += 1.0,
            None => unique.push((x, 1.0)),
        }
    }
    let n = xs.len() as f64;
    let ln_n = libm::log(n);
    let ln_counts: Vec<f64> = unique.iter().map(|(_, c)| libm::log(*c)).collect();
    let mut shifted = alloc::vec![0.0; unique.len()];
    let mut total = 0.0;
    for y in ys {
        let mut mean = 0.0;
        for (k, (x, c)) in unique.iter().enumerate() {
            let mut l = log_lik(y, x);
            if !l.is_finite() {
                l = LOG_LIKELIHOOD_FLOOR;
            }
            mean += c * l;
            shifted[k] = l + ln_counts[k];
        }
        total += logsumexp(&shifted)? - ln_n - mean / n;
    }
    Ok((total / ys.len() as f64).max(0.0))
}

/// Draws `n` memory samples and `m` perception samples, then evaluates
/// [`lautum_from_samples`].
pub fn lautum_estimate<X, Y, SX, SY, F>(
    mut sample_x: SX,
    mut sample_y: SY,
    log_lik: F,
    m: usize,
    n: usize,
    rng: &mut RandomStream,
) -> Result<f64, IdiomError>
where
    X: PartialEq,
    SX: FnMut(&mut RandomStream) -> X,
    SY: FnMut(&mut RandomStream) -> Y,
    F: FnMut(&Y, &X) -> f64,
{
    if m == 0 || n == 0 {
        return Err(IdiomError::EmptySamples);
    }
    let xs: Vec<X> = (0..n).map(|_| sample_x(rng)).collect();
    let ys: Vec<Y> = (0..m).map(|_| sample_y(rng)).collect();
    lautum_from_samples(&xs, &ys, log_lik)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn channel(y: &bool, x: &bool) -> f64 {
        if y == x {
            libm::log(0.9)
        } else {
            libm::log(0.1)
        }
    }

    fn binary(m: usize, n: usize, seed: u64) -> f64 {
        let mut rng = RandomStream::new(seed, 1);
        lautum_estimate(|r| r.uniform() < 0.5, |r| r.uniform() < 0.5, channel, m, n, &mut rng).unwrap()
    }

    fn exact_binary() -> f64 {
        // E_y[log E_x p(y|x) − E_x log p(y|x)] with x, y uniform on {0, 1}
        libm::log(0.5) - 0.5 * (libm::log(0.9) + libm::log(0.1))
    }

    #[test]
    fn binary_channel_oracle() {
        assert_relative_eq!(exact_binary(), 0.5109, epsilon = 1e-4);
        assert!((binary(4096, 4096, 3) - exact_binary()).abs() < 0.02);
    }

    #[test]
    fn single_sample_is_exactly_zero() {
        for seed in 0..10 {
            assert_eq!(binary(1, 1, seed), 0.0);
        }
    }

    #[test]
    fn likelihood_ignoring_x_gives_zero() {
        let mut rng = RandomStream::new(5, 0);
        let v = lautum_estimate(|r| r.uniform(), |r| r.uniform(), |y: &f64, _x: &f64| -y * y, 32, 32, &mut rng).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn non_finite_likelihood_is_floored() {
        let xs = [0u8, 1];
        let ys = [0u8];
        let v = lautum_from_samples(&xs, &ys, |y, x| if x == y { 0.0 } else { f64::NEG_INFINITY }).unwrap();
        let expected = logsumexp(&[0.0, LOG_LIKELIHOOD_FLOOR]).unwrap() - libm::log(2.0) - LOG_LIKELIHOOD_FLOOR / 2.0;
        assert_relative_eq!(v, expected, epsilon = 1e-12);
    }

    #[test]
    fn deduplication_matches_direct_sum() {
        let xs = [true, true, false, true, false, false, false];
        let ys = [true, false, false];
        let dedup = lautum_from_samples(&xs, &ys, channel).unwrap();
        let n = xs.len() as f64;
        let mut direct = 0.0;
        for y in &ys {
            let ls: Vec<f64> = xs.iter().map(|x| channel(y, x)).collect();
            direct += logsumexp(&ls).unwrap() - libm::log(n) - ls.iter().sum::<f64>() / n;
        }
        assert_relative_eq!(dedup, (direct / 3.0).max(0.0), epsilon = 1e-12);
    }

    #[test]
    fn error_shrinks_with_sample_count() {
        let exact = exact_binary();
        let mean_err = |m: usize| (0..20).map(|s| (binary(m, m, 100 + s) - exact).abs()).sum::<f64>() / 20.0;
        assert!(mean_err(4096) < mean_err(256));
    }

    #[test]
    fn empty_samples_rejected() {
        let xs: [bool; 0] = [];
        assert_eq!(lautum_from_samples(&xs, &[true], channel), Err(IdiomError::EmptySamples));
    }
}
