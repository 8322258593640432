//! Diagonal-Gaussian distribution over model parameters with exact
//! differential entropy and KL divergence.
//!
//! These two quantities are the substrate of the drift statistic: between
//! consecutive training steps the detector accumulates
//! `|delta entropy + KL(new || old)|`, which is nonzero exactly when the
//! parameter distribution moved. All results are in nats.

use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::math;

/// Variances entering a log or a division are clamped to this floor.
/// Gradient steps can drive variances arbitrarily close to zero and the
/// KL terms divide by the previous step's variance.
pub const VARIANCE_FLOOR: f64 = 1e-12;

static FLOOR_EVENTS: AtomicUsize = AtomicUsize::new(0);

/// Number of times a variance was clamped to [`VARIANCE_FLOOR`] inside an
/// entropy/KL evaluation since process start (or the last reset).
pub fn variance_floor_events() -> usize {
    FLOOR_EVENTS.load(Ordering::Relaxed)
}

/// Reset the floor-event diagnostic counter.
pub fn reset_variance_floor_events() {
    FLOOR_EVENTS.store(0, Ordering::Relaxed);
}

#[inline]
fn floored(v: f64) -> f64 {
    if v < VARIANCE_FLOOR {
        FLOOR_EVENTS.fetch_add(1, Ordering::Relaxed);
        VARIANCE_FLOOR
    } else {
        v
    }
}

/// Errors raised by distribution construction and the divergence routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistError {
    /// Mean and variance vectors disagree in length, or two distributions
    /// of different dimension were combined.
    DimensionMismatch { expected: usize, got: usize },
    /// A mean or variance entry is NaN or infinite.
    NonFinite { index: usize },
    /// A variance entry is zero or negative.
    NonPositiveVariance { index: usize },
    /// The parameter vector is empty.
    Empty,
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            DistError::NonFinite { index } => {
                write!(f, "non-finite parameter at index {index}")
            }
            DistError::NonPositiveVariance { index } => {
                write!(f, "non-positive variance at index {index}")
            }
            DistError::Empty => write!(f, "parameter vector is empty"),
        }
    }
}

impl core::error::Error for DistError {}

/// Diagonal Gaussian over `K` model parameters: independent means and
/// strictly positive variances, one pair per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParamDist {
    mu: Vec<f64>,
    sigma2: Vec<f64>,
}

impl GaussianParamDist {
    /// Build a distribution from means and variances of equal length.
    /// Every entry must be finite and every variance strictly positive.
    pub fn new(mu: Vec<f64>, sigma2: Vec<f64>) -> Result<Self, DistError> {
        if mu.is_empty() {
            return Err(DistError::Empty);
        }
        if mu.len() != sigma2.len() {
            return Err(DistError::DimensionMismatch {
                expected: mu.len(),
                got: sigma2.len(),
            });
        }
        for (i, &m) in mu.iter().enumerate() {
            if !m.is_finite() {
                return Err(DistError::NonFinite { index: i });
            }
        }
        for (i, &v) in sigma2.iter().enumerate() {
            if !v.is_finite() {
                return Err(DistError::NonFinite { index: i });
            }
            if v <= 0.0 {
                return Err(DistError::NonPositiveVariance { index: i });
            }
        }
        Ok(Self { mu, sigma2 })
    }

    /// Standard prior: zero means, unit variances.
    pub fn standard(k: usize) -> Result<Self, DistError> {
        Self::new(alloc::vec![0.0; k], alloc::vec![1.0; k])
    }

    /// Number of parameters K.
    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    fn check_same_dim(&self, other: &Self) -> Result<(), DistError> {
        if self.k() != other.k() {
            return Err(DistError::DimensionMismatch {
                expected: self.k(),
                got: other.k(),
            });
        }
        Ok(())
    }
}

/// Differential entropy of a diagonal Gaussian, in nats:
/// `(K + K ln(2 pi) + sum_k ln sigma2_k) / 2`.
pub fn differential_entropy(d: &GaussianParamDist) -> f64 {
    let k = d.k() as f64;
    let log_det: f64 = d.sigma2.iter().map(|&v| math::ln(floored(v))).sum();
    0.5 * (k + k * math::LN_2PI + log_det)
}

/// KL divergence `D(p || q)` between diagonal Gaussians, in nats.
///
/// The canonical orientation is newer-given-older: `p` is the more recent
/// distribution, `q` the older one. This is deliberately not a flag; the
/// drift statistic depends on the direction.
pub fn kl_divergence(p: &GaussianParamDist, q: &GaussianParamDist) -> Result<f64, DistError> {
    p.check_same_dim(q)?;
    let k = p.k() as f64;
    let mut quad = 0.0;
    let mut log_ratio = 0.0;
    for i in 0..p.k() {
        let vp = floored(p.sigma2[i]);
        let vq = floored(q.sigma2[i]);
        let dm = q.mu[i] - p.mu[i];
        quad += (vp + dm * dm) / vq;
        log_ratio += math::ln(vq) - math::ln(vp);
    }
    Ok(0.5 * (quad - k + log_ratio))
}

/// The per-parameter quadratic summands of the KL divergence:
/// `(sigma2_pk + (mu_qk - mu_pk)^2) / sigma2_qk` for each k.
///
/// Summing these, subtracting K, adding the log-determinant ratio and
/// halving reproduces [`kl_divergence`]; the per-feature drift statistic
/// consumes the terms individually.
pub fn per_param_kl_terms(
    p: &GaussianParamDist,
    q: &GaussianParamDist,
) -> Result<Vec<f64>, DistError> {
    p.check_same_dim(q)?;
    let mut terms = Vec::with_capacity(p.k());
    for i in 0..p.k() {
        let vp = floored(p.sigma2[i]);
        let vq = floored(q.sigma2[i]);
        let dm = q.mu[i] - p.mu[i];
        terms.push((vp + dm * dm) / vq);
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn dist(mu: &[f64], s2: &[f64]) -> GaussianParamDist {
        GaussianParamDist::new(mu.to_vec(), s2.to_vec()).unwrap()
    }

    fn random_dist(rng: &mut SmallRng, k: usize) -> GaussianParamDist {
        let mu = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let s2 = (0..k).map(|_| rng.gen_range(0.05..4.0)).collect();
        GaussianParamDist::new(mu, s2).unwrap()
    }

    #[test]
    fn rejects_invalid_construction() {
        assert_eq!(
            GaussianParamDist::new(vec![], vec![]),
            Err(DistError::Empty)
        );
        assert_eq!(
            GaussianParamDist::new(vec![0.0], vec![1.0, 1.0]),
            Err(DistError::DimensionMismatch {
                expected: 1,
                got: 2
            })
        );
        assert_eq!(
            GaussianParamDist::new(vec![0.0], vec![0.0]),
            Err(DistError::NonPositiveVariance { index: 0 })
        );
        assert_eq!(
            GaussianParamDist::new(vec![0.0], vec![-1.0]),
            Err(DistError::NonPositiveVariance { index: 0 })
        );
        assert_eq!(
            GaussianParamDist::new(vec![f64::NAN], vec![1.0]),
            Err(DistError::NonFinite { index: 0 })
        );
        assert_eq!(
            GaussianParamDist::new(vec![0.0], vec![f64::INFINITY]),
            Err(DistError::NonFinite { index: 0 })
        );
    }

    #[test]
    fn entropy_unit_gaussian() {
        // K=1, sigma2=1: (1 + ln 2pi) / 2
        let h = differential_entropy(&dist(&[0.0], &[1.0]));
        assert!((h - 1.418_939).abs() < 1e-6, "h={h}");
    }

    #[test]
    fn entropy_two_unit_coordinates() {
        // additivity doubles the K=1 value: 1 + ln 2pi
        let h = differential_entropy(&dist(&[0.3, -0.7], &[1.0, 1.0]));
        assert!((h - 2.837_877).abs() < 1e-6, "h={h}");
    }

    #[test]
    fn entropy_ignores_means() {
        let a = differential_entropy(&dist(&[0.0, 0.0], &[0.5, 2.0]));
        let b = differential_entropy(&dist(&[10.0, -42.0], &[0.5, 2.0]));
        assert_eq!(a, b);
    }

    #[test]
    fn kl_identical_is_zero() {
        let d = dist(&[1.0, -2.0, 0.5], &[0.3, 1.0, 2.5]);
        assert_eq!(kl_divergence(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn kl_unit_shift() {
        // K=1, p=(1,1), q=(0,1): ((1+1)/1 - 1 + ln 1) / 2 = 0.5
        let p = dist(&[1.0], &[1.0]);
        let q = dist(&[0.0], &[1.0]);
        assert!((kl_divergence(&p, &q).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kl_additive_over_coordinates() {
        let p = dist(&[1.0, 0.0], &[1.0, 1.0]);
        let q = dist(&[0.0, 0.0], &[1.0, 1.0]);
        assert!((kl_divergence(&p, &q).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kl_dimension_mismatch() {
        let p = dist(&[0.0], &[1.0]);
        let q = dist(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(DistError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn per_param_terms_identity_case() {
        let d = dist(&[0.4, -1.0], &[0.7, 1.3]);
        let terms = per_param_kl_terms(&d, &d).unwrap();
        for t in terms {
            assert!((t - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn per_param_terms_hand_case() {
        let p = dist(&[1.0, 0.0], &[1.0, 1.0]);
        let q = dist(&[0.0, 0.0], &[1.0, 1.0]);
        let terms = per_param_kl_terms(&p, &q).unwrap();
        assert!((terms[0] - 2.0).abs() < 1e-12);
        assert!((terms[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn per_param_terms_recombine_to_kl() {
        let mut rng = SmallRng::seed_from_u64(7);
        for _ in 0..200 {
            let k = rng.gen_range(1..8);
            let p = random_dist(&mut rng, k);
            let q = random_dist(&mut rng, k);
            let terms = per_param_kl_terms(&p, &q).unwrap();
            let log_ratio: f64 = (0..k)
                .map(|i| math::ln(q.sigma2()[i]) - math::ln(p.sigma2()[i]))
                .sum();
            let recombined = 0.5 * (terms.iter().sum::<f64>() - k as f64 + log_ratio);
            let direct = kl_divergence(&p, &q).unwrap();
            assert!(
                (recombined - direct).abs() <= 1e-12,
                "recombined={recombined} direct={direct}"
            );
        }
    }

    #[test]
    fn kl_nonnegative_on_random_pairs() {
        let mut rng = SmallRng::seed_from_u64(42);
        for _ in 0..1000 {
            let k = rng.gen_range(1..6);
            let p = random_dist(&mut rng, k);
            let q = random_dist(&mut rng, k);
            let d = kl_divergence(&p, &q).unwrap();
            assert!(d >= 0.0, "negative KL {d}");
        }
        // zero iff componentwise equal
        let d = random_dist(&mut rng, 3);
        assert_eq!(kl_divergence(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn entropy_and_kl_additivity() {
        let mut rng = SmallRng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.gen_range(2..7);
            let p = random_dist(&mut rng, k);
            let q = random_dist(&mut rng, k);

            let h_joint = differential_entropy(&p);
            let h_sum: f64 = (0..k)
                .map(|i| differential_entropy(&dist(&[p.mu()[i]], &[p.sigma2()[i]])))
                .sum();
            assert!((h_joint - h_sum).abs() <= 1e-12);

            let kl_joint = kl_divergence(&p, &q).unwrap();
            let kl_sum: f64 = (0..k)
                .map(|i| {
                    kl_divergence(
                        &dist(&[p.mu()[i]], &[p.sigma2()[i]]),
                        &dist(&[q.mu()[i]], &[q.sigma2()[i]]),
                    )
                    .unwrap()
                })
                .sum();
            assert!((kl_joint - kl_sum).abs() <= 1e-12);
        }
    }

    #[test]
    fn variance_floor_counts_events() {
        reset_variance_floor_events();
        let tiny = dist(&[0.0], &[1e-300]);
        let _ = differential_entropy(&tiny);
        assert!(variance_floor_events() >= 1);
        reset_variance_floor_events();
        assert_eq!(variance_floor_events(), 0);
    }

    /// Monte-Carlo oracle: KL(p||q) is the mean of log p(x) - log q(x)
    /// under x ~ p. Independent of the closed form under test.
    #[test]
    fn kl_matches_monte_carlo_estimate() {
        use rand_distr::{Distribution, StandardNormal};

        let mut rng = SmallRng::seed_from_u64(2024);
        for k in 1..=3usize {
            let p = random_dist(&mut rng, k);
            let q = random_dist(&mut rng, k);
            let expected = kl_divergence(&p, &q).unwrap();

            let log_pdf = |d: &GaussianParamDist, x: &[f64]| -> f64 {
                (0..d.k())
                    .map(|i| {
                        let v = d.sigma2()[i];
                        let z = x[i] - d.mu()[i];
                        -0.5 * (math::LN_2PI + math::ln(v) + z * z / v)
                    })
                    .sum()
            };

            let n = 1_000_000usize;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut x = vec![0.0; k];
            for _ in 0..n {
                for i in 0..k {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x[i] = p.mu()[i] + p.sigma2()[i].sqrt() * z;
                }
                let lr = log_pdf(&p, &x) - log_pdf(&q, &x);
                sum += lr;
                sum_sq += lr * lr;
            }
            let mean = sum / n as f64;
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - expected).abs() <= 3.0 * se,
                "K={k}: mc={mean} kl={expected} se={se}"
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_dist(k: usize) -> impl Strategy<Value = GaussianParamDist> {
            (
                proptest::collection::vec(-5.0f64..5.0, k),
                proptest::collection::vec(0.01f64..10.0, k),
            )
                .prop_map(|(mu, s2)| GaussianParamDist::new(mu, s2).unwrap())
        }

        proptest! {
            #[test]
            fn kl_nonnegative(p in arb_dist(4), q in arb_dist(4)) {
                prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
            }

            #[test]
            fn entropy_shift_invariant(d in arb_dist(4), shift in -10.0f64..10.0) {
                let shifted = GaussianParamDist::new(
                    d.mu().iter().map(|m| m + shift).collect(),
                    d.sigma2().to_vec(),
                ).unwrap();
                prop_assert_eq!(differential_entropy(&d), differential_entropy(&shifted));
            }
        }
    }
}
