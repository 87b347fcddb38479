//! Continuous univariate distributions and the contract they satisfy.
//!
//! Everything downstream (divergences, the bin construction, mixtures,
//! verification) talks to distributions only through the object-safe
//! [`Distribution`] trait, so user-supplied families plug in the same way as
//! the built-ins.

mod chi_squared;
mod logistic;
mod normal;
mod shifted;
mod skew_normal;
mod student_t;

pub use chi_squared::ChiSquared;
pub use logistic::Logistic;
pub use normal::Normal;
pub use shifted::Shifted;
pub use skew_normal::SkewNormal;
pub use student_t::StudentT;

use crate::Result;
use rand::RngCore;
use std::sync::Arc;

/// Closed support interval of a distribution; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    /// The whole real line.
    pub const fn real() -> Self {
        Support {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// The non-negative half line `[0, inf)`.
    pub const fn non_negative() -> Self {
        Support {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub const fn new(lo: f64, hi: f64) -> Self {
        Support { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Support translated by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Support {
            lo: self.lo + shift,
            hi: self.hi + shift,
        }
    }
}

/// A continuous univariate distribution.
///
/// The trait is object-safe: trait objects (`&dyn Distribution`,
/// `Arc<dyn Distribution + Send + Sync>`) are used wherever families are
/// chosen at runtime. Densities are exchanged in log space; `cdf` must be
/// non-decreasing and `quantile` must invert it on the open unit interval.
pub trait Distribution: std::fmt::Debug {
    /// Support of the distribution.
    fn support(&self) -> Support;

    /// Natural log of the density. Returns `-inf` where the density is zero.
    fn log_pdf(&self, x: f64) -> f64;

    /// Density at `x`.
    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Cumulative distribution function `P(X <= x)`.
    fn cdf(&self, x: f64) -> f64;

    /// Quantile (inverse CDF) for `p` strictly inside (0, 1).
    fn quantile(&self, p: f64) -> Result<f64>;

    /// Draw one sample.
    fn sample_one(&self, rng: &mut dyn RngCore) -> f64;

    /// Draw `n` samples.
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// Mean, if it exists.
    fn mean(&self) -> Option<f64>;

    /// Variance, if it exists.
    fn variance(&self) -> Option<f64>;
}

/// Shared-ownership distribution object, the lingua franca of runtime-chosen
/// families (CLI parsing, convolution inputs).
pub type DynDistribution = Arc<dyn Distribution + Send + Sync>;

macro_rules! delegate_distribution {
    ($ty:ty) => {
        impl<D: Distribution + ?Sized> Distribution for $ty {
            fn support(&self) -> Support {
                (**self).support()
            }
            fn log_pdf(&self, x: f64) -> f64 {
                (**self).log_pdf(x)
            }
            fn pdf(&self, x: f64) -> f64 {
                (**self).pdf(x)
            }
            fn cdf(&self, x: f64) -> f64 {
                (**self).cdf(x)
            }
            fn quantile(&self, p: f64) -> Result<f64> {
                (**self).quantile(p)
            }
            fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
                (**self).sample_one(rng)
            }
            fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
                (**self).sample(n, rng)
            }
            fn mean(&self) -> Option<f64> {
                (**self).mean()
            }
            fn variance(&self) -> Option<f64> {
                (**self).variance()
            }
        }
    };
}

delegate_distribution!(&D);
delegate_distribution!(Box<D>);
delegate_distribution!(Arc<D>);

/// Validate a probability argument for `quantile`.
pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidProbability(p))
    }
}

/// Validate that a parameter is finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

/// Validate that a parameter is finite.
pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trait_objects_delegate() {
        let n = Normal::new(1.0, 2.0).unwrap();
        let by_ref: &dyn Distribution = &n;
        let boxed: Box<dyn Distribution> = Box::new(n.clone());
        let arc: DynDistribution = Arc::new(n.clone());
        for x in [-1.0, 0.0, 2.5] {
            assert_eq!(by_ref.log_pdf(x), n.log_pdf(x));
            assert_eq!(boxed.cdf(x), n.cdf(x));
            assert_eq!(arc.pdf(x), n.pdf(x));
        }
        assert_eq!(arc.mean(), Some(1.0));
        assert_eq!(arc.variance(), Some(4.0));
        assert_eq!(
            boxed.quantile(0.25).unwrap(),
            n.quantile(0.25).unwrap()
        );
    }

    #[test]
    fn sampling_is_deterministic_under_a_seeded_rng() {
        let d = Logistic::new(0.0, 1.0).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(d.sample(16, &mut r1), d.sample(16, &mut r2));
    }

    #[test]
    fn support_helpers() {
        let s = Support::non_negative();
        assert!(s.contains(0.0));
        assert!(!s.contains(-1e-12));
        assert!(s.contains(1e300));
        let t = Support::real().shifted(3.0);
        assert_eq!(t, Support::real());
        let u = Support::new(0.0, 1.0).shifted(-2.0);
        assert_eq!(u, Support::new(-2.0, -1.0));
    }
}
