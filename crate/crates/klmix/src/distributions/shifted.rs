//! Translation of an arbitrary distribution.

use super::{require_finite, Distribution, Support};
use crate::Result;
use rand::RngCore;

/// The distribution of `X + shift` where `X ~ base`.
///
/// This is the conditional family used when convolving: conditioned on one
/// summand taking value `x`, the sum is the other summand shifted by `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shifted<D> {
    base: D,
    shift: f64,
}

impl<D: Distribution> Shifted<D> {
    pub fn new(base: D, shift: f64) -> Result<Self> {
        require_finite("shift", shift)?;
        Ok(Shifted { base, shift })
    }

    pub fn base(&self) -> &D {
        &self.base
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }
}

impl<D: Distribution> Distribution for Shifted<D> {
    fn support(&self) -> Support {
        self.base.support().shifted(self.shift)
    }

    fn log_pdf(&self, x: f64) -> f64 {
        self.base.log_pdf(x - self.shift)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.base.pdf(x - self.shift)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(x - self.shift)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.base.quantile(p)? + self.shift)
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        self.base.sample_one(rng) + self.shift
    }

    fn mean(&self) -> Option<f64> {
        self.base.mean().map(|m| m + self.shift)
    }

    fn variance(&self) -> Option<f64> {
        self.base.variance()
    }
}
