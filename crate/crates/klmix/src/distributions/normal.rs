//! Normal (Gaussian) distribution.

use super::{check_probability, require_finite, require_positive, Distribution, Support};
use crate::special::{normal_cdf, normal_quantile};
use crate::Result;
use rand::RngCore;
use rand_distr::{Distribution as Sampler, StandardNormal};
use std::f64::consts::TAU;

/// Normal distribution with mean `mu` and standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mu: f64,
    sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        require_finite("mu", mu)?;
        require_positive("sigma", sigma)?;
        Ok(Normal { mu, sigma })
    }

    /// Standard normal, mean 0 and standard deviation 1.
    pub fn standard() -> Self {
        Normal { mu: 0.0, sigma: 1.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Distribution for Normal {
    fn support(&self) -> Support {
        Support::real()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        -0.5 * z * z - self.sigma.ln() - 0.5 * TAU.ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mu) / self.sigma)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.mu + self.sigma * normal_quantile(p))
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(&mut *rng);
        self.mu + self.sigma * z
    }

    fn mean(&self) -> Option<f64> {
        Some(self.mu)
    }

    fn variance(&self) -> Option<f64> {
        Some(self.sigma * self.sigma)
    }
}
