//! Skew-normal distribution.

use super::{check_probability, require_finite, require_positive, Distribution, Support};
use crate::special::{invert_cdf, log_normal_cdf, normal_cdf, owen_t};
use crate::Result;
use rand::RngCore;
use rand_distr::{Distribution as Sampler, StandardNormal};
use std::f64::consts::{FRAC_2_PI, LN_2, PI, TAU};

/// Skew-normal distribution with location `xi`, scale `omega` and shape
/// `alpha`. Density `2/omega phi(z) Phi(alpha z)` with `z = (x - xi)/omega`;
/// `alpha = 0` recovers the normal distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewNormal {
    xi: f64,
    omega: f64,
    alpha: f64,
}

impl SkewNormal {
    pub fn new(xi: f64, omega: f64, alpha: f64) -> Result<Self> {
        require_finite("xi", xi)?;
        require_positive("omega", omega)?;
        require_finite("alpha", alpha)?;
        Ok(SkewNormal { xi, omega, alpha })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `delta = alpha / sqrt(1 + alpha^2)`, the moment skewness driver.
    fn delta(&self) -> f64 {
        self.alpha / (1.0 + self.alpha * self.alpha).sqrt()
    }
}

impl Distribution for SkewNormal {
    fn support(&self) -> Support {
        Support::real()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.xi) / self.omega;
        LN_2 - self.omega.ln() - 0.5 * z * z - 0.5 * TAU.ln() + log_normal_cdf(self.alpha * z)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let z = (x - self.xi) / self.omega;
        // Azzalini's formula; the difference can escape [0, 1] by rounding in
        // the extreme tails, so clamp.
        (normal_cdf(z) - 2.0 * owen_t(z, self.alpha)).clamp(0.0, 1.0)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let seed = self.mean().unwrap();
        let scale = self.variance().unwrap().sqrt();
        Ok(invert_cdf(
            |x| self.cdf(x),
            p,
            (f64::NEG_INFINITY, f64::INFINITY),
            seed,
            scale,
        ))
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        // Conditioning representation: z = delta |u| + sqrt(1-delta^2) v with
        // u, v independent standard normals.
        let d = self.delta();
        let u: f64 = StandardNormal.sample(&mut *rng);
        let v: f64 = StandardNormal.sample(&mut *rng);
        let z = d * u.abs() + (1.0 - d * d).sqrt() * v;
        self.xi + self.omega * z
    }

    fn mean(&self) -> Option<f64> {
        Some(self.xi + self.omega * self.delta() * FRAC_2_PI.sqrt())
    }

    fn variance(&self) -> Option<f64> {
        let d = self.delta();
        Some(self.omega * self.omega * (1.0 - 2.0 * d * d / PI))
    }
}
