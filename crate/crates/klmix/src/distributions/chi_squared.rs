//! Chi-squared distribution.

use super::{check_probability, require_positive, Distribution, Support};
use crate::special::{invert_cdf, ln_gamma, reg_gamma_p};
use crate::Result;
use rand::RngCore;
use rand_distr::{Distribution as Sampler, Gamma};
use std::f64::consts::LN_2;

/// Chi-squared distribution with `nu` degrees of freedom (`nu > 0`, not
/// necessarily an integer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    nu: f64,
}

impl ChiSquared {
    pub fn new(nu: f64) -> Result<Self> {
        require_positive("nu", nu)?;
        Ok(ChiSquared { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Distribution for ChiSquared {
    fn support(&self) -> Support {
        Support::non_negative()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let half_nu = 0.5 * self.nu;
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            // Density limit at the boundary: 0 for nu > 2, 1/2 for nu = 2,
            // divergent below.
            return if self.nu > 2.0 {
                f64::NEG_INFINITY
            } else if self.nu == 2.0 {
                -LN_2
            } else {
                f64::INFINITY
            };
        }
        (half_nu - 1.0) * x.ln() - 0.5 * x - half_nu * LN_2 - ln_gamma(half_nu)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x == f64::INFINITY {
            1.0
        } else {
            reg_gamma_p(0.5 * self.nu, 0.5 * x)
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let scale = (2.0 * self.nu).sqrt();
        Ok(invert_cdf(
            |x| self.cdf(x),
            p,
            (0.0, f64::INFINITY),
            self.nu,
            scale,
        ))
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        // Chi-squared(nu) is Gamma(shape = nu/2, scale = 2).
        let gamma = Gamma::new(0.5 * self.nu, 2.0).expect("validated at construction");
        gamma.sample(&mut *rng)
    }

    fn mean(&self) -> Option<f64> {
        Some(self.nu)
    }

    fn variance(&self) -> Option<f64> {
        Some(2.0 * self.nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChiSquared::new(0.0).is_err());
        assert!(ChiSquared::new(-3.0).is_err());
        assert!(ChiSquared::new(f64::NAN).is_err());
    }

    #[test]
    fn five_degrees_reference_values() {
        // Frozen from an independent implementation of the regularized
        // incomplete gamma function.
        let c = ChiSquared::new(5.0).unwrap();
        assert_relative_eq!(c.cdf(0.158), 4.989_380_387_070_658e-4, max_relative = 1e-11);
        assert_relative_eq!(
            c.quantile(0.0005).unwrap(),
            0.158_137_522_889_653_52,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            c.quantile(0.9995).unwrap(),
            22.105_326_778_207_612,
            max_relative = 1e-10
        );
    }

    #[test]
    fn density_integrates_against_cdf() {
        // Trapezoid integral of the pdf reproduces cdf differences.
        let c = ChiSquared::new(3.5).unwrap();
        let (a, b) = (0.5, 7.0);
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut acc = 0.5 * (c.pdf(a) + c.pdf(b));
        for i in 1..n {
            acc += c.pdf(a + i as f64 * h);
        }
        assert_relative_eq!(acc * h, c.cdf(b) - c.cdf(a), max_relative = 1e-8);
    }

    #[test]
    fn boundary_density_cases() {
        assert_eq!(ChiSquared::new(5.0).unwrap().pdf(-1.0), 0.0);
        assert_eq!(ChiSquared::new(5.0).unwrap().pdf(0.0), 0.0);
        assert_abs_diff_eq!(ChiSquared::new(2.0).unwrap().pdf(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(ChiSquared::new(1.0).unwrap().log_pdf(0.0), f64::INFINITY);
        assert_eq!(ChiSquared::new(5.0).unwrap().cdf(-2.0), 0.0);
    }

    #[test]
    fn sampling_matches_moments() {
        let c = ChiSquared::new(5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = c.sample(200_000, &mut rng);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert_abs_diff_eq!(mean, 5.0, epsilon = 0.05);
        assert_abs_diff_eq!(var, 10.0, epsilon = 0.3);
        assert!(xs.iter().all(|&x| x >= 0.0));
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(nu in 0.5..40.0f64, p in 1e-6..=0.999_999f64) {
            let c = ChiSquared::new(nu).unwrap();
            let x = c.quantile(p).unwrap();
            prop_assert!(x >= 0.0);
            prop_assert!((c.cdf(x) - p).abs() < 1e-11);
        }

        #[test]
        fn cdf_is_monotone(nu in 0.5..40.0f64, a in 0.0..60.0f64, b in 0.0..60.0f64) {
            let c = ChiSquared::new(nu).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(c.cdf(lo) <= c.cdf(hi) + 1e-15);
        }
    }
}
