//! Logistic distribution.

use super::{check_probability, require_finite, require_positive, Distribution, Support};
use crate::Result;
use rand::RngCore;
use rand_distr::{Distribution as Sampler, Open01};
use std::f64::consts::PI;

/// Logistic distribution with location `loc` and scale `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Logistic {
    loc: f64,
    scale: f64,
}

impl Logistic {
    pub fn new(loc: f64, scale: f64) -> Result<Self> {
        require_finite("loc", loc)?;
        require_positive("scale", scale)?;
        Ok(Logistic { loc, scale })
    }

    pub fn loc(&self) -> f64 {
        self.loc
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Distribution for Logistic {
    fn support(&self) -> Support {
        Support::real()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        // log f = -|z| - 2 log(1 + exp(-|z|)) - log s, stable for large |z|.
        let z = (x - self.loc) / self.scale;
        let a = z.abs();
        -a - 2.0 * (-a).exp().ln_1p() - self.scale.ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.loc + self.scale * (p / (1.0 - p)).ln())
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        // Inverse transform on an open (0, 1) uniform.
        let u: f64 = Open01.sample(&mut *rng);
        self.loc + self.scale * (u / (1.0 - u)).ln()
    }

    fn mean(&self) -> Option<f64> {
        Some(self.loc)
    }

    fn variance(&self) -> Option<f64> {
        Some(PI * PI * self.scale * self.scale / 3.0)
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
        assert!(Logistic::new(f64::INFINITY, 1.0).is_err());
        assert!(Logistic::new(0.0, 0.0).is_err());
        assert!(Logistic::new(0.0, -2.0).is_err());
    }

    #[test]
    fn standard_logistic_reference_values() {
        let l = Logistic::new(0.0, 1.0).unwrap();
        assert_relative_eq!(l.pdf(0.0), 0.25, max_relative = 1e-14);
        assert_relative_eq!(l.cdf(0.0), 0.5, max_relative = 1e-15);
        // cdf(ln 3) = 3/4 exactly.
        assert_relative_eq!(l.cdf(3.0_f64.ln()), 0.75, max_relative = 1e-14);
        assert_relative_eq!(l.quantile(0.75).unwrap(), 3.0_f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        let l = Logistic::new(0.0, 1.0).unwrap();
        assert_eq!(l.cdf(-800.0), 0.0);
        assert_eq!(l.cdf(800.0), 1.0);
        assert!(l.log_pdf(-800.0).is_finite());
        assert_abs_diff_eq!(l.log_pdf(-800.0), -800.0, epsilon = 1e-9);
        assert_eq!(l.pdf(800.0), 0.0); // underflow, not NaN
    }

    #[test]
    fn sampling_matches_moments() {
        let l = Logistic::new(2.0, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = l.sample(200_000, &mut rng);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert_abs_diff_eq!(mean, 2.0, epsilon = 0.02);
        assert_abs_diff_eq!(var, PI * PI * 0.49 / 3.0, epsilon = 0.05);
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(
            loc in -20.0..20.0f64,
            scale in 0.05..10.0f64,
            p in 1e-9..=0.999_999_999f64,
        ) {
            let l = Logistic::new(loc, scale).unwrap();
            let x = l.quantile(p).unwrap();
            prop_assert!((l.cdf(x) - p).abs() < 1e-12);
        }

        #[test]
        fn log_pdf_symmetry(loc in -5.0..5.0f64, scale in 0.1..5.0f64, dx in 0.0..200.0f64) {
            let l = Logistic::new(loc, scale).unwrap();
            let a = l.log_pdf(loc + dx);
            let b = l.log_pdf(loc - dx);
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }
}
