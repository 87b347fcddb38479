//! Finite mixtures of distributions.
//!
//! [`FiniteMixture`] is the output side of the bin constructions: one
//! component per bin, evaluated at the bin's reference point, weighted by the
//! bin's mixing mass. It implements [`Distribution`], so a discretized
//! mixture can be evaluated, inverted, and sampled like any other
//! distribution.

use crate::direct::{ConditionalFamily, Grid};
use crate::distributions::{check_probability, Distribution, Support};
use crate::{Error, Result};
use rand::RngCore;

/// A finite mixture `sum_i w_i * component_i` with `w_i > 0, sum w_i = 1`.
#[derive(Debug, Clone)]
pub struct FiniteMixture<D> {
    components: Vec<D>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    support: Support,
}

impl<D: Distribution> FiniteMixture<D> {
    /// Mixture from weights that already sum to one (within `1e-9`); they are
    /// rescaled to sum to one exactly.
    pub fn new(weights: Vec<f64>, components: Vec<D>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMixture("weights must sum to one"));
        }
        Self::new_unnormalized(weights, components)
    }

    /// Mixture from non-negative weights with any positive sum; the weights
    /// are normalized to probabilities.
    pub fn new_unnormalized(weights: Vec<f64>, components: Vec<D>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMixture("a mixture needs at least one component"));
        }
        if weights.len() != components.len() {
            return Err(Error::InvalidMixture(
                "need exactly one weight per component",
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMixture(
                "weights must be finite and non-negative",
            ));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMixture("weights must not all be zero"));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &components {
            let s = c.support();
            lo = lo.min(s.lo);
            hi = hi.max(s.hi);
        }
        Ok(FiniteMixture {
            components,
            weights,
            log_weights,
            support: Support::new(lo, hi),
        })
    }

    /// Instantiate the finite mixture a grid stands for: one conditional per
    /// reference point, weighted by bin mass.
    ///
    /// With `renormalize` the weights are rescaled to absorb the grid's
    /// dropped tail; without it the grid must not have dropped mass (within
    /// `1e-9`), since the raw weights would not form a distribution.
    pub fn from_grid<F>(grid: &Grid, family: &F, renormalize: bool) -> Result<Self>
    where
        F: ConditionalFamily<Conditional = D>,
    {
        if !renormalize && grid.dropped_tail() > 1e-9 {
            return Err(Error::InvalidMixture(
                "grid drops latent mass; renormalization is required",
            ));
        }
        let mut components = Vec::with_capacity(grid.k());
        for &x in grid.reference_points() {
            components.push(family.conditional(x)?);
        }
        Self::new_unnormalized(grid.weights().to_vec(), components)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Normalized component probabilities.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[D] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &D {
        &self.components[i]
    }
}

impl<D: Distribution> Distribution for FiniteMixture<D> {
    fn support(&self) -> Support {
        self.support
    }

    fn log_pdf(&self, x: f64) -> f64 {
        // Log-sum-exp over component log densities, shifted by the maximum
        // term so far-tail evaluations stay finite.
        let mut best = f64::NEG_INFINITY;
        let mut terms = Vec::with_capacity(self.components.len());
        for (c, lw) in self.components.iter().zip(&self.log_weights) {
            let t = lw + c.log_pdf(x);
            terms.push(t);
            if t > best {
                best = t;
            }
        }
        if best == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = terms.iter().map(|t| (t - best).exp()).sum();
        best + sum.ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (c, w) in self.components.iter().zip(&self.weights) {
            acc += w * c.cdf(x);
        }
        acc.clamp(0.0, 1.0)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        // Component quantiles bracket the mixture quantile: at the smallest
        // of them every component cdf is at most p, at the largest at least p.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.components {
            let q = c.quantile(p)?;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if lo >= hi {
            return Ok(lo);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidMixture(
                "component quantile not finite inside (0, 1)",
            ));
        }
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = self.cdf(mid);
            if (f - p).abs() <= 1e-13 {
                break;
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(mid)
    }

    fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rand::Rng::random(&mut &mut *rng);
        let mut acc = 0.0;
        let mut idx = self.components.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                idx = i;
                break;
            }
        }
        self.components[idx].sample_one(rng)
    }

    fn mean(&self) -> Option<f64> {
        let mut acc = 0.0;
        for (c, w) in self.components.iter().zip(&self.weights) {
            acc += w * c.mean()?;
        }
        Some(acc)
    }

    fn variance(&self) -> Option<f64> {
        let mean = self.mean()?;
        let mut second = 0.0;
        for (c, w) in self.components.iter().zip(&self.weights) {
            let m = c.mean()?;
            second += w * (c.variance()? + m * m);
        }
        Some(second - mean * mean)
    }
}
