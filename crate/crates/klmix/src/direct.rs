//! Construction of divergence-bounded bins over a latent mixing variable.
//!
//! Given a conditional family `p(y | x)` and a mixing distribution for `x`,
//! the routines here partition the latent domain into bins, each carrying one
//! reference point, such that every latent value inside a bin yields a
//! conditional within symmetrized divergence `delta` of the bin reference.
//! Replacing each bin by its reference turns the continuous mixture into a
//! finite one whose marginal divergence is bounded by `delta` plus the effect
//! of an ignored latent tail of mass at most `epsilon`.
//!
//! Two constructions are provided:
//!
//! * [`direct_sequential`] sweeps left to right, alternating divergence
//!   crossings for bin margins and reference points. Works for any family
//!   whose divergence grows with latent separation.
//! * [`direct_location`] exploits translation invariance: one crossing fixes
//!   the bin half-width, and references are laid out on an even grid.

use crate::distributions::{Distribution, Normal, Shifted, Support};
use crate::divergence::{sym_kl_numeric, QuadratureSettings};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A family of conditional distributions indexed by a latent variable.
pub trait ConditionalFamily {
    /// The conditional distribution type.
    type Conditional: Distribution;

    /// The conditional at latent value `x`.
    fn conditional(&self, x: f64) -> Result<Self::Conditional>;

    /// Latent values for which `conditional` is defined. Boundary points may
    /// be degenerate (the constructions only evaluate interior points).
    fn latent_domain(&self) -> Support;

    /// Symmetrized divergence between the conditionals at `x1` and `x2`.
    ///
    /// The default integrates numerically; families with closed forms should
    /// override.
    fn divergence(&self, x1: f64, x2: f64, quad: &QuadratureSettings) -> Result<f64> {
        let p = self.conditional(x1)?;
        let q = self.conditional(x2)?;
        sym_kl_numeric(&p, &q, quad)
    }
}

/// Scale family `Normal(0, sqrt(nu / x))` over a positive latent `x`.
///
/// Mixing this family over a chi-squared distribution with `nu` degrees of
/// freedom yields the Student-t distribution with `nu` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalScaleFamily {
    nu: f64,
}

impl NormalScaleFamily {
    pub fn new(nu: f64) -> Result<Self> {
        super::distributions::require_positive("nu", nu)?;
        Ok(NormalScaleFamily { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl ConditionalFamily for NormalScaleFamily {
    type Conditional = Normal;

    fn conditional(&self, x: f64) -> Result<Normal> {
        if !(x > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x",
                value: x,
                reason: "latent value must be > 0 for a scale family",
            });
        }
        Normal::new(0.0, (self.nu / x).sqrt())
    }

    fn latent_domain(&self) -> Support {
        Support::non_negative()
    }

    fn divergence(&self, x1: f64, x2: f64, _quad: &QuadratureSettings) -> Result<f64> {
        if !(x1 > 0.0) || !(x2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x",
                value: if x1 > 0.0 { x2 } else { x1 },
                reason: "latent value must be > 0 for a scale family",
            });
        }
        // Conditionals are zero-mean normals with variances nu/x1, nu/x2; the
        // closed-form symmetrized divergence collapses to a ratio of latents.
        let d = x1 - x2;
        Ok(d * d / (2.0 * x1 * x2))
    }
}

/// Location family `Normal(x, sigma)` over a real latent `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLocationFamily {
    sigma: f64,
}

impl NormalLocationFamily {
    pub fn new(sigma: f64) -> Result<Self> {
        super::distributions::require_positive("sigma", sigma)?;
        Ok(NormalLocationFamily { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl ConditionalFamily for NormalLocationFamily {
    type Conditional = Normal;

    fn conditional(&self, x: f64) -> Result<Normal> {
        Normal::new(x, self.sigma)
    }

    fn latent_domain(&self) -> Support {
        Support::real()
    }

    fn divergence(&self, x1: f64, x2: f64, _quad: &QuadratureSettings) -> Result<f64> {
        // Mean shift of c standard deviations has divergence c^2.
        let c = (x1 - x2) / self.sigma;
        Ok(c * c)
    }
}

/// Shift family: the conditional at `x` is a fixed base distribution
/// translated by `x`. This is the family behind convolution: conditioned on
/// one summand equaling `x`, the sum is the other summand shifted by `x`.
#[derive(Debug, Clone)]
pub struct ShiftFamily<D> {
    base: D,
}

impl<D: Distribution + Clone> ShiftFamily<D> {
    pub fn new(base: D) -> Self {
        ShiftFamily { base }
    }

    pub fn base(&self) -> &D {
        &self.base
    }
}

impl<D: Distribution + Clone> ConditionalFamily for ShiftFamily<D> {
    type Conditional = Shifted<D>;

    fn conditional(&self, x: f64) -> Result<Shifted<D>> {
        Shifted::new(self.base.clone(), x)
    }

    fn latent_domain(&self) -> Support {
        Support::real()
    }
}

/// Conditional family defined by a closure, for one-off custom families.
pub struct MapFamily<F> {
    domain: Support,
    f: F,
}

impl<F, D> MapFamily<F>
where
    F: Fn(f64) -> Result<D>,
    D: Distribution,
{
    pub fn new(domain: Support, f: F) -> Self {
        MapFamily { domain, f }
    }
}

impl<F, D> ConditionalFamily for MapFamily<F>
where
    F: Fn(f64) -> Result<D>,
    D: Distribution,
{
    type Conditional = D;

    fn conditional(&self, x: f64) -> Result<D> {
        (self.f)(x)
    }

    fn latent_domain(&self) -> Support {
        self.domain
    }
}

/// Tuning knobs for the bin constructions.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectConfig {
    /// Ceiling on the per-bin symmetrized divergence. Required.
    pub delta: f64,
    /// Latent tail mass the construction may ignore (split across both ends
    /// by default). Default `1e-3`.
    pub epsilon: f64,
    /// First reference point. Default: the `epsilon/2` quantile of the
    /// mixing distribution. Ignored by [`direct_location`].
    pub start: Option<f64>,
    /// Convergence tolerance of the crossing search, in divergence units.
    /// Default `delta * 1e-6`.
    pub root_tol: Option<f64>,
    /// Initial bracketing step of the crossing search. Default: a tenth of
    /// the mixing distribution's interquartile range.
    pub initial_step: Option<f64>,
    /// Geometric growth factor of the bracketing step. Default 2.
    pub step_factor: f64,
    /// Bracketing expansions allowed per crossing search. Default 200.
    pub max_expansions: usize,
    /// Hard ceiling on the number of bins. Default 100_000.
    pub max_components: usize,
    /// Tolerances for numeric divergence evaluations.
    pub quadrature: QuadratureSettings,
}

impl DirectConfig {
    pub fn new(delta: f64) -> Self {
        DirectConfig {
            delta,
            epsilon: 1e-3,
            start: None,
            root_tol: None,
            initial_step: None,
            step_factor: 2.0,
            max_expansions: 200,
            max_components: 100_000,
            quadrature: QuadratureSettings::default(),
        }
    }

    /// Check the configuration invariants without running a construction.
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: self.delta,
                reason: "must be finite and > 0",
            });
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                reason: "must lie in [0, 1)",
            });
        }
        if let Some(s) = self.start {
            if !s.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "start",
                    value: s,
                    reason: "must be finite",
                });
            }
        }
        if let Some(t) = self.root_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "root_tol",
                    value: t,
                    reason: "must be finite and > 0",
                });
            }
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "initial_step",
                    value: h,
                    reason: "must be finite and > 0",
                });
            }
        }
        if !(self.step_factor > 1.0 && self.step_factor.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step_factor",
                value: self.step_factor,
                reason: "must be finite and > 1",
            });
        }
        if self.max_expansions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_expansions",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        if self.max_components == 0 {
            return Err(Error::InvalidParameter {
                name: "max_components",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        self.quadrature.validate()
    }

    fn root_tol_value(&self) -> f64 {
        self.root_tol.unwrap_or(self.delta * 1e-6)
    }
}

/// Outcome of a rightward divergence-crossing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// First point past the anchor where the divergence reaches the target.
    At(f64),
    /// The divergence stays below the target all the way out to `probe`.
    Unreached { probe: f64 },
}

/// Find the first point right of `anchor` where the conditional divergence
/// from `anchor` reaches `config.delta`, searching no farther than `probe`.
///
/// Geometric bracketing followed by bisection; the returned point sits within
/// `config.root_tol` (divergence units) above the crossing. If the divergence
/// never reaches `delta` by `probe`, returns [`Crossing::Unreached`].
pub fn advance_to_delta<F: ConditionalFamily>(
    family: &F,
    anchor: f64,
    probe: f64,
    config: &DirectConfig,
) -> Result<Crossing> {
    config.validate()?;
    if !(probe > anchor) {
        return Err(Error::InvalidParameter {
            name: "probe",
            value: probe,
            reason: "must lie strictly right of the anchor",
        });
    }
    let h0 = config
        .initial_step
        .unwrap_or((probe - anchor) / 1000.0)
        .min(probe - anchor);
    find_crossing(family, anchor, probe, h0, config)
}

/// Crossing search with an explicit initial step (internal driver).
fn find_crossing<F: ConditionalFamily>(
    family: &F,
    anchor: f64,
    probe: f64,
    h0: f64,
    config: &DirectConfig,
) -> Result<Crossing> {
    let delta = config.delta;
    let tol_d = config.root_tol_value();
    let quad = &config.quadrature;
    debug_assert!(h0 > 0.0 && probe > anchor);

    // Bracket: walk right with geometrically growing steps until the
    // divergence reaches delta or the probe is passed below it.
    let mut lo = anchor;
    let mut hi = (anchor + h0).min(probe);
    let mut step = h0;
    let mut d_hi;
    let mut expansions = 0usize;
    loop {
        let v = family.divergence(anchor, hi, quad)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteDivergence { at: hi });
        }
        if v >= delta {
            d_hi = v;
            break;
        }
        if hi >= probe {
            return Ok(Crossing::Unreached { probe });
        }
        expansions += 1;
        if expansions > config.max_expansions {
            return Err(Error::BracketFailure {
                anchor,
                delta,
                expansions: config.max_expansions,
            });
        }
        lo = hi;
        step *= config.step_factor;
        hi = (hi + step).min(probe);
    }

    // Bisect [lo, hi] down onto the crossing, keeping d(hi) >= delta.
    for _ in 0..200 {
        if d_hi - delta <= tol_d {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // floating-point resolution exhausted
        }
        let v = family.divergence(anchor, mid, quad)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteDivergence { at: mid });
        }
        if v >= delta {
            hi = mid;
            d_hi = v;
        } else {
            lo = mid;
        }
    }

    // A crossing glued to the anchor would create a zero-width bin, which
    // means the divergence jumps rather than grows: refuse to loop on it.
    if hi - anchor <= 1e-13 * anchor.abs().max(1.0) {
        return Err(Error::DegenerateCrossing { anchor, delta });
    }
    Ok(Crossing::At(hi))
}

/// Bin probabilities of `mixing` for the partition cut at `margins`.
///
/// Returns `margins.len() + 1` weights: the first bin absorbs the entire left
/// tail and the last the entire right tail, so the weights sum to one.
pub fn bin_weights<M>(mixing: &M, margins: &[f64]) -> Result<Vec<f64>>
where
    M: Distribution + ?Sized,
{
    for (i, w) in margins.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotoneMargins {
                index: i + 1,
                value: w[1],
            });
        }
    }
    let mut weights = Vec::with_capacity(margins.len() + 1);
    let mut prev = 0.0;
    for &m in margins {
        let c = mixing.cdf(m);
        weights.push((c - prev).max(0.0));
        prev = c;
    }
    weights.push((1.0 - prev).max(0.0));
    Ok(weights)
}

/// Sequential construction: alternate divergence crossings for margins and
/// references, sweeping the latent domain left to right.
///
/// Starts at `config.start` (default: the `epsilon/2` mixing quantile),
/// stops once the mass beyond the latest margin fits inside the remaining
/// ignorable budget `epsilon - P(X <= start)`. The final margin then acts as
/// a cutoff and the mass beyond it is reported as the grid's dropped tail.
/// If instead the divergence stops reaching `delta` (everything remaining is
/// close to the last reference), the final bin extends to infinity and
/// nothing is dropped.
pub fn direct_sequential<F, M>(family: &F, mixing: &M, config: &DirectConfig) -> Result<Grid>
where
    F: ConditionalFamily,
    M: Distribution + ?Sized,
{
    config.validate()?;
    let domain = family.latent_domain();

    let start = match config.start {
        Some(s) => s,
        None => {
            if config.epsilon <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "epsilon",
                    value: config.epsilon,
                    reason: "must be > 0 when no explicit start is given",
                });
            }
            mixing.quantile(0.5 * config.epsilon)?
        }
    };
    if !domain.contains(start) {
        return Err(Error::InvalidParameter {
            name: "start",
            value: start,
            reason: "outside the family's latent domain",
        });
    }
    let eps1 = mixing.cdf(start);
    if eps1 > config.epsilon {
        return Err(Error::InvalidStart {
            eps1,
            epsilon: config.epsilon,
        });
    }
    let budget = config.epsilon - eps1;

    // Farthest point any search needs to look at: beyond it lies either less
    // mass than the ignorable budget or less than 1e-12 of stray mass.
    let probe_tail = budget.clamp(1e-15, 1e-12);
    let probe = mixing.quantile(1.0 - probe_tail)?.min(domain.hi);
    if !(probe > start) {
        return Err(Error::InvalidParameter {
            name: "start",
            value: start,
            reason: "no mixing mass lies right of the start point",
        });
    }

    let h0 = match config.initial_step {
        Some(h) => h,
        None => {
            let iqr = mixing.quantile(0.75)? - mixing.quantile(0.25)?;
            let h = 0.1 * iqr;
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "initial_step",
                    value: h,
                    reason: "mixing interquartile range is degenerate; set initial_step",
                });
            }
            h
        }
    };

    let mut references = vec![start];
    let mut margins: Vec<f64> = Vec::new();
    let mut has_cutoff = false;

    loop {
        let anchor = *references.last().expect("at least the start reference");
        // Margin: next divergence crossing from the current reference.
        match find_crossing(family, anchor, probe, h0, config)? {
            Crossing::Unreached { .. } => {
                // Everything that matters is within delta of the last
                // reference: close the final bin at infinity.
                break;
            }
            Crossing::At(margin) => {
                margins.push(margin);
                // Stop once the mass beyond this margin fits in the budget;
                // that mass is dropped and the margin becomes the cutoff.
                if 1.0 - mixing.cdf(margin) <= budget {
                    has_cutoff = true;
                    break;
                }
                if references.len() >= config.max_components {
                    return Err(Error::ComponentBudget {
                        max: config.max_components,
                    });
                }
                // Reference: next crossing from the margin.
                match find_crossing(family, margin, probe, h0, config)? {
                    Crossing::Unreached { probe } => {
                        // The whole remaining domain is within delta of the
                        // margin; park the final reference at the probe and
                        // let its bin run to infinity.
                        references.push(probe);
                        break;
                    }
                    Crossing::At(reference) => references.push(reference),
                }
            }
        }
    }

    let all_weights = bin_weights(mixing, &margins)?;
    let k = references.len();
    let (weights, dropped_tail) = if has_cutoff {
        debug_assert_eq!(margins.len(), k);
        (all_weights[..k].to_vec(), all_weights[k])
    } else {
        debug_assert_eq!(margins.len(), k - 1);
        (all_weights, 0.0)
    };
    Grid::new(references, margins, weights, dropped_tail)
}

/// Even-grid construction for translation-invariant (location) families.
///
/// One crossing search fixes the half-width `w` at which the divergence from
/// a reference reaches `delta`; references are then laid out evenly over the
/// central `1 - epsilon` mixing mass with spacing at most `2w`, margins at
/// the midpoints, and the outer bins absorbing the tails. Nothing is
/// dropped: the tails are represented (by the edge references), merely not
/// divergence-certified.
///
/// The family must be translation-invariant: `divergence(x1, x2)` may depend
/// only on `x2 - x1`, as with [`ShiftFamily`] and [`NormalLocationFamily`].
pub fn direct_location<F, M>(family: &F, mixing: &M, config: &DirectConfig) -> Result<Grid>
where
    F: ConditionalFamily,
    M: Distribution + ?Sized,
{
    config.validate()?;
    if config.epsilon <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: config.epsilon,
            reason: "must be > 0 for the location construction",
        });
    }
    let lo = mixing.quantile(0.5 * config.epsilon)?;
    let hi = mixing.quantile(1.0 - 0.5 * config.epsilon)?;
    let range = hi - lo;
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: config.epsilon,
            reason: "mixing quantile range is degenerate",
        });
    }

    // One crossing from the median fixes the divergence half-width.
    let anchor = mixing.quantile(0.5)?;
    let h0 = config.initial_step.unwrap_or(0.02 * range);
    let probe = anchor + 2.0 * range;
    let half_width = match find_crossing(family, anchor, probe, h0, config)? {
        Crossing::At(x) => x - anchor,
        // No crossing within twice the range: bins can be arbitrarily wide.
        Crossing::Unreached { probe } => probe - anchor,
    };

    // Fencepost layout: k references spanning [lo, hi] with spacing <= 2w.
    let k = (range / (2.0 * half_width)).ceil() as usize + 1;
    if k > config.max_components {
        return Err(Error::ComponentBudget {
            max: config.max_components,
        });
    }
    let mut references = Vec::with_capacity(k);
    let mut margins = Vec::with_capacity(k - 1);
    if k == 1 {
        references.push(0.5 * (lo + hi));
    } else {
        let spacing = range / (k - 1) as f64;
        for i in 0..k {
            references.push(lo + i as f64 * spacing);
        }
        for i in 0..k - 1 {
            margins.push(lo + (i as f64 + 0.5) * spacing);
        }
    }
    let weights = bin_weights(mixing, &margins)?;
    Grid::new(references, margins, weights, 0.0)
}

/// A divergence-bounded tessellation of the latent domain.
///
/// `k` reference points and either `k - 1` margins (last bin unbounded,
/// nothing dropped) or `k` margins (last margin is a cutoff; the mixing mass
/// beyond it, `dropped_tail`, is excluded from the weights). Weights are
/// stored raw: they sum to `1 - dropped_tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    reference_points: Vec<f64>,
    margins: Vec<f64>,
    weights: Vec<f64>,
    dropped_tail: f64,
}

impl Grid {
    /// Assemble and validate a grid.
    pub fn new(
        reference_points: Vec<f64>,
        margins: Vec<f64>,
        weights: Vec<f64>,
        dropped_tail: f64,
    ) -> Result<Grid> {
        let k = reference_points.len();
        if k == 0 {
            return Err(Error::InvalidGrid("no reference points"));
        }
        if reference_points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite reference point"));
        }
        if margins.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite margin"));
        }
        for w in reference_points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidGrid("reference points must strictly increase"));
            }
        }
        for (i, w) in margins.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotoneMargins {
                    index: i + 1,
                    value: w[1],
                });
            }
        }
        if margins.len() != k && margins.len() + 1 != k {
            return Err(Error::InvalidGrid(
                "need k margins (cutoff) or k - 1 margins (open tail) for k references",
            ));
        }
        for (i, &m) in margins.iter().enumerate() {
            if !(m > reference_points[i]) {
                return Err(Error::InvalidGrid(
                    "each margin must lie right of its bin's reference",
                ));
            }
            if i + 1 < k && !(m < reference_points[i + 1]) {
                return Err(Error::InvalidGrid(
                    "each margin must lie left of the next reference",
                ));
            }
        }
        if weights.len() != k {
            return Err(Error::InvalidGrid("need exactly one weight per reference"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidGrid("weights must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&dropped_tail) {
            return Err(Error::InvalidGrid("dropped tail must lie in [0, 1)"));
        }
        if margins.len() + 1 == k && dropped_tail != 0.0 {
            return Err(Error::InvalidGrid(
                "a grid without a cutoff margin cannot drop mass",
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total + dropped_tail - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGrid(
                "weights plus dropped tail must sum to one",
            ));
        }
        Ok(Grid {
            reference_points,
            margins,
            weights,
            dropped_tail,
        })
    }

    /// Number of bins (and mixture components).
    pub fn k(&self) -> usize {
        self.reference_points.len()
    }

    pub fn reference_points(&self) -> &[f64] {
        &self.reference_points
    }

    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    /// Raw bin weights; they sum to `1 - dropped_tail()`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mixing mass beyond the cutoff margin (zero when there is none).
    pub fn dropped_tail(&self) -> f64 {
        self.dropped_tail
    }

    /// Whether the final margin is a cutoff (mass beyond it was dropped).
    pub fn has_cutoff(&self) -> bool {
        self.margins.len() == self.reference_points.len()
    }

    /// Probability bin `i` as a latent interval. The first bin reaches to
    /// `-inf` and, without a cutoff, the last reaches `+inf`.
    pub fn bin_bounds(&self, i: usize) -> (f64, f64) {
        assert!(i < self.k(), "bin index out of range");
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.margins[i - 1]
        };
        let hi = if i < self.margins.len() {
            self.margins[i]
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }

    /// The sub-interval of bin `i` on which the per-bin divergence guarantee
    /// was established: outer tails beyond the first reference (and beyond
    /// the last margin or reference) are covered by the epsilon budget, not
    /// by the divergence ceiling.
    pub fn scan_bounds(&self, i: usize) -> (f64, f64) {
        assert!(i < self.k(), "bin index out of range");
        let lo = if i == 0 {
            self.reference_points[0]
        } else {
            self.margins[i - 1]
        };
        let hi = if i < self.margins.len() {
            self.margins[i]
        } else {
            self.reference_points[self.k() - 1]
        };
        (lo, hi.max(lo))
    }

    /// Latent interval over which the divergence guarantee holds end to end.
    pub fn certified_span(&self) -> (f64, f64) {
        (self.scan_bounds(0).0, self.scan_bounds(self.k() - 1).1)
    }
}

/// Serialization schema for grids, including the construction's parameters
/// and the conditional family's textual spec.
///
/// Weights are stored raw (pre-renormalization, summing to
/// `1 - dropped_tail`); `renormalized` records whether a consumer is meant to
/// rescale them to a proper mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub family: String,
    pub delta: f64,
    pub epsilon: f64,
    pub reference_points: Vec<f64>,
    pub margins: Vec<f64>,
    pub weights: Vec<f64>,
    pub dropped_tail: f64,
    pub renormalized: bool,
}

impl GridFile {
    pub fn from_grid(
        grid: &Grid,
        family: impl Into<String>,
        delta: f64,
        epsilon: f64,
        renormalized: bool,
    ) -> GridFile {
        GridFile {
            family: family.into(),
            delta,
            epsilon,
            reference_points: grid.reference_points().to_vec(),
            margins: grid.margins().to_vec(),
            weights: grid.weights().to_vec(),
            dropped_tail: grid.dropped_tail(),
            renormalized,
        }
    }

    /// Validate the payload back into a [`Grid`].
    pub fn to_grid(&self) -> Result<Grid> {
        Grid::new(
            self.reference_points.clone(),
            self.margins.clone(),
            self.weights.clone(),
            self.dropped_tail,
        )
    }
}
