//! Divergence-bounded finite mixture approximations of continuous mixtures.
//!
//! Many marginal distributions arise as continuous mixtures
//! `p(y) = ∫ p(y|x) p(x) dx` — a conditional family `p(y|x)` averaged over a
//! mixing distribution `p(x)`. Such marginals rarely have closed forms and are
//! expensive to evaluate. This crate replaces the continuous mixture with a
//! finite one,
//!
//! ```text
//! q(y) = Σᵢ πᵢ p(y|x̃ᵢ),    i = 1..k,
//! ```
//!
//! built so that the symmetrized Kullback-Leibler divergence between `p` and
//! `q` is guaranteed not to exceed a user-chosen ceiling `δ`. The construction
//! (DIRECT: divergence restricting conditional tessellation) partitions the
//! latent domain into bins, each represented by one reference point, such that
//! no point of a bin is farther than `δ` from its reference in symmetrized
//! divergence. The chain rule for relative entropy then bounds the marginal
//! divergence by the worst per-bin divergence, up to a latent tail of
//! probability at most `ε` that the construction may ignore.
//!
//! # Modules
//!
//! | module | contents |
//! |---|---|
//! | [`distributions`] | the [`Distribution`] contract and the built-in families |
//! | [`divergence`] | closed-form normal divergences and adaptive numeric KL |
//! | [`direct`] | the bin construction: sequential and location-family paths |
//! | [`mixture`] | finite mixtures with log-sum-exp densities |
//! | [`convolution`] | sums of independent variables as shifted-family mixtures |
//! | [`verification`] | per-bin certificates, Q-Q reports, chain-rule checks |
//!
//! # Example
//!
//! Approximate a Student-t distribution (a scale mixture of normals over a
//! chi-squared mixing distribution) by a finite normal mixture:
//!
//! ```
//! use klmix::{direct_sequential, ChiSquared, DirectConfig, FiniteMixture, NormalScaleFamily};
//!
//! let family = NormalScaleFamily::new(5.0).unwrap();
//! let mixing = ChiSquared::new(5.0).unwrap();
//! let config = DirectConfig::new(0.01);
//! let grid = direct_sequential(&family, &mixing, &config).unwrap();
//! let approx = FiniteMixture::from_grid(&grid, &family, true).unwrap();
//! assert!(grid.k() >= 18 && grid.k() <= 20);
//! ```

pub mod convolution;
pub mod direct;
pub mod distributions;
pub mod divergence;
pub mod mixture;
mod quad;
pub mod special;
pub mod verification;

pub use convolution::{convolve, Convolution, MixedOn, Role};
pub use direct::{
    advance_to_delta, bin_weights, direct_location, direct_sequential, ConditionalFamily,
    Crossing, DirectConfig, Grid, GridFile, MapFamily, NormalLocationFamily, NormalScaleFamily,
    ShiftFamily,
};
pub use distributions::{
    ChiSquared, Distribution, DynDistribution, Logistic, Normal, Shifted, SkewNormal, StudentT,
    Support,
};
pub use divergence::{kl_normal, kl_numeric, sym_kl_normal, sym_kl_numeric, QuadratureSettings};
pub use mixture::FiniteMixture;
pub use verification::{
    certify_bins, chain_rule_check, marginal_divergence, qq_compare, BinCertificate,
    Certification, ChainRuleCheck, JointTable, QQReport, QQRow,
};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution or configuration parameter is outside its legal range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A probability argument was outside the open interval (0, 1).
    #[error("probability must lie strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),
    /// Adaptive quadrature hit its subdivision budget before the error
    /// estimate dropped below tolerance.
    #[error(
        "quadrature did not converge within {max_subdivisions} subdivisions \
         (error estimate {error:.3e})"
    )]
    QuadratureNonConvergence { max_subdivisions: usize, error: f64 },
    /// The second density vanishes on a set where the first carries mass, so
    /// the divergence is infinite.
    #[error("support mismatch: q vanishes at y = {at} where p has density {p_density:.6e}")]
    SupportMismatch { at: f64, p_density: f64 },
    /// The divergence evaluated to a non-finite value before any crossing was
    /// bracketed.
    #[error("divergence is non-finite at x = {at}")]
    NonFiniteDivergence { at: f64 },
    /// Bracketing walked `expansions` steps from the anchor without ever
    /// seeing the divergence reach the target.
    #[error(
        "no divergence crossing of {delta} bracketed after {expansions} \
         expansions from anchor {anchor}"
    )]
    BracketFailure {
        anchor: f64,
        delta: f64,
        expansions: usize,
    },
    /// The divergence jumps past `delta` immediately to the right of the
    /// anchor, leaving a zero-width bin.
    #[error("degenerate crossing at anchor {anchor}: divergence jumps past {delta}")]
    DegenerateCrossing { anchor: f64, delta: f64 },
    /// The requested start point already carries more left-tail mass than the
    /// whole ignorable budget `epsilon`.
    #[error("invalid start: P(X <= start) = {eps1} exceeds epsilon = {epsilon}")]
    InvalidStart { eps1: f64, epsilon: f64 },
    /// The sequential construction exceeded its component budget; `epsilon`
    /// is too small for the problem (or zero on an unbounded domain).
    #[error("component budget exhausted: more than {max} bins required")]
    ComponentBudget { max: usize },
    /// Margins must be strictly increasing.
    #[error("margins must be strictly increasing at index {index} (value {value})")]
    NonMonotoneMargins { index: usize, value: f64 },
    /// A structurally invalid grid (empty, interleaving violated, bad weights).
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    /// Mixture construction received inconsistent components/weights.
    #[error("invalid mixture: {0}")]
    InvalidMixture(&'static str),
    /// A discrete joint table is malformed or the two tables disagree on
    /// where probability can live.
    #[error("invalid joint table: {0}")]
    InvalidTable(&'static str),
    /// A verification input was empty or out of range.
    #[error("invalid verification input: {0}")]
    InvalidVerification(&'static str),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
