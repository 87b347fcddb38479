//! Independent checks of constructed grids and mixtures.
//!
//! * [`certify_bins`] rescans a grid bin by bin and measures the divergence
//!   between each latent point and its bin reference, confirming the per-bin
//!   ceiling really holds.
//! * [`marginal_divergence`] turns a certification into an upper bound on
//!   the divergence between the continuous and the discretized marginal
//!   (mass-weighted average of per-bin maxima, by joint convexity).
//! * [`qq_compare`] lines computed quantiles up against Monte Carlo order
//!   statistics with standard-error-based tolerances.
//! * [`chain_rule_check`] validates the discrete divergence bookkeeping:
//!   joint relative entropy must equal marginal plus expected conditional.

use crate::direct::{ConditionalFamily, Grid};
use crate::distributions::{check_probability, Distribution};
use crate::divergence::QuadratureSettings;
use crate::{Error, Result};
use std::io::Write;

/// Scan result for one bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinCertificate {
    pub index: usize,
    /// The bin's reference point.
    pub reference: f64,
    /// Largest divergence found between a scanned point and the reference.
    pub max_divergence: f64,
    /// The scanned point attaining it.
    pub argmax: f64,
}

/// Outcome of a full grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    /// The ceiling the grid was scanned against.
    pub delta: f64,
    pub bins: Vec<BinCertificate>,
    /// Largest divergence across all bins.
    pub max_divergence: f64,
    /// True when `max_divergence <= delta * (1 + 1e-3)` (slack for the
    /// crossing search's own tolerance).
    pub passed: bool,
}

/// Rescan every bin of `grid` with `points_per_bin` evenly spaced latent
/// points and measure the divergence to the bin reference.
///
/// Scans cover each bin's certified interval (outer tails are budgeted by
/// epsilon, not by the divergence ceiling, and are not scanned).
pub fn certify_bins<F: ConditionalFamily>(
    family: &F,
    grid: &Grid,
    delta: f64,
    points_per_bin: usize,
    quad: &QuadratureSettings,
) -> Result<Certification> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be finite and > 0",
        });
    }
    if points_per_bin < 2 {
        return Err(Error::InvalidVerification(
            "need at least two scan points per bin",
        ));
    }
    let mut bins = Vec::with_capacity(grid.k());
    let mut overall = 0.0f64;
    for i in 0..grid.k() {
        let reference = grid.reference_points()[i];
        let (lo, hi) = grid.scan_bounds(i);
        let mut max_divergence = 0.0f64;
        let mut argmax = reference;
        let n = if hi > lo { points_per_bin } else { 1 };
        for j in 0..n {
            let x = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * j as f64 / (n - 1) as f64
            };
            let d = family.divergence(reference, x, quad)?;
            if !d.is_finite() {
                return Err(Error::NonFiniteDivergence { at: x });
            }
            if d > max_divergence {
                max_divergence = d;
                argmax = x;
            }
        }
        overall = overall.max(max_divergence);
        bins.push(BinCertificate {
            index: i,
            reference,
            max_divergence,
            argmax,
        });
    }
    Ok(Certification {
        delta,
        bins,
        max_divergence: overall,
        passed: overall <= delta * (1.0 + 1e-3),
    })
}

/// Upper bound on the divergence between the continuous marginal and the
/// discretized mixture implied by a certification: the mass-weighted average
/// of per-bin divergence maxima (relative entropy is jointly convex, so a
/// mixture of per-bin bounds bounds the mixture).
pub fn marginal_divergence(certification: &Certification, grid: &Grid) -> Result<f64> {
    if certification.bins.len() != grid.k() {
        return Err(Error::InvalidVerification(
            "certification does not match the grid's bin count",
        ));
    }
    let mut acc = 0.0;
    let mut total = 0.0;
    for (cert, w) in certification.bins.iter().zip(grid.weights()) {
        acc += w * cert.max_divergence;
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::InvalidVerification("grid carries no weight"));
    }
    Ok(acc / total)
}

/// One quantile-level comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct QQRow {
    pub level: f64,
    /// Quantile of the distribution under test.
    pub computed: f64,
    /// Monte Carlo order statistic at the same level.
    pub reference: f64,
    /// `computed - reference`.
    pub diff: f64,
    /// Acceptance half-width: multiplier times the asymptotic standard error
    /// of the order statistic, `sqrt(p(1-p)/n) / pdf(computed)`.
    pub tolerance: f64,
    pub within: bool,
}

/// Quantile-quantile comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct QQReport {
    pub rows: Vec<QQRow>,
    /// True when every level stayed within tolerance.
    pub passed: bool,
}

impl QQReport {
    /// Write the report as CSV (header plus one line per level).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "level,computed,reference,diff,tolerance,within")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.level, r.computed, r.reference, r.diff, r.tolerance, r.within
            )?;
        }
        Ok(())
    }
}

/// Compare quantiles of `dist` against empirical order statistics of
/// `samples` at the given levels.
///
/// The reference at level `p` is the `ceil(p * n)`-th smallest sample; the
/// tolerance is `se_multiplier` asymptotic standard errors, with the density
/// evaluated at the computed quantile.
pub fn qq_compare<D>(
    dist: &D,
    samples: &[f64],
    levels: &[f64],
    se_multiplier: f64,
) -> Result<QQReport>
where
    D: Distribution + ?Sized,
{
    if samples.is_empty() {
        return Err(Error::InvalidVerification("no reference samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidVerification("non-finite reference sample"));
    }
    if levels.is_empty() {
        return Err(Error::InvalidVerification("no quantile levels"));
    }
    if !(se_multiplier > 0.0 && se_multiplier.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "se_multiplier",
            value: se_multiplier,
            reason: "must be finite and > 0",
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len();

    let mut rows = Vec::with_capacity(levels.len());
    for &p in levels {
        check_probability(p)?;
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        let reference = sorted[idx];
        let computed = dist.quantile(p)?;
        let pdf = dist.pdf(computed);
        let se = (p * (1.0 - p) / n as f64).sqrt() / pdf;
        if !se.is_finite() || !(pdf > 0.0) {
            return Err(Error::InvalidVerification(
                "density vanishes at a compared quantile",
            ));
        }
        let tolerance = se_multiplier * se;
        let diff = computed - reference;
        rows.push(QQRow {
            level: p,
            computed,
            reference,
            diff,
            tolerance,
            within: diff.abs() <= tolerance,
        });
    }
    let passed = rows.iter().all(|r| r.within);
    Ok(QQReport { rows, passed })
}

/// A discrete joint probability table (rows index the first variable).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    p: Vec<Vec<f64>>,
    cols: usize,
}

impl JointTable {
    /// Validate a rectangular table of non-negative entries summing to one.
    pub fn new(p: Vec<Vec<f64>>) -> Result<JointTable> {
        if p.is_empty() || p[0].is_empty() {
            return Err(Error::InvalidTable("table must be non-empty"));
        }
        let cols = p[0].len();
        let mut total = 0.0;
        for row in &p {
            if row.len() != cols {
                return Err(Error::InvalidTable("table must be rectangular"));
            }
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidTable(
                        "entries must be finite and non-negative",
                    ));
                }
                total += v;
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTable("entries must sum to one"));
        }
        Ok(JointTable { p, cols })
    }

    pub fn n_rows(&self) -> usize {
        self.p.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    /// Marginal distribution of the row variable.
    pub fn row_marginals(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }
}

/// Decomposition of a discrete joint relative entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRuleCheck {
    /// `KL(p(x, y) || q(x, y))`.
    pub joint: f64,
    /// `KL(p(x) || q(x))` over the row marginals.
    pub marginal: f64,
    /// `E_p(x)[ KL(p(y|x) || q(y|x)) ]`.
    pub conditional: f64,
    /// `joint - (marginal + conditional)`; zero up to rounding.
    pub defect: f64,
}

/// Evaluate both sides of the chain rule for relative entropy on a pair of
/// joint tables. Errors if `q` assigns zero probability anywhere `p` has
/// mass (the divergence would be infinite).
pub fn chain_rule_check(p: &JointTable, q: &JointTable) -> Result<ChainRuleCheck> {
    if p.n_rows() != q.n_rows() || p.n_cols() != q.n_cols() {
        return Err(Error::InvalidTable("tables must have matching shape"));
    }
    let kl_term = |pv: f64, qv: f64| -> Result<f64> {
        if pv == 0.0 {
            Ok(0.0)
        } else if qv == 0.0 {
            Err(Error::InvalidTable(
                "approximation has zero probability where the target has mass",
            ))
        } else {
            Ok(pv * (pv / qv).ln())
        }
    };

    let mut joint = 0.0;
    for i in 0..p.n_rows() {
        for j in 0..p.n_cols() {
            joint += kl_term(p.prob(i, j), q.prob(i, j))?;
        }
    }

    let pa = p.row_marginals();
    let qa = q.row_marginals();
    let mut marginal = 0.0;
    for (&a, &b) in pa.iter().zip(&qa) {
        marginal += kl_term(a, b)?;
    }

    let mut conditional = 0.0;
    for i in 0..p.n_rows() {
        if pa[i] == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for j in 0..p.n_cols() {
            inner += kl_term(p.prob(i, j) / pa[i], q.prob(i, j) / qa[i])?;
        }
        conditional += pa[i] * inner;
    }

    let defect = joint - (marginal + conditional);
    Ok(ChainRuleCheck {
        joint,
        marginal,
        conditional,
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::{
        direct_location, direct_sequential, DirectConfig, NormalLocationFamily, NormalScaleFamily,
    };
    use crate::distributions::{ChiSquared, Normal};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn certification_confirms_sequential_grid() {
        let fam = NormalScaleFamily::new(5.0).unwrap();
        let mixing = ChiSquared::new(5.0).unwrap();
        let config = DirectConfig::new(0.01);
        let grid = direct_sequential(&fam, &mixing, &config).unwrap();
        let quad = QuadratureSettings::default();

        let cert = certify_bins(&fam, &grid, 0.01, 64, &quad).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.bins.len(), grid.k());
        // Bin edges sit right at the ceiling, so the scan maximum does too.
        assert!(cert.max_divergence <= 0.01 * (1.0 + 1e-3));
        assert!(cert.max_divergence >= 0.0099, "{}", cert.max_divergence);
        for b in &cert.bins {
            assert!(b.max_divergence <= 0.01 * (1.0 + 1e-3), "bin {}", b.index);
        }

        // The aggregated marginal bound averages the per-bin maxima.
        let bound = marginal_divergence(&cert, &grid).unwrap();
        assert!(bound <= cert.max_divergence);
        assert!(bound >= 0.009, "{bound}");

        // The same grid cannot be certified against a tighter ceiling.
        let tight = certify_bins(&fam, &grid, 0.005, 64, &quad).unwrap();
        assert!(!tight.passed);
    }

    #[test]
    fn certification_confirms_location_grid() {
        let fam = NormalLocationFamily::new(1.0).unwrap();
        let mixing = Normal::standard();
        let grid = direct_location(&fam, &mixing, &DirectConfig::new(0.01)).unwrap();
        let cert = certify_bins(&fam, &grid, 0.01, 33, &QuadratureSettings::default()).unwrap();
        assert!(cert.passed);
        // Even layout rounds the bin count up, leaving slack below delta.
        assert!(cert.max_divergence < 0.01);
        let bound = marginal_divergence(&cert, &grid).unwrap();
        assert!(bound <= cert.max_divergence);
    }

    #[test]
    fn certification_rejects_bad_arguments() {
        let fam = NormalLocationFamily::new(1.0).unwrap();
        let mixing = Normal::standard();
        let grid = direct_location(&fam, &mixing, &DirectConfig::new(0.01)).unwrap();
        let quad = QuadratureSettings::default();
        assert!(certify_bins(&fam, &grid, 0.0, 16, &quad).is_err());
        assert!(certify_bins(&fam, &grid, 0.01, 1, &quad).is_err());

        let other = direct_location(&fam, &mixing, &DirectConfig::new(0.04)).unwrap();
        let cert = certify_bins(&fam, &other, 0.04, 16, &quad).unwrap();
        assert!(matches!(
            marginal_divergence(&cert, &grid),
            Err(Error::InvalidVerification(_))
        ));
    }

    #[test]
    fn qq_accepts_the_sampled_distribution() {
        let dist = Normal::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples = dist.sample(100_000, &mut rng);
        let levels = [0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999];
        let report = qq_compare(&dist, &samples, &levels, 4.0).unwrap();
        assert_eq!(report.rows.len(), levels.len());
        assert!(report.passed, "rows: {:#?}", report.rows);
        for row in &report.rows {
            assert!(row.tolerance > 0.0);
            assert_abs_diff_eq!(row.diff, row.computed - row.reference, epsilon = 0.0);
        }
    }

    #[test]
    fn qq_flags_a_shifted_distribution() {
        let sampled = Normal::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let samples = sampled.sample(100_000, &mut rng);
        let shifted = Normal::new(0.5, 1.0).unwrap();
        let report = qq_compare(&shifted, &samples, &[0.25, 0.5, 0.75], 4.0).unwrap();
        assert!(!report.passed);
        assert!(report.rows.iter().all(|r| !r.within));
    }

    #[test]
    fn qq_rejects_bad_inputs() {
        let dist = Normal::standard();
        let samples = [0.1, -0.3, 0.7];
        assert!(qq_compare(&dist, &[], &[0.5], 3.0).is_err());
        assert!(qq_compare(&dist, &[f64::NAN], &[0.5], 3.0).is_err());
        assert!(qq_compare(&dist, &samples, &[], 3.0).is_err());
        assert!(qq_compare(&dist, &samples, &[0.0], 3.0).is_err());
        assert!(qq_compare(&dist, &samples, &[1.5], 3.0).is_err());
        assert!(qq_compare(&dist, &samples, &[0.5], 0.0).is_err());
    }

    #[test]
    fn qq_csv_has_header_and_rows() {
        let dist = Normal::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let samples = dist.sample(10_000, &mut rng);
        let report = qq_compare(&dist, &samples, &[0.25, 0.5, 0.75], 5.0).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "level,computed,reference,diff,tolerance,within");
        assert!(lines[1].starts_with("0.25,"));
    }

    #[test]
    fn joint_table_validation() {
        assert!(JointTable::new(vec![]).is_err());
        assert!(JointTable::new(vec![vec![]]).is_err());
        assert!(JointTable::new(vec![vec![0.5, 0.5], vec![0.5]]).is_err());
        assert!(JointTable::new(vec![vec![0.5, -0.1], vec![0.3, 0.3]]).is_err());
        assert!(JointTable::new(vec![vec![0.5, 0.2], vec![0.2, 0.2]]).is_err());
        let t = JointTable::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.n_cols(), 2);
        let m = t.row_marginals();
        assert_abs_diff_eq!(m[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn chain_rule_holds_on_a_fixed_pair() {
        let p = JointTable::new(vec![
            vec![0.10, 0.05, 0.15],
            vec![0.20, 0.02, 0.08],
            vec![0.05, 0.25, 0.10],
        ])
        .unwrap();
        let q = JointTable::new(vec![
            vec![0.10, 0.05, 0.10],
            vec![0.15, 0.10, 0.10],
            vec![0.10, 0.20, 0.10],
        ])
        .unwrap();
        let check = chain_rule_check(&p, &q).unwrap();
        assert!(check.joint > 0.0);
        // Row marginals differ (0.30/0.30/0.40 vs 0.25/0.35/0.40).
        assert!(check.marginal > 0.0);
        assert!(check.conditional >= 0.0);
        assert!(check.defect.abs() <= 1e-13, "defect = {}", check.defect);

        let same = chain_rule_check(&p, &p).unwrap();
        assert_abs_diff_eq!(same.joint, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(same.marginal, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(same.conditional, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn chain_rule_detects_support_and_shape_mismatch() {
        let p = JointTable::new(vec![vec![0.5, 0.5]]).unwrap();
        let q = JointTable::new(vec![vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            chain_rule_check(&p, &q),
            Err(Error::InvalidTable(_))
        ));
        // Zero mass in p where q has mass is fine in this direction.
        assert!(chain_rule_check(&q, &p).is_ok());

        let wide = JointTable::new(vec![vec![0.25, 0.25, 0.5]]).unwrap();
        assert!(chain_rule_check(&p, &wide).is_err());
    }

    #[test]
    fn chain_rule_skips_empty_rows() {
        let p = JointTable::new(vec![vec![0.0, 0.0], vec![0.6, 0.4]]).unwrap();
        let q = JointTable::new(vec![vec![0.1, 0.1], vec![0.5, 0.3]]).unwrap();
        let check = chain_rule_check(&p, &q).unwrap();
        assert!(check.defect.abs() <= 1e-13);
        assert!(check.joint > 0.0);
    }
}
