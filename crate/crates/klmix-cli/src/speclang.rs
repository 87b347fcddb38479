//! Text specs for distributions and conditional families.
//!
//! Distributions: `normal(mu,sigma)`, `chisq(nu)`, `t(nu)`,
//! `logistic(loc,scale)`, `skewnormal(xi,omega,alpha)`.
//!
//! Conditional families (the `family` field of grid files):
//! `normal-scale(nu)`, `normal-location(sigma)`, `shift(<distribution>)`.
//!
//! Specs rendered by [`std::fmt::Display`] parse back to the same value, and
//! numeric parameters survive the round trip bit-for-bit.

use std::fmt;
use std::sync::Arc;

use klmix::{
    certify_bins, Certification, ChiSquared, Distribution, DynDistribution, FiniteMixture, Grid,
    Logistic, Normal, NormalLocationFamily, NormalScaleFamily, QuadratureSettings, ShiftFamily,
    SkewNormal, StudentT,
};

/// A parsed distribution expression.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Normal { mu: f64, sigma: f64 },
    ChiSquared { nu: f64 },
    StudentT { nu: f64 },
    Logistic { loc: f64, scale: f64 },
    SkewNormal { xi: f64, omega: f64, alpha: f64 },
}

/// A parsed conditional-family expression.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    NormalScale { nu: f64 },
    NormalLocation { sigma: f64 },
    Shift(DistSpec),
}

/// A family spec instantiated into a concrete conditional family.
pub enum BuiltFamily {
    NormalScale(NormalScaleFamily),
    NormalLocation(NormalLocationFamily),
    Shift(ShiftFamily<DynDistribution>),
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
            DistSpec::ChiSquared { nu } => write!(f, "chisq({nu})"),
            DistSpec::StudentT { nu } => write!(f, "t({nu})"),
            DistSpec::Logistic { loc, scale } => write!(f, "logistic({loc},{scale})"),
            DistSpec::SkewNormal { xi, omega, alpha } => {
                write!(f, "skewnormal({xi},{omega},{alpha})")
            }
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::NormalScale { nu } => write!(f, "normal-scale({nu})"),
            FamilySpec::NormalLocation { sigma } => write!(f, "normal-location({sigma})"),
            FamilySpec::Shift(dist) => write!(f, "shift({dist})"),
        }
    }
}

impl DistSpec {
    /// Instantiate the distribution, validating parameters.
    pub fn build(&self) -> Result<DynDistribution, String> {
        let err = |e: klmix::Error| e.to_string();
        Ok(match *self {
            DistSpec::Normal { mu, sigma } => Arc::new(Normal::new(mu, sigma).map_err(err)?),
            DistSpec::ChiSquared { nu } => Arc::new(ChiSquared::new(nu).map_err(err)?),
            DistSpec::StudentT { nu } => Arc::new(StudentT::new(nu).map_err(err)?),
            DistSpec::Logistic { loc, scale } => Arc::new(Logistic::new(loc, scale).map_err(err)?),
            DistSpec::SkewNormal { xi, omega, alpha } => {
                Arc::new(SkewNormal::new(xi, omega, alpha).map_err(err)?)
            }
        })
    }
}

impl FamilySpec {
    /// Instantiate the conditional family, validating parameters.
    pub fn build(&self) -> Result<BuiltFamily, String> {
        let err = |e: klmix::Error| e.to_string();
        Ok(match self {
            FamilySpec::NormalScale { nu } => {
                BuiltFamily::NormalScale(NormalScaleFamily::new(*nu).map_err(err)?)
            }
            FamilySpec::NormalLocation { sigma } => {
                BuiltFamily::NormalLocation(NormalLocationFamily::new(*sigma).map_err(err)?)
            }
            FamilySpec::Shift(dist) => BuiltFamily::Shift(ShiftFamily::new(dist.build()?)),
        })
    }
}

impl BuiltFamily {
    /// The finite mixture a grid stands for under this family, type-erased.
    pub fn mixture(&self, grid: &Grid, renormalize: bool) -> klmix::Result<Box<dyn Distribution>> {
        Ok(match self {
            BuiltFamily::NormalScale(f) => Box::new(FiniteMixture::from_grid(grid, f, renormalize)?),
            BuiltFamily::NormalLocation(f) => {
                Box::new(FiniteMixture::from_grid(grid, f, renormalize)?)
            }
            BuiltFamily::Shift(f) => Box::new(FiniteMixture::from_grid(grid, f, renormalize)?),
        })
    }

    /// Rescan a grid's bins against `delta` under this family.
    pub fn certify(
        &self,
        grid: &Grid,
        delta: f64,
        points_per_bin: usize,
        quad: &QuadratureSettings,
    ) -> klmix::Result<Certification> {
        match self {
            BuiltFamily::NormalScale(f) => certify_bins(f, grid, delta, points_per_bin, quad),
            BuiltFamily::NormalLocation(f) => certify_bins(f, grid, delta, points_per_bin, quad),
            BuiltFamily::Shift(f) => certify_bins(f, grid, delta, points_per_bin, quad),
        }
    }
}

/// Parse a distribution spec such as `normal(0,1)`.
pub fn parse_distribution(src: &str) -> Result<DistSpec, String> {
    let mut cur = Cursor::new(src);
    let spec = cur.distribution()?;
    cur.finish()?;
    Ok(spec)
}

/// Parse a family spec such as `shift(logistic(0,1))`.
pub fn parse_family(src: &str) -> Result<FamilySpec, String> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    let start = cur.pos;
    let name = cur.ident()?;
    let spec = match name.as_str() {
        "normal-scale" => {
            let args = cur.numbers(&name, &["nu"])?;
            FamilySpec::NormalScale { nu: args[0] }
        }
        "normal-location" => {
            let args = cur.numbers(&name, &["sigma"])?;
            FamilySpec::NormalLocation { sigma: args[0] }
        }
        "shift" => {
            cur.expect('(')?;
            let inner = cur.distribution()?;
            cur.expect(')')?;
            FamilySpec::Shift(inner)
        }
        other => {
            return Err(format!(
                "unknown family '{other}' at byte {start}; expected normal-scale, \
                 normal-location, or shift"
            ))
        }
    };
    cur.finish()?;
    Ok(spec)
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), String> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(format!("expected '{want}' at byte {}, found '{c}'", self.pos)),
            None => Err(format!("expected '{want}' at byte {}, found end of input", self.pos)),
        }
    }

    /// An identifier: letters, digits, `_`, `-` (must start with a letter).
    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(format!("expected a name at byte {start}"));
        }
        Ok(self.src[start..self.pos].to_ascii_lowercase())
    }

    /// `(` n₁ `,` n₂ … `)` with exactly `params.len()` numbers.
    fn numbers(&mut self, name: &str, params: &[&str]) -> Result<Vec<f64>, String> {
        self.expect('(')?;
        let mut out = Vec::with_capacity(params.len());
        for (i, param) in params.iter().enumerate() {
            if i > 0 {
                self.expect(',')?;
            }
            out.push(self.number(name, param)?);
        }
        self.skip_ws();
        if self.peek() == Some(',') {
            return Err(format!(
                "{name} takes {} parameter(s) ({}), got more",
                params.len(),
                params.join(",")
            ));
        }
        self.expect(')')?;
        Ok(out)
    }

    /// A floating-point literal, delimited by `,`, `)`, or end of input.
    fn number(&mut self, name: &str, param: &str) -> Result<f64, String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ',' || c == ')' || c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(format!("{name}: missing value for {param} at byte {start}"));
        }
        text.parse::<f64>()
            .map_err(|_| format!("{name}: invalid number '{text}' for {param} at byte {start}"))
    }

    fn distribution(&mut self) -> Result<DistSpec, String> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident()?;
        Ok(match name.as_str() {
            "normal" => {
                let a = self.numbers(&name, &["mu", "sigma"])?;
                DistSpec::Normal { mu: a[0], sigma: a[1] }
            }
            "chisq" => {
                let a = self.numbers(&name, &["nu"])?;
                DistSpec::ChiSquared { nu: a[0] }
            }
            "t" => {
                let a = self.numbers(&name, &["nu"])?;
                DistSpec::StudentT { nu: a[0] }
            }
            "logistic" => {
                let a = self.numbers(&name, &["loc", "scale"])?;
                DistSpec::Logistic { loc: a[0], scale: a[1] }
            }
            "skewnormal" => {
                let a = self.numbers(&name, &["xi", "omega", "alpha"])?;
                DistSpec::SkewNormal { xi: a[0], omega: a[1], alpha: a[2] }
            }
            other => {
                return Err(format!(
                    "unknown distribution '{other}' at byte {start}; expected normal, chisq, t, \
                     logistic, or skewnormal"
                ))
            }
        })
    }

    fn finish(&mut self) -> Result<(), String> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(format!(
                "unexpected trailing input at byte {}: '{}'",
                self.pos,
                &self.src[self.pos..]
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_distribution() {
        assert_eq!(
            parse_distribution("normal(0,1)").unwrap(),
            DistSpec::Normal { mu: 0.0, sigma: 1.0 }
        );
        assert_eq!(parse_distribution("chisq(5)").unwrap(), DistSpec::ChiSquared { nu: 5.0 });
        assert_eq!(parse_distribution("t(5)").unwrap(), DistSpec::StudentT { nu: 5.0 });
        assert_eq!(
            parse_distribution("logistic(0,1)").unwrap(),
            DistSpec::Logistic { loc: 0.0, scale: 1.0 }
        );
        assert_eq!(
            parse_distribution("skewnormal(0,1,4)").unwrap(),
            DistSpec::SkewNormal { xi: 0.0, omega: 1.0, alpha: 4.0 }
        );
    }

    #[test]
    fn tolerates_whitespace_and_case() {
        assert_eq!(
            parse_distribution("  Normal ( -1.5 , 2e-1 ) ").unwrap(),
            DistSpec::Normal { mu: -1.5, sigma: 0.2 }
        );
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "normal(-1.5,0.2)",
            "chisq(5)",
            "t(2.5)",
            "logistic(0,1)",
            "skewnormal(0.25,1.75,-4)",
        ] {
            let spec = parse_distribution(src).unwrap();
            assert_eq!(spec.to_string(), src);
            assert_eq!(parse_distribution(&spec.to_string()).unwrap(), spec);
        }
        for src in ["normal-scale(5)", "normal-location(1.25)", "shift(logistic(0,1))"] {
            let spec = parse_family(src).unwrap();
            assert_eq!(spec.to_string(), src);
            assert_eq!(parse_family(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn display_preserves_full_precision() {
        let spec = DistSpec::Normal { mu: 0.1 + 0.2, sigma: 1.0 / 3.0 };
        let reparsed = parse_distribution(&spec.to_string()).unwrap();
        assert_eq!(reparsed, spec);
    }

    #[test]
    fn rejects_unknown_names() {
        let err = parse_distribution("gamma(1,1)").unwrap_err();
        assert!(err.contains("unknown distribution 'gamma'"), "{err}");
        let err = parse_family("scale(1)").unwrap_err();
        assert!(err.contains("unknown family 'scale'"), "{err}");
    }

    #[test]
    fn rejects_wrong_arity() {
        let err = parse_distribution("normal(1)").unwrap_err();
        assert!(err.contains("expected ','"), "{err}");
        let err = parse_distribution("normal(1,2,3)").unwrap_err();
        assert!(err.contains("takes 2 parameter(s)"), "{err}");
    }

    #[test]
    fn rejects_bad_numbers_and_trailing_garbage() {
        let err = parse_distribution("normal(a,1)").unwrap_err();
        assert!(err.contains("invalid number 'a' for mu"), "{err}");
        let err = parse_distribution("normal(0,1) extra").unwrap_err();
        assert!(err.contains("trailing input"), "{err}");
    }

    #[test]
    fn shift_nests_a_distribution() {
        let spec = parse_family("shift( skewnormal(0, 1, 4) )").unwrap();
        assert_eq!(
            spec,
            FamilySpec::Shift(DistSpec::SkewNormal { xi: 0.0, omega: 1.0, alpha: 4.0 })
        );
    }

    #[test]
    fn build_validates_parameters() {
        assert!(parse_distribution("normal(0,-1)").unwrap().build().is_err());
        assert!(parse_distribution("normal(0,1)").unwrap().build().is_ok());
        assert!(parse_family("normal-scale(-5)").unwrap().build().is_err());
        assert!(parse_family("shift(logistic(0,0))").unwrap().build().is_err());
    }
}
