//! TOML configuration: `[order]`, `[polynomial]`, `[domain]`, `[engine]` and
//! an optional `[scan]` section.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::Deserialize;

use gns_core::{BoxDomain, FundamentalDomain, OPoly, Order, OrderElement, Rat, SailDomain, DEFAULT_BITS, DEFAULT_MAX_STATES, DEFAULT_PRECISION_CAP, DEFAULT_Z_CAP};

use crate::error::CliError;

/// Integer that may be written as a TOML integer or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntValue(pub BigInt);

impl<'de> Deserialize<'de> for IntValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(IntValue(BigInt::from(v))),
            Raw::Str(s) => s.trim().parse().map(IntValue).map_err(|_| de::Error::custom(format!("invalid integer {s:?}"))),
        }
    }
}

/// Rational written as an integer or an `"n/d"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatValue(pub Rat);

pub fn parse_rational(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("invalid rational {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("invalid rational {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(n, d))
}

impl<'de> Deserialize<'de> for RatValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(RatValue(Rat::from_integer(v.into()))),
            Raw::Str(s) => parse_rational(&s).map(RatValue).map_err(de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSection {
    /// Minimal polynomial of `θ`, constant term first.
    pub min_poly: Vec<IntValue>,
    pub precision_cap: Option<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSection {
    /// Coefficients `p_0, …, p_n` as coordinate vectors, leading coefficient included.
    pub coeffs: Vec<Vec<IntValue>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// `"box"` or `"sail"`.
    pub family: String,
    pub offsets: Option<Vec<RatValue>>,
    pub omega_re: Option<RatValue>,
    pub omega_im_sq: Option<RatValue>,
    /// `"norm_form"` (default) or `"euclidean"` for sails.
    pub variant: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    pub precision_bits: Option<u32>,
    pub step_cap: Option<usize>,
    pub max_states: Option<u64>,
    pub z_cap: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// `"decide"` or `"dominant"`.
    pub command: String,
    /// One entry per coefficient `p_0, …, p_{n-1}`; each a list of `[lo, hi]`
    /// per coordinate. The leading coefficient is 1.
    pub ranges: Vec<Vec<[i64; 2]>>,
    pub domains: Option<Vec<DomainSection>>,
    pub output: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    order: OrderSection,
    polynomial: Option<PolynomialSection>,
    domain: DomainSection,
    #[serde(default)]
    engine: EngineSection,
    scan: Option<ScanSection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub precision_bits: u32,
    pub step_cap: usize,
    pub max_states: u128,
    pub z_cap: u128,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { precision_bits: DEFAULT_BITS, step_cap: 10_000, max_states: DEFAULT_MAX_STATES, z_cap: DEFAULT_Z_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanCommand {
    Decide,
    Dominant,
}

impl fmt::Display for ScanCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanCommand::Decide => "decide",
            ScanCommand::Dominant => "dominant",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub command: ScanCommand,
    /// Flattened `(lo, hi)` per coordinate, coefficient-major.
    pub ranges: Vec<(i64, i64)>,
    pub degree: usize,
    pub domains: Vec<Arc<dyn FundamentalDomain>>,
    pub output: Option<String>,
}

impl ScanSpec {
    pub fn rows_per_domain(&self) -> u128 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| if hi < lo { 0 } else { (hi - lo + 1) as u128 })
            .product()
    }

    pub fn row_count(&self) -> u128 {
        self.rows_per_domain() * self.domains.len() as u128
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub order: Arc<Order>,
    pub poly: Option<OPoly>,
    pub domain: Arc<dyn FundamentalDomain>,
    pub engine: EngineOptions,
    pub scan: Option<ScanSpec>,
}

impl Config {
    pub fn poly(&self) -> Result<&OPoly, CliError> {
        self.poly.as_ref().ok_or_else(|| CliError::Validation("missing [polynomial] section".into()))
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        CliError::Parse { line, col, msg: e.message().to_string() }
    })?;
    let min_poly: Vec<BigInt> = raw.order.min_poly.iter().map(|v| v.0.clone()).collect();
    let order = Order::with_precision_cap(&min_poly, raw.order.precision_cap.unwrap_or(DEFAULT_PRECISION_CAP))?;
    let k = order.degree();
    let poly = raw.polynomial.map(|p| build_poly(&order, &p)).transpose()?;
    let domain = build_domain(&order, &raw.domain)?;
    let e = raw.engine;
    let d = EngineOptions::default();
    let engine = EngineOptions {
        precision_bits: e.precision_bits.unwrap_or(d.precision_bits),
        step_cap: e.step_cap.unwrap_or(d.step_cap),
        max_states: e.max_states.map_or(d.max_states, u128::from),
        z_cap: e.z_cap.map_or(d.z_cap, u128::from),
    };
    let scan = raw
        .scan
        .map(|s| -> Result<ScanSpec, CliError> {
            let command = match s.command.as_str() {
                "decide" => ScanCommand::Decide,
                "dominant" => ScanCommand::Dominant,
                other => return Err(CliError::Validation(format!("unknown scan command {other:?}"))),
            };
            if s.ranges.is_empty() {
                return Err(CliError::Validation("scan needs at least one coefficient range".into()));
            }
            let mut ranges = Vec::new();
            for c in &s.ranges {
                if c.len() != k {
                    return Err(CliError::Validation(format!("scan range has {} coordinates, expected {k}", c.len())));
                }
                ranges.extend(c.iter().map(|r| (r[0], r[1])));
            }
            let domains = match &s.domains {
                Some(list) => list.iter().map(|d| build_domain(&order, d)).collect::<Result<Vec<_>, _>>()?,
                None => vec![domain.clone()],
            };
            Ok(ScanSpec { command, ranges, degree: s.ranges.len(), domains, output: s.output })
        })
        .transpose()?;
    Ok(Config { order: Arc::new(order), poly, domain, engine, scan })
}

fn build_poly(order: &Order, p: &PolynomialSection) -> Result<OPoly, CliError> {
    let k = order.degree();
    let mut coeffs = Vec::with_capacity(p.coeffs.len());
    for c in &p.coeffs {
        if c.len() != k {
            return Err(CliError::Validation(format!("coefficient has {} coordinates, expected {k}", c.len())));
        }
        coeffs.push(OrderElement::new(c.iter().map(|v| v.0.clone()).collect()));
    }
    let poly = OPoly::new(coeffs);
    if poly.degree().is_none_or(|d| d == 0) || !poly.is_monic() {
        return Err(CliError::Validation("polynomial must be monic of degree >= 1".into()));
    }
    Ok(poly)
}

/// `ω = θ` for an imaginary quadratic minimal polynomial `x² + bx + c`.
fn quadratic_omega(order: &Order) -> Result<(Rat, Rat), CliError> {
    let f = order.min_poly();
    if f.len() != 3 {
        return Err(CliError::Validation("sail domains need a quadratic order".into()));
    }
    let b = Rat::from_integer(f[1].clone());
    let c = Rat::from_integer(f[0].clone());
    let two = Rat::from_integer(2.into());
    let re = -&b / &two;
    let im_sq = c - &b * &b / Rat::from_integer(4.into());
    if !im_sq.is_positive() {
        return Err(CliError::Validation("sail domains need an imaginary quadratic order".into()));
    }
    Ok((re, im_sq))
}

pub fn build_domain(order: &Order, d: &DomainSection) -> Result<Arc<dyn FundamentalDomain>, CliError> {
    let k = order.degree();
    match d.family.as_str() {
        "box" => {
            if d.omega_re.is_some() || d.omega_im_sq.is_some() || d.variant.is_some() {
                return Err(CliError::Validation("box domains take only offsets".into()));
            }
            let offsets: Vec<Rat> = match &d.offsets {
                Some(v) => v.iter().map(|r| r.0.clone()).collect(),
                None => vec![Rat::zero(); k],
            };
            if offsets.len() != k {
                return Err(CliError::Validation(format!("box has {} offsets, expected {k}", offsets.len())));
            }
            Ok(Arc::new(BoxDomain::new(offsets)?))
        }
        "sail" => {
            if d.offsets.is_some() {
                return Err(CliError::Validation("sail domains take no offsets".into()));
            }
            if k != 2 {
                return Err(CliError::Validation("sail domains need a quadratic order".into()));
            }
            match d.variant.as_deref() {
                Some("euclidean") => Ok(Arc::new(SailDomain::euclidean())),
                None | Some("norm_form") => {
                    let (re, im_sq) = match (&d.omega_re, &d.omega_im_sq) {
                        (Some(a), Some(b)) => (a.0.clone(), b.0.clone()),
                        (None, None) => quadratic_omega(order)?,
                        _ => return Err(CliError::Validation("give both omega_re and omega_im_sq or neither".into())),
                    };
                    Ok(Arc::new(SailDomain::norm_form(re, im_sq)?))
                }
                Some(v) => Err(CliError::Validation(format!("unknown sail variant {v:?}"))),
            }
        }
        other => Err(CliError::Validation(format!("unknown domain family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[order]\nmin_poly = [-1, 1]\n[polynomial]\ncoeffs = [[2], [1]]\n[domain]\nfamily = \"box\"\noffsets = [0]\n";

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.order.degree(), 1);
        assert_eq!(c.poly.unwrap(), OPoly::from_ints(&[2, 1]));
        assert_eq!(c.domain.describe(), "box[0,1)");
        assert_eq!(c.engine, EngineOptions::default());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/2").unwrap(), Rat::new((-1).into(), 2.into()));
        assert_eq!(parse_rational(" 3 ").unwrap(), Rat::from_integer(3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/2").is_err());
        let text = MINIMAL.replace("offsets = [0]", "offsets = [\"1/0\"]");
        match parse_config(&text).unwrap_err() {
            CliError::Parse { line, .. } => assert_eq!(line, 7),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn strictness() {
        let unknown = format!("{MINIMAL}colour = 3\n");
        assert!(matches!(parse_config(&unknown), Err(CliError::Parse { .. })));
        let non_monic = MINIMAL.replace("[[2], [1]]", "[[2], [3]]");
        assert!(matches!(parse_config(&non_monic), Err(CliError::Validation(_))));
        let dims = MINIMAL.replace("[[2], [1]]", "[[2, 0], [1, 0]]");
        assert!(matches!(parse_config(&dims), Err(CliError::Validation(_))));
    }

    #[test]
    fn gaussian_domains() {
        let base = "[order]\nmin_poly = [1, 0, 1]\n[polynomial]\ncoeffs = [[1, 1], [1, 0]]\n";
        let square = format!("{base}[domain]\nfamily = \"box\"\noffsets = [0, 0]\n");
        assert_eq!(parse_config(&square).unwrap().domain.describe(), "box[0,1)x[0,1)");
        let sail = format!("{base}[domain]\nfamily = \"sail\"\n");
        assert_eq!(parse_config(&sail).unwrap().domain.describe(), "sail(re=0,im2=1)");
        let half = format!("{base}[domain]\nfamily = \"box\"\noffsets = [\"-1/2\", \"-1/2\"]\n");
        assert_eq!(parse_config(&half).unwrap().domain.describe(), "box[-1/2,1/2)x[-1/2,1/2)");
    }
}
