//! JSON system specifications.

use std::fmt;
use std::str::FromStr;

use halfmap::{LienardParams, PwlSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;

/// Malformed or inadmissible input; maps to exit code 2.
#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid spec: {}", self.0)
    }
}

impl std::error::Error for SpecError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

/// A number given as a JSON number, or as a string holding a decimal or `p/q`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(n);
    if shift >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -q } else { q })
}

impl Number {
    /// The exact value. JSON floats convert exactly from their binary value.
    pub fn rational(&self) -> Result<BigRational, SpecError> {
        match self {
            Number::Float(x) => BigRational::from_float(*x)
                .map_or_else(|| bad(format!("{x} is not a finite number")), Ok),
            Number::Text(s) => {
                let s = s.trim();
                if let Some((p, q)) = s.split_once('/') {
                    let p = BigInt::from_str(p.trim());
                    let q = BigInt::from_str(q.trim());
                    match (p, q) {
                        (Ok(p), Ok(q)) if !q.is_zero() => Ok(BigRational::new(p, q)),
                        _ => bad(format!("cannot read fraction \"{s}\"")),
                    }
                } else {
                    parse_decimal(s).map_or_else(|| bad(format!("cannot read number \"{s}\"")), Ok)
                }
            }
        }
    }

    pub fn value(&self) -> Result<f64, SpecError> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(_) => {
                let q = self.rational()?;
                q.to_f64()
                    .filter(|v| v.is_finite())
                    .map_or_else(|| bad(format!("{q} does not fit in f64")), Ok)
            }
        }
    }
}

/// A zone in Liénard form or as a raw linear system `x' = A x + v`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ZoneSpec {
    Lienard {
        #[serde(alias = "T")]
        trace: Number,
        #[serde(alias = "D")]
        det: Number,
        #[serde(alias = "a")]
        offset: Number,
    },
    Linear {
        matrix: [[Number; 2]; 2],
        vector: [Number; 2],
    },
}

/// Exact Liénard parameters of a zone.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactZone {
    pub trace: BigRational,
    pub det: BigRational,
    pub offset: BigRational,
}

impl ExactZone {
    pub fn params(&self) -> Result<LienardParams, SpecError> {
        let f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
        LienardParams::new(f(&self.trace), f(&self.det), f(&self.offset))
            .map_err(|e| SpecError(e.to_string()))
    }
}

impl ZoneSpec {
    /// Reduces to Liénard form: `T = tr A`, `D = det A`, `a = a12 v2 - a22 v1`.
    pub fn exact(&self) -> Result<ExactZone, SpecError> {
        match self {
            ZoneSpec::Lienard { trace, det, offset } => Ok(ExactZone {
                trace: trace.rational()?,
                det: det.rational()?,
                offset: offset.rational()?,
            }),
            ZoneSpec::Linear { matrix, vector } => {
                let m: Vec<BigRational> = matrix
                    .iter()
                    .flatten()
                    .map(Number::rational)
                    .collect::<Result<_, _>>()?;
                let v1 = vector[0].rational()?;
                let v2 = vector[1].rational()?;
                let (a11, a12, a21, a22) = (&m[0], &m[1], &m[2], &m[3]);
                if a12.is_zero() {
                    return bad("requires a12 != 0 (observability condition)");
                }
                Ok(ExactZone {
                    trace: a11 + a22,
                    det: a11 * a22 - a12 * a21,
                    offset: a12 * &v2 - a22 * &v1,
                })
            }
        }
    }

    pub fn params(&self) -> Result<LienardParams, SpecError> {
        self.exact()?.params()
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PwlSpec {
    pub left: ZoneSpec,
    pub right: ZoneSpec,
    #[serde(default = "zero")]
    pub b: Number,
}

fn zero() -> Number {
    Number::Float(0.0)
}

impl PwlSpec {
    pub fn system(&self) -> Result<PwlSystem, SpecError> {
        PwlSystem::new(self.left.params()?, self.right.params()?, self.b.value()?)
            .map_err(|e| SpecError(e.to_string()))
    }
}

/// Run options that may also come from the command line (flags win).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub y0: Option<Vec<Number>>,
    pub range: Option<String>,
    pub order: Option<usize>,
    pub anchor: Option<String>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub zone: Option<ZoneSpec>,
    pub linear: Option<ZoneSpec>,
    pub pwl: Option<PwlSpec>,
    #[serde(default)]
    pub options: Options,
}

/// What the spec describes.
pub enum System<'a> {
    Zone(&'a ZoneSpec),
    Pwl(&'a PwlSpec),
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let spec: SystemSpec =
            serde_json::from_str(text).map_err(|e| SpecError(format!("malformed JSON: {e}")))?;
        let count = [
            spec.zone.is_some(),
            spec.linear.is_some(),
            spec.pwl.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if count != 1 {
            return bad("give exactly one of \"zone\", \"linear\" or \"pwl\"");
        }
        Ok(spec)
    }

    pub fn system(&self) -> System<'_> {
        match (&self.zone, &self.linear, &self.pwl) {
            (Some(z), _, _) | (_, Some(z), _) => System::Zone(z),
            (_, _, Some(p)) => System::Pwl(p),
            _ => unreachable!("checked by parse"),
        }
    }

    pub fn zone(&self) -> Result<&ZoneSpec, SpecError> {
        match self.system() {
            System::Zone(z) => Ok(z),
            System::Pwl(_) => bad("this command needs a single zone (\"zone\" or \"linear\")"),
        }
    }

    pub fn pwl(&self) -> Result<&PwlSpec, SpecError> {
        match self.system() {
            System::Pwl(p) => Ok(p),
            System::Zone(_) => bad("this command needs a \"pwl\" system"),
        }
    }
}

/// `LO:HI:STEPS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl FromStr for Range {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return bad(format!("range \"{s}\" must be LO:HI:STEPS"));
        };
        let num = |t: &str| Number::Text(t.to_string()).value();
        let lo = num(lo)?;
        let hi = num(hi)?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| SpecError(format!("STEPS in \"{s}\" must be a non-negative integer")))?;
        if hi < lo {
            return bad(format!("range \"{s}\" has HI < LO"));
        }
        Ok(Range { lo, hi, steps })
    }
}

/// `p/q` in lowest terms, or an integer.
pub fn rational_text(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn numbers_in_every_form() {
        assert_eq!(Number::Text("3/4".into()).rational().unwrap(), q(3, 4));
        assert_eq!(Number::Text("-0.125".into()).rational().unwrap(), q(-1, 8));
        assert_eq!(Number::Text("1e-2".into()).rational().unwrap(), q(1, 100));
        assert_eq!(Number::Float(0.5).rational().unwrap(), q(1, 2));
        assert!(Number::Text("1/0".into()).rational().is_err());
        assert!(Number::Text("x".into()).rational().is_err());
        assert_eq!(Number::Text("1/3".into()).value().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn linear_reduction() {
        let z: ZoneSpec =
            serde_json::from_str(r#"{"matrix": [[1, 2], [3, 4]], "vector": [5, 6]}"#).unwrap();
        let e = z.exact().unwrap();
        assert_eq!(e.trace, q(5, 1));
        assert_eq!(e.det, q(-2, 1));
        assert_eq!(e.offset, q(2 * 6 - 4 * 5, 1));
        let z: ZoneSpec =
            serde_json::from_str(r#"{"matrix": [[1, 0], [3, 4]], "vector": [5, 6]}"#).unwrap();
        assert!(z.exact().unwrap_err().0.contains("a12"));
    }

    #[test]
    fn exactly_one_system() {
        assert!(SystemSpec::parse(r#"{"zone": {"T": 1, "D": 1, "a": 1}}"#).is_ok());
        assert!(SystemSpec::parse(r#"{}"#).is_err());
        assert!(SystemSpec::parse(r#"{"zone": {"T": 1, "D": 1, "a": 1}, "pwl": {"left": {"T": 1, "D": 1, "a": 1}, "right": {"T": 1, "D": 1, "a": 1}}}"#).is_err());
    }

    #[test]
    fn ranges() {
        let r: Range = "0:5:10".parse().unwrap();
        assert_eq!((r.lo, r.hi, r.steps), (0.0, 5.0, 10));
        assert!("0:5".parse::<Range>().is_err());
        assert!("5:0:3".parse::<Range>().is_err());
    }
}
