//! Exact rationals used for densities, thresholds and parameters.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

/// Decimal digits kept when a float is turned into a rational.
const FLOAT_SCALE: i128 = 1_000_000_000_000;

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(v: usize) -> Rational {
    Rational::from_integer(v as i128)
}

/// Rounds to twelve decimal places. Deterministic across platforms since the
/// input is an IEEE double and the rounding is done once.
pub fn from_f64(x: f64) -> Rational {
    Rational::new((x * FLOAT_SCALE as f64).round() as i128, FLOAT_SCALE)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn ceil_usize(r: &Rational) -> usize {
    let c = r.ceil();
    (*c.numer()).max(0) as usize
}

pub fn floor_usize(r: &Rational) -> usize {
    let f = r.floor();
    (*f.numer()).max(0) as usize
}

/// Integer power; the exponent is small in every caller.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= *base;
    }
    acc
}

/// Parses `"3/5"`, `"7"`, `"0.6"`, `"-1.25"` or scientific `"1e-3"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num = parse(a)?;
        let den = parse(b)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    if let Some((mantissa, exp)) = s.split_once(['e', 'E']) {
        let m = parse(mantissa)?;
        let e: i32 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        let ten = Rational::from_integer(10);
        let scale = pow(&ten, e.unsigned_abs());
        return Ok(if e >= 0 { m * scale } else { m / scale });
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(Error::Parse(format!("empty number {s:?}")));
    }
    let digits = format!("{whole}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let num: i128 = digits
        .parse()
        .map_err(|_| Error::Parse(format!("number out of range: {s:?}")))?;
    let den = 10i128.pow(frac.len() as u32);
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Formats as `a/b`, or `a` for integers.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Density expressions: plain rationals, `C*n^-a/b`, `n^-0.6`, `C*ln(n)/n`.
/// The result is a probability clamped to `[0, 1]`.
pub fn parse_density(expr: &str, n: usize) -> Result<Rational> {
    let e = expr.replace(' ', "");
    let (coef, rest) = match e.split_once('*') {
        Some((c, r)) => (parse(c)?, r.to_string()),
        None => (Rational::one(), e.clone()),
    };
    let value = if let Some(exp) = rest.strip_prefix("n^") {
        let exp = parse(exp)?;
        from_f64(to_f64(&coef) * (n as f64).powf(to_f64(&exp)))
    } else if rest == "ln(n)/n" || rest == "log(n)/n" {
        from_f64(to_f64(&coef) * (n as f64).ln() / n as f64)
    } else if rest == "1/n" {
        coef / int(n.max(1))
    } else if e.contains('*') {
        coef * parse(&rest)?
    } else {
        parse(&rest)?
    };
    if value.is_negative() {
        return Err(Error::Parse(format!("negative density {expr:?}")));
    }
    Ok(value.min(Rational::one()))
}

/// Serde adapter writing rationals as `"a/b"` strings.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = RawNumber::deserialize(d)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawNumber {
        Text(String),
        Int(i64),
        Float(f64),
    }

    impl RawNumber {
        fn into_rational(self) -> Result<Rational> {
            match self {
                RawNumber::Text(s) => parse(&s),
                RawNumber::Int(i) => Ok(Rational::from_integer(i as i128)),
                RawNumber::Float(f) => parse(&f.to_string()),
            }
        }
    }
}

/// Newtype for fields that must serialize as rational strings inside
/// containers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_str::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_str::deserialize(d).map(Exact)
    }
}

/// `a * b` compared against `c * d` without building intermediate ratios.
pub fn cmp_products(a: i128, b: i128, c: i128, d: i128) -> std::cmp::Ordering {
    (a * b).cmp(&(c * d))
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}
