//! Exact rational helpers.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("cannot parse {0:?} as a rational number")]
pub struct ParseRationalError(pub String);

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: u64) -> Q {
    Q::from_integer(n as i128)
}

/// Accepts `a/b`, integers and finite decimals such as `1.25`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| err())?;
        let b: i128 = b.trim().parse().map_err(|_| err())?;
        if b == 0 {
            return Err(err());
        }
        return Ok(Q::new(a, b));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int_part: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| err())? };
        let scale = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| err())?;
        let mag = int_part.abs() * scale + f;
        return Ok(Q::new(if neg { -mag } else { mag }, scale));
    }
    t.parse::<i128>().map(Q::from_integer).map_err(|_| err())
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn exact_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with `sig` significant digits.
pub fn decimal_string(x: &Q, sig: usize) -> String {
    let v = x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn ceil_to_u64(x: &Q) -> u64 {
    if x.is_negative() || x.is_zero() {
        0
    } else {
        let (d, r) = x.numer().div_rem(x.denom());
        (d + if r.is_zero() { 0 } else { 1 }) as u64
    }
}

/// Serde adapter writing a rational as its exact string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&exact_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Q::from_integer(i as i128)),
            Repr::Str(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Serde adapter for a list of rationals.
pub mod serde_q_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(exact_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}
