//! Exact rational scalars and their canonical text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ForgeError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `num / den`, reduced. Panics if `den == 0`.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `1 / k!`
pub fn inv_factorial(k: u32) -> Q {
    Q::new(BigInt::one(), factorial(k))
}

/// Canonical `"p/q"` string. The denominator is always written, so `3` becomes `"3/1"`.
pub fn to_canonical(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or `"p"` (decimal integers, optional leading minus).
pub fn parse(s: &str) -> Result<Q, ForgeError> {
    let bad = || ForgeError::Parse(format!("invalid rational {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// A rational that travels through JSON in canonical text form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QValue(pub Q);

impl serde::Serialize for QValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_q::serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for QValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_q::deserialize(d).map(QValue)
    }
}

impl From<Q> for QValue {
    fn from(x: Q) -> Self {
        QValue(x)
    }
}

pub fn qvalues(xs: &[Q]) -> Vec<QValue> {
    xs.iter().cloned().map(QValue).collect()
}

pub fn unwrap_qvalues(xs: &[QValue]) -> Vec<Q> {
    xs.iter().map(|x| x.0.clone()).collect()
}

/// Serde adapter so that struct fields of type `Q` travel as canonical strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_canonical(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = RawQ::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    /// Accepts either a JSON string or a JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawQ {
        Str(String),
        Int(i64),
    }

    impl RawQ {
        pub(crate) fn into_q(self) -> Result<Q, ForgeError> {
            match self {
                RawQ::Str(s) => parse(&s),
                RawQ::Int(v) => Ok(q(v)),
            }
        }
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_qvec {
    use super::serde_q::RawQ;
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&to_canonical(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<RawQ>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_q().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Vec<Vec<Q>>` (row-major matrices, lists of vectors).
pub mod serde_qmat {
    use super::serde_q::RawQ;
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let row: Vec<String> = row.iter().map(to_canonical).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        let raw = Vec::<Vec<RawQ>>::deserialize(d)?;
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|r| r.into_q().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_round_trips() {
        for (n, d) in [(3, 1), (-6, 4), (0, 5), (7, -21)] {
            let x = qr(n, d);
            assert_eq!(parse(&to_canonical(&x)).unwrap(), x);
        }
        assert_eq!(to_canonical(&qr(-6, 4)), "-3/2");
        assert_eq!(to_canonical(&q(0)), "0/1");
        assert_eq!(parse("5").unwrap(), q(5));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.5").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(inv_factorial(3), qr(1, 6));
    }
}
