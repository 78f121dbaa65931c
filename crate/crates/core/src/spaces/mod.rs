//! The two concrete computable metric spaces: Cantor space `{0,1}^N` and
//! the unit interval.

mod ball;
mod open;
mod point;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::pairing;
use crate::exact::Rational;

pub use ball::{cylinder_relation, interval_relation, region_relation, BallRelation, IdealBall};
pub use open::{outer_cover, witness_cover, EffectiveOpen, OpenSnapshot};
pub use point::{
    ball_membership, cantor_distance_enclosure, open_membership, ApproxPoint, Membership,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceId {
    Cantor,
    UnitInterval,
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceId::Cantor => "cantor",
            SpaceId::UnitInterval => "unit_interval",
        })
    }
}

/// Ideal points: ultimately-zero sequences `w0^ω` (stored as the word with
/// trailing zeros removed) and rationals in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdealPoint {
    Word(Vec<bool>),
    Rational(Rational),
}

impl IdealPoint {
    pub fn word(bits: &[bool]) -> Self {
        IdealPoint::Word(pairing::trimmed(bits).to_vec())
    }

    pub fn rational(q: Rational) -> Result<Self> {
        if q.is_negative() || q > Rational::one() {
            return Err(Error::BadParameter(format!("{q} is outside [0, 1]")));
        }
        Ok(IdealPoint::Rational(q))
    }

    pub fn space(&self) -> SpaceId {
        match self {
            IdealPoint::Word(_) => SpaceId::Cantor,
            IdealPoint::Rational(_) => SpaceId::UnitInterval,
        }
    }

    pub fn as_word(&self) -> Option<&[bool]> {
        match self {
            IdealPoint::Word(w) => Some(w),
            IdealPoint::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            IdealPoint::Rational(q) => Some(q),
            IdealPoint::Word(_) => None,
        }
    }

    /// Position in the effective numbering of the space's ideal points.
    pub fn index(&self) -> BigUint {
        match self {
            IdealPoint::Word(w) => pairing::word_index(w),
            IdealPoint::Rational(q) => rational_index(q),
        }
    }

    pub fn expect_space(&self, space: SpaceId) -> Result<()> {
        if self.space() != space {
            return Err(Error::SpaceMismatch {
                expected: space,
                found: self.space(),
            });
        }
        Ok(())
    }
}

pub(crate) fn rational_index(q: &Rational) -> BigUint {
    pairing::pair(&pairing::zigzag(q.numer()), q.denom().magnitude())
}

impl fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Word(w) => f.write_str(&bits_to_string(w)),
            IdealPoint::Rational(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Debug for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Word(w) => write!(f, "[{}]0^ω", bits_to_string(w)),
            IdealPoint::Rational(q) => write!(f, "{q}"),
        }
    }
}

/// Text form: a rational always contains `/`; anything else is a binary word.
impl FromStr for IdealPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            IdealPoint::rational(s.parse()?)
        } else {
            Ok(IdealPoint::word(&parse_bits(s)?))
        }
    }
}

impl Serialize for IdealPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IdealPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("not a binary digit: {c:?}"))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Serde helpers for words written as `"0101"`.
pub mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&super::bits_to_string(bits))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<bool>, D::Error> {
        super::parse_bits(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `sum_{i >= 1, a_i != b_i} 2^-i` for words padded with zeros.
pub fn cantor_distance(a: &[bool], b: &[bool]) -> Rational {
    let len = a.len().max(b.len());
    let bit = |w: &[bool], i: usize| w.get(i).copied().unwrap_or(false);
    let xor: Vec<bool> = (0..len).map(|i| bit(a, i) != bit(b, i)).collect();
    prefix_value(&xor)
}

/// `sum_i bits_i 2^-(i+1)` as an exact dyadic.
pub fn prefix_value(bits: &[bool]) -> Rational {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
    }
    let numer = BigInt::from(BigUint::from_bytes_be(&bytes));
    Rational::from_bigint(numer) * Rational::pow2(-(8 * bytes.len() as i64))
}

/// Exact distance between ideal points of the same space.
pub fn distance(a: &IdealPoint, b: &IdealPoint) -> Result<Rational> {
    match (a, b) {
        (IdealPoint::Word(x), IdealPoint::Word(y)) => Ok(cantor_distance(x, y)),
        (IdealPoint::Rational(x), IdealPoint::Rational(y)) => Ok((x - y).abs()),
        _ => Err(Error::SpaceMismatch {
            expected: a.space(),
            found: b.space(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    /// Direct summation, independent of the byte packing.
    fn naive(a: &[bool], b: &[bool]) -> Rational {
        let n = a.len().max(b.len());
        let mut s = Rational::zero();
        for i in 0..n {
            if a.get(i).copied().unwrap_or(false) != b.get(i).copied().unwrap_or(false) {
                s += Rational::pow2(-(i as i64 + 1));
            }
        }
        s
    }

    #[test]
    fn distance_examples() {
        assert_eq!(cantor_distance(&w("0101"), &w("0101")), Rational::zero());
        assert_eq!(
            cantor_distance(&w("01100"), &w("00100")),
            Rational::new(1, 4)
        );
        assert_eq!(naive(&w("01100"), &w("00100")), Rational::new(1, 4));
        // 1^k against 0^k tends to 1.
        let ones = vec![true; 40];
        let gap = Rational::one() - cantor_distance(&ones, &[]);
        assert_eq!(gap, Rational::pow2(-40));
    }

    #[test]
    fn packing_matches_naive_sum() {
        for a in 0u32..64 {
            for b in 0u32..64 {
                let x: Vec<bool> = (0..6).map(|i| a >> i & 1 == 1).collect();
                let y: Vec<bool> = (0..9).map(|i| b >> (i % 6) & 1 == 1).collect();
                assert_eq!(cantor_distance(&x, &y), naive(&x, &y));
            }
        }
    }

    #[test]
    fn ideal_point_text_form() {
        let p: IdealPoint = "0110".parse().unwrap();
        assert_eq!(p, IdealPoint::word(&w("011")));
        assert_eq!(p.to_string(), "011");
        let q: IdealPoint = "3/8".parse().unwrap();
        assert_eq!(q.as_rational(), Some(&Rational::new(3, 8)));
        assert!("3/2".parse::<IdealPoint>().is_err());
        assert!("01a".parse::<IdealPoint>().is_err());
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, "\"3/8\"");
    }
}
