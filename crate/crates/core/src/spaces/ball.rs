use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{prefix_value, IdealPoint, SpaceId};
use crate::error::{Error, Result};
use crate::exact::pairing;
use crate::exact::{Interval, Rational};

/// Open ball `B(center, radius)`; in the unit interval this is the trace
/// `(c - r, c + r) ∩ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct IdealBall {
    center: IdealPoint,
    radius: Rational,
}

#[derive(Deserialize)]
struct RawBall {
    center: IdealPoint,
    radius: Rational,
}

impl TryFrom<RawBall> for IdealBall {
    type Error = Error;

    fn try_from(raw: RawBall) -> Result<Self> {
        IdealBall::new(raw.center, raw.radius)
    }
}

/// How a region sits relative to an open ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Inside,
    Disjoint,
    Straddles,
}

impl IdealBall {
    pub fn new(center: IdealPoint, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::BadParameter(format!(
                "ball radius {radius} is not positive"
            )));
        }
        Ok(IdealBall { center, radius })
    }

    pub fn interval(center: Rational, radius: Rational) -> Result<Self> {
        IdealBall::new(IdealPoint::rational(center)?, radius)
    }

    pub fn cantor(center: &[bool], radius: Rational) -> Result<Self> {
        IdealBall::new(IdealPoint::word(center), radius)
    }

    /// `B(w0^ω, 2^-|w|)`, which is the cylinder `[w]` minus the point `w1^ω`.
    pub fn cylinder(word: &[bool]) -> IdealBall {
        IdealBall {
            center: IdealPoint::word(word),
            radius: Rational::pow2(-(word.len() as i64)),
        }
    }

    /// Two balls whose union is exactly the cylinder `[w]`: the second one,
    /// centered at `w10^ω`, misses only `w01^ω`, which the first contains.
    pub fn cylinder_pair(word: &[bool]) -> [IdealBall; 2] {
        let mut alt = word.to_vec();
        alt.push(true);
        let radius = Rational::pow2(-(word.len() as i64));
        [
            IdealBall {
                center: IdealPoint::word(word),
                radius: radius.clone(),
            },
            IdealBall {
                center: IdealPoint::word(&alt),
                radius,
            },
        ]
    }

    pub fn space(&self) -> SpaceId {
        self.center.space()
    }

    pub fn center(&self) -> &IdealPoint {
        &self.center
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    /// `<center index, radius index>` under the diagonal pairing.
    pub fn index(&self) -> BigUint {
        pairing::pair(&self.center.index(), &super::rational_index(&self.radius))
    }

    pub fn contains_ideal(&self, p: &IdealPoint) -> Result<bool> {
        Ok(super::distance(&self.center, p)? < self.radius)
    }

    /// `(c - r, c + r)` before intersecting with `[0, 1]`.
    pub fn interval_ends(&self) -> Option<(Rational, Rational)> {
        self.center
            .as_rational()
            .map(|c| (c - &self.radius, c + &self.radius))
    }

    /// Certified inclusion `self ⊆ other`. Exact in the unit interval and
    /// for cylinder-shaped Cantor balls; otherwise the triangle inequality.
    pub fn within(&self, other: &IdealBall) -> Result<bool> {
        if self.space() != other.space() {
            return Err(Error::SpaceMismatch {
                expected: other.space(),
                found: self.space(),
            });
        }
        match (&self.center, &other.center) {
            (IdealPoint::Rational(_), IdealPoint::Rational(_)) => {
                let (l1, h1) = self.interval_ends().unwrap_or_default();
                let (l2, h2) = other.interval_ends().unwrap_or_default();
                let zero = Rational::zero();
                let one = Rational::one();
                let left = if l1 < zero { l2 < zero } else { l2 <= l1 };
                let right = if h1 > one { h2 > one } else { h2 >= h1 };
                Ok(left && right)
            }
            (IdealPoint::Word(_), _) => {
                if let Some(u) = self.cylinder_word() {
                    return Ok(region_relation(&u, false, other) == BallRelation::Inside);
                }
                let d = super::distance(&self.center, &other.center)?;
                Ok(d + self.radius.clone() <= other.radius)
            }
            _ => unreachable!("spaces compared above"),
        }
    }

    /// When the ball is `B(w0^ω, 2^-L)` with `|w| <= L`, the padded word `w`
    /// of length `L`.
    pub fn cylinder_word(&self) -> Option<Vec<bool>> {
        let c = self.center.as_word()?;
        if !self.radius.is_dyadic() || self.radius.numer() != &1.into() {
            return None;
        }
        let l = (self.radius.denom().bits() - 1) as usize;
        if c.len() > l {
            return None;
        }
        let mut u = c.to_vec();
        u.resize(l, false);
        Some(u)
    }
}

/// `sum_{i < |u|, u_i != c_i} 2^-(i+1)` with `c` padded by zeros.
fn offset(u: &[bool], c: &[bool]) -> Rational {
    let xor: Vec<bool> = u
        .iter()
        .enumerate()
        .map(|(i, &b)| b != c.get(i).copied().unwrap_or(false))
        .collect();
    prefix_value(&xor)
}

/// Relation of the full cylinder `[u]` to a Cantor ball.
///
/// Over `[u]`, `d(x, c)` sweeps `[D, D + 2^-|u|]` with both ends attained.
pub fn cylinder_relation(u: &[bool], ball: &IdealBall) -> BallRelation {
    let c = ball.center.as_word().expect("cantor ball");
    let d = offset(u, c);
    let r = &ball.radius;
    if &d >= r {
        BallRelation::Disjoint
    } else if d + Rational::pow2(-(u.len() as i64)) < *r {
        BallRelation::Inside
    } else {
        BallRelation::Straddles
    }
}

/// Relation of a cylinder-ball region to a Cantor ball: `alt = false` is
/// `[u]` minus `u1^ω` (the ball around `u0^ω`), `alt = true` is `[u]` minus
/// `u01^ω` (the ball around `u10^ω`).
///
/// The supremum `D + 2^-|u|` of `d(x, c)` is attained unless the point that
/// attains it is the one removed, which happens exactly when the tail of `c`
/// past `|u|` is the complement of the removed point's tail.
pub fn region_relation(u: &[bool], alt: bool, ball: &IdealBall) -> BallRelation {
    let c = ball.center.as_word().expect("cantor ball");
    let l = u.len();
    let d = offset(u, c);
    let r = &ball.radius;
    if &d >= r {
        return BallRelation::Disjoint;
    }
    let sup = d + Rational::pow2(-(l as i64));
    let sup_removed = if alt {
        c.len() == l + 1 && c[l]
    } else {
        c.len() <= l
    };
    if sup < *r || (sup_removed && sup == *r) {
        BallRelation::Inside
    } else {
        BallRelation::Straddles
    }
}

/// Relation of a closed subinterval of `[0, 1]` to an interval ball.
pub fn interval_relation(cell: &Interval, ball: &IdealBall) -> BallRelation {
    let (lo, hi) = ball.interval_ends().expect("interval ball");
    if cell.hi <= lo || cell.lo >= hi {
        BallRelation::Disjoint
    } else if cell.lo > lo && cell.hi < hi {
        BallRelation::Inside
    } else {
        BallRelation::Straddles
    }
}
