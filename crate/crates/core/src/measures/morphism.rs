//! Concrete μ-computable maps and their action on cells.

use std::fmt;

use num_bigint::BigInt;

use super::ComputableMeasure;
use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::spaces::{
    cantor_distance, cylinder_relation, interval_relation, prefix_value, BallRelation, IdealBall,
    IdealPoint, SpaceId,
};

/// Maps accepted by [`super::pushforward`].
#[derive(Clone)]
pub enum Morphism {
    Identity,
    /// `x ↦ scale·x + offset` on `[0, 1]`, which it must map into `[0, 1]`.
    Affine {
        scale: Rational,
        offset: Rational,
    },
    /// `x ↦ d(center, x)`.
    DistanceTo(IdealPoint),
    /// `ω ↦ Σ ω_i 2^-i`.
    BinaryDecode,
    /// `x ↦` binary digits of `x` (defined off the dyadics).
    BinaryExpand,
    /// `x ↦ μ([0, x])` for a non-atomic measure on the interval.
    Cdf(ComputableMeasure),
    Shift,
    Doubling,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Morphism::Identity => f.write_str("identity"),
            Morphism::Affine { scale, offset } => write!(f, "affine({scale}, {offset})"),
            Morphism::DistanceTo(p) => write!(f, "distance_to({p})"),
            Morphism::BinaryDecode => f.write_str("binary_decode"),
            Morphism::BinaryExpand => f.write_str("binary_expand"),
            Morphism::Cdf(_) => f.write_str("cdf"),
            Morphism::Shift => f.write_str("shift"),
            Morphism::Doubling => f.write_str("doubling"),
        }
    }
}

/// A closed region of the target space that encloses the image of a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Region {
    Interval(Interval),
    Cylinder(Vec<bool>),
}

impl Region {
    pub(crate) fn relation(&self, ball: &IdealBall) -> BallRelation {
        match self {
            Region::Interval(iv) => interval_relation(iv, ball),
            Region::Cylinder(w) => cylinder_relation(w, ball),
        }
    }

    pub(crate) fn diameter(&self) -> Rational {
        match self {
            Region::Interval(iv) => iv.width(),
            Region::Cylinder(w) => Rational::pow2(-(w.len() as i64)),
        }
    }

    /// An ideal point within `diameter` (interval: within half of it).
    pub(crate) fn center(&self) -> IdealPoint {
        match self {
            Region::Interval(iv) => IdealPoint::Rational(iv.midpoint()),
            Region::Cylinder(w) => IdealPoint::word(w),
        }
    }
}

fn unit() -> Interval {
    Interval::new(Rational::zero(), Rational::one())
}

fn clamp01(iv: Interval) -> Interval {
    let lo = iv.lo.max(Rational::zero()).min(Rational::one());
    let hi = iv.hi.max(Rational::zero()).min(Rational::one());
    Interval::new(lo, hi)
}

impl Morphism {
    pub fn affine(scale: Rational, offset: Rational) -> Result<Self> {
        let at0 = offset.clone();
        let at1 = &scale + &offset;
        let ok = |v: &Rational| !v.is_negative() && *v <= Rational::one();
        if !ok(&at0) || !ok(&at1) {
            return Err(Error::BadParameter(format!(
                "affine map {scale}·x + {offset} leaves [0, 1]"
            )));
        }
        Ok(Morphism::Affine { scale, offset })
    }

    /// The CDF of a measure that must be known to be non-atomic.
    pub fn cdf(mu: &ComputableMeasure) -> Result<Self> {
        if mu.space() != SpaceId::UnitInterval {
            return Err(Error::SpaceMismatch {
                expected: SpaceId::UnitInterval,
                found: mu.space(),
            });
        }
        if !mu.atom_info().is_non_atomic() {
            return Err(Error::AtomicMeasure);
        }
        Ok(Morphism::Cdf(mu.clone()))
    }

    /// Source space, or `None` when any space is accepted.
    pub fn domain(&self) -> Option<SpaceId> {
        match self {
            Morphism::Identity => None,
            Morphism::DistanceTo(p) => Some(p.space()),
            Morphism::BinaryDecode | Morphism::Shift => Some(SpaceId::Cantor),
            Morphism::Affine { .. }
            | Morphism::BinaryExpand
            | Morphism::Cdf(_)
            | Morphism::Doubling => Some(SpaceId::UnitInterval),
        }
    }

    pub fn target(&self, source: SpaceId) -> SpaceId {
        match self {
            Morphism::Identity => source,
            Morphism::BinaryExpand | Morphism::Shift => SpaceId::Cantor,
            _ => SpaceId::UnitInterval,
        }
    }

    /// Whether point preimages are countable, so non-atomic measures stay
    /// non-atomic. Spheres in both spaces have at most two points.
    pub(crate) fn keeps_non_atomic(&self) -> bool {
        !matches!(self, Morphism::Affine { scale, .. } if scale.is_zero())
    }

    /// Exact image of an ideal point.
    pub fn map_ideal(&self, p: &IdealPoint) -> Result<IdealPoint> {
        match (self, p) {
            (Morphism::Identity, _) => Ok(p.clone()),
            (Morphism::Affine { scale, offset }, IdealPoint::Rational(x)) => {
                IdealPoint::rational(scale * x + offset.clone())
            }
            (Morphism::DistanceTo(c), _) => {
                Ok(IdealPoint::Rational(crate::spaces::distance(c, p)?))
            }
            (Morphism::BinaryDecode, IdealPoint::Word(w)) => {
                Ok(IdealPoint::Rational(prefix_value(w)))
            }
            (Morphism::Shift, IdealPoint::Word(w)) => {
                Ok(IdealPoint::word(w.get(1..).unwrap_or(&[])))
            }
            (Morphism::Doubling, IdealPoint::Rational(x)) => {
                let y = x * &Rational::integer(2);
                Ok(IdealPoint::Rational(if y >= Rational::one() {
                    y - Rational::one()
                } else {
                    y
                }))
            }
            (Morphism::BinaryExpand | Morphism::Cdf(_), _) => Err(Error::UnsupportedMorphism(
                format!("{self:?} has no exact image on ideal points"),
            )),
            _ => Err(Error::SpaceMismatch {
                expected: self.domain().unwrap_or(p.space()),
                found: p.space(),
            }),
        }
    }

    /// A region enclosing the image of `region`; `stage` drives any inner
    /// semi-computations.
    pub(crate) fn image(&self, region: &Region, stage: u32) -> Result<Region> {
        Ok(match (self, region) {
            (Morphism::Identity, r) => r.clone(),
            (Morphism::Affine { scale, offset }, Region::Interval(iv)) => {
                Region::Interval(clamp01(iv.scale(scale).shift(offset)))
            }
            (Morphism::DistanceTo(IdealPoint::Rational(c)), Region::Interval(iv)) => {
                let a = (&iv.lo - c).abs();
                let b = (&iv.hi - c).abs();
                let far = a.clone().max(b.clone());
                let near = if iv.contains(c) {
                    Rational::zero()
                } else {
                    a.min(b)
                };
                Region::Interval(Interval::new(near, far))
            }
            (Morphism::DistanceTo(IdealPoint::Word(c)), Region::Cylinder(u)) => {
                let mut head = c.clone();
                head.truncate(u.len());
                let d = cantor_distance(u, &head);
                let hi = (&d + &Rational::pow2(-(u.len() as i64))).min(Rational::one());
                Region::Interval(Interval::new(d, hi))
            }
            (Morphism::BinaryDecode, Region::Cylinder(u)) => {
                let lo = prefix_value(u);
                let hi = &lo + &Rational::pow2(-(u.len() as i64));
                Region::Interval(Interval::new(lo, hi))
            }
            (Morphism::BinaryExpand, Region::Interval(iv)) => Region::Cylinder(common_prefix(iv)),
            (Morphism::Cdf(mu), Region::Interval(iv)) => {
                let lo = mu.cdf_bounds(&iv.lo, stage)?.lo;
                let hi = mu.cdf_bounds(&iv.hi, stage)?.hi;
                Region::Interval(Interval::new(lo.clone().min(hi.clone()), hi.max(lo)))
            }
            (Morphism::Shift, Region::Cylinder(u)) => {
                Region::Cylinder(u.get(1..).unwrap_or(&[]).to_vec())
            }
            (Morphism::Doubling, Region::Interval(iv)) => {
                let half = Rational::new(1, 2);
                let two = Rational::integer(2);
                if iv.hi <= half {
                    Region::Interval(iv.scale(&two))
                } else if iv.lo >= half {
                    Region::Interval(iv.scale(&two).shift(&-Rational::one()))
                } else {
                    Region::Interval(unit())
                }
            }
            _ => {
                return Err(Error::UnsupportedMorphism(format!(
                    "{self:?} does not act on {region:?}"
                )))
            }
        })
    }
}

/// The longest word `u` with `[lo, hi] ⊆ [0.u, 0.u + 2^-|u|]`.
fn common_prefix(iv: &Interval) -> Vec<bool> {
    let mut best = 0u32;
    for l in 1..=256u32 {
        let scale = Rational::pow2(l as i64);
        let a = (&iv.lo * &scale).floor();
        let b = (&iv.hi * &scale).ceil() - BigInt::from(1);
        if a != b {
            break;
        }
        best = l;
    }
    let k = (&iv.lo * &Rational::pow2(best as i64)).floor();
    (0..best).rev().map(|i| k.bit(i as u64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn common_prefix_of_dyadic_cells() {
        let iv = Interval::new(q(5, 16), q(6, 16));
        let bits: Vec<bool> = "0101".chars().map(|c| c == '1').collect();
        assert_eq!(common_prefix(&iv), bits);
        assert!(common_prefix(&Interval::new(q(1, 4), q(3, 4))).is_empty());
    }

    #[test]
    fn ideal_images() {
        let p = IdealPoint::Rational(q(3, 4));
        assert_eq!(
            Morphism::Doubling.map_ideal(&p).unwrap(),
            IdealPoint::Rational(q(1, 2))
        );
        let w = IdealPoint::word(&[false, true]);
        assert_eq!(
            Morphism::BinaryDecode.map_ideal(&w).unwrap(),
            IdealPoint::Rational(q(1, 4))
        );
        assert_eq!(
            Morphism::Shift.map_ideal(&w).unwrap(),
            IdealPoint::word(&[true])
        );
        assert!(Morphism::affine(q(2, 1), q(0, 1)).is_err());
    }
}
