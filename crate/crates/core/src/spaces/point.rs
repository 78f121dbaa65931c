use std::fmt;
use std::sync::Arc;

use super::{cantor_distance, IdealBall, IdealPoint, SpaceId};
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Interval, Rational};

type Prefix = Arc<dyn Fn(usize) -> Result<Vec<bool>> + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Bits(Prefix),
    Real(ApproxReal),
}

/// A computable point given by approximations: for Cantor space the first
/// `n` bits (whose `0^ω` completion is within `2^-n`), for the interval an
/// [`ApproxReal`] in `[0, 1]`.
#[derive(Clone)]
pub struct ApproxPoint {
    repr: Repr,
}

/// Outcome of a semi-decision: `Yes` is sound, `NotYet` proves nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    NotYet,
}

impl ApproxPoint {
    /// A Cantor point from a prefix oracle; `f(n)` must return `n` bits that
    /// extend every shorter answer.
    pub fn cantor<F>(f: F) -> Self
    where
        F: Fn(usize) -> Result<Vec<bool>> + Send + Sync + 'static,
    {
        ApproxPoint {
            repr: Repr::Bits(Arc::new(f)),
        }
    }

    /// A Cantor point from a total bit function (bit indices start at 0).
    pub fn from_bit_fn<F>(f: F) -> Self
    where
        F: Fn(usize) -> bool + Send + Sync + 'static,
    {
        ApproxPoint::cantor(move |n| Ok((0..n).map(&f).collect()))
    }

    /// `w^ω` for a nonempty word.
    pub fn periodic(word: &[bool]) -> Self {
        assert!(!word.is_empty(), "periodic point needs a nonempty word");
        let w = word.to_vec();
        ApproxPoint::from_bit_fn(move |i| w[i % w.len()])
    }

    /// `u v^ω`.
    pub fn eventually_periodic(prefix: &[bool], period: &[bool]) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        let (u, v) = (prefix.to_vec(), period.to_vec());
        ApproxPoint::from_bit_fn(move |i| {
            if i < u.len() {
                u[i]
            } else {
                v[(i - u.len()) % v.len()]
            }
        })
    }

    pub fn interval(x: ApproxReal) -> Self {
        ApproxPoint {
            repr: Repr::Real(x),
        }
    }

    pub fn ideal(p: &IdealPoint) -> Self {
        match p {
            IdealPoint::Word(w) => {
                let w = w.clone();
                ApproxPoint::from_bit_fn(move |i| w.get(i).copied().unwrap_or(false))
            }
            IdealPoint::Rational(q) => ApproxPoint::interval(ApproxReal::constant(q.clone())),
        }
    }

    pub fn space(&self) -> SpaceId {
        match self.repr {
            Repr::Bits(_) => SpaceId::Cantor,
            Repr::Real(_) => SpaceId::UnitInterval,
        }
    }

    /// First `n` bits of a Cantor point.
    pub fn bits(&self, n: usize) -> Result<Vec<bool>> {
        match &self.repr {
            Repr::Bits(f) => {
                let b = f(n)?;
                if b.len() != n {
                    return Err(Error::BadParameter(format!(
                        "prefix oracle returned {} bits for n = {n}",
                        b.len()
                    )));
                }
                Ok(b)
            }
            Repr::Real(_) => Err(Error::SpaceMismatch {
                expected: SpaceId::Cantor,
                found: SpaceId::UnitInterval,
            }),
        }
    }

    pub fn real(&self) -> Option<&ApproxReal> {
        match &self.repr {
            Repr::Real(x) => Some(x),
            Repr::Bits(_) => None,
        }
    }

    /// An ideal point within `2^-n`.
    pub fn approx(&self, n: u32) -> Result<IdealPoint> {
        match &self.repr {
            Repr::Bits(_) => Ok(IdealPoint::word(&self.bits(n as usize)?)),
            Repr::Real(x) => {
                let q = x.eval(n)?.max(Rational::zero()).min(Rational::one());
                Ok(IdealPoint::Rational(q))
            }
        }
    }
}

impl fmt::Debug for ApproxPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.approx(16) {
            Ok(p) => write!(f, "ApproxPoint({p:?}…)"),
            Err(e) => write!(f, "ApproxPoint(<{e}>)"),
        }
    }
}

/// Enclosure of `d(x, y)` of width `2^-k` from `k`-bit prefixes.
pub fn cantor_distance_enclosure(x: &ApproxPoint, y: &ApproxPoint, k: usize) -> Result<Interval> {
    let d = cantor_distance(&x.bits(k)?, &y.bits(k)?);
    let hi = &d + &Rational::pow2(-(k as i64));
    Ok(Interval::new(d, hi))
}

/// Certifies `x ∈ B` when `d(x_s, c) + 2^-s < r` for some stage `s <= stage`.
///
/// Checking every earlier stage keeps the answer monotone in `stage`.
pub fn ball_membership(x: &ApproxPoint, ball: &IdealBall, stage: u32) -> Result<Membership> {
    if x.space() != ball.space() {
        return Err(Error::SpaceMismatch {
            expected: ball.space(),
            found: x.space(),
        });
    }
    let certified = |p: &IdealPoint, s: u32| -> Result<bool> {
        let d = super::distance(p, ball.center())?;
        Ok(d + Rational::pow2(-(s as i64)) < *ball.radius())
    };
    match &x.repr {
        Repr::Bits(_) => {
            let prefix = x.bits(stage as usize)?;
            for s in (0..=stage).rev() {
                if certified(&IdealPoint::word(&prefix[..s as usize]), s)? {
                    return Ok(Membership::Yes);
                }
            }
        }
        Repr::Real(_) => {
            for s in (0..=stage).rev() {
                if certified(&x.approx(s)?, s)? {
                    return Ok(Membership::Yes);
                }
            }
        }
    }
    Ok(Membership::NotYet)
}

/// Certified membership in the stage-`stage` list of an effective open set;
/// returns the witnessing ball.
pub fn open_membership(
    x: &ApproxPoint,
    u: &super::EffectiveOpen,
    stage: u32,
) -> Result<Option<IdealBall>> {
    if x.space() != u.space() {
        return Err(Error::SpaceMismatch {
            expected: u.space(),
            found: x.space(),
        });
    }
    for ball in u.stage(stage) {
        if ball_membership(x, &ball, stage)? == Membership::Yes {
            return Ok(Some(ball));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_bits;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn membership_examples() {
        let zero = ApproxPoint::ideal(&IdealPoint::word(&[]));
        let half_ball = IdealBall::cantor(&[], q(1, 2)).unwrap();
        assert_eq!(
            ball_membership(&zero, &half_ball, 3).unwrap(),
            Membership::Yes
        );

        let one_then_zeros = ApproxPoint::ideal(&IdealPoint::word(&parse_bits("1").unwrap()));
        assert_eq!(
            ball_membership(&one_then_zeros, &half_ball, 20).unwrap(),
            Membership::NotYet
        );

        let quarter = ApproxPoint::interval(ApproxReal::constant(q(1, 4)));
        let b = IdealBall::interval(q(0, 1), q(1, 2)).unwrap();
        assert_eq!(ball_membership(&quarter, &b, 4).unwrap(), Membership::Yes);
        assert!(ball_membership(&quarter, &half_ball, 4).is_err());
    }

    #[test]
    fn membership_is_monotone_in_stage() {
        let x = ApproxPoint::periodic(&parse_bits("01").unwrap());
        let b = IdealBall::cantor(&parse_bits("0101").unwrap(), q(1, 10)).unwrap();
        let mut seen = false;
        for s in 0..40 {
            let yes = ball_membership(&x, &b, s).unwrap() == Membership::Yes;
            assert!(!seen || yes, "lost membership at stage {s}");
            seen |= yes;
        }
        assert!(seen);
    }

    #[test]
    fn distance_enclosure_width() {
        let x = ApproxPoint::periodic(&parse_bits("01").unwrap());
        let y = ApproxPoint::periodic(&parse_bits("0").unwrap());
        let e = cantor_distance_enclosure(&x, &y, 12).unwrap();
        assert!(e.contains(&q(1, 3)));
        assert_eq!(e.width(), Rational::pow2(-12));
    }
}
