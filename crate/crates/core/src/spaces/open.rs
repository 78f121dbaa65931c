use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ball::{cylinder_relation, region_relation};
use super::{BallRelation, IdealBall, SpaceId};
use crate::error::{Error, Result};
use crate::exact::Rational;

type Enumerator = Arc<dyn Fn(u32) -> Vec<IdealBall> + Send + Sync>;

/// An r.e. open set: stage `t` lists finitely many ideal balls and the
/// lists grow with `t`.
#[derive(Clone)]
pub struct EffectiveOpen {
    space: SpaceId,
    enumerator: Enumerator,
}

/// JSON snapshot of an enumeration at a given stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSnapshot {
    pub space: SpaceId,
    pub stage: u32,
    pub balls: Vec<IdealBall>,
}

impl EffectiveOpen {
    /// Wraps a monotone enumerator. Monotonicity is the caller's contract;
    /// see [`EffectiveOpen::first_non_monotone`].
    pub fn from_fn<F>(space: SpaceId, f: F) -> Self
    where
        F: Fn(u32) -> Vec<IdealBall> + Send + Sync + 'static,
    {
        EffectiveOpen {
            space,
            enumerator: Arc::new(f),
        }
    }

    pub fn empty(space: SpaceId) -> Self {
        EffectiveOpen::from_fn(space, |_| Vec::new())
    }

    /// The same finite list at every stage.
    pub fn finite(space: SpaceId, balls: Vec<IdealBall>) -> Result<Self> {
        for b in &balls {
            if b.space() != space {
                return Err(Error::SpaceMismatch {
                    expected: space,
                    found: b.space(),
                });
            }
        }
        Ok(EffectiveOpen::from_fn(space, move |_| balls.clone()))
    }

    /// Stage `t` lists the balls of `stages[0..=t]`.
    pub fn staged(space: SpaceId, stages: Vec<Vec<IdealBall>>) -> Result<Self> {
        for b in stages.iter().flatten() {
            if b.space() != space {
                return Err(Error::SpaceMismatch {
                    expected: space,
                    found: b.space(),
                });
            }
        }
        Ok(EffectiveOpen::from_fn(space, move |t| {
            stages
                .iter()
                .take(t as usize + 1)
                .flatten()
                .cloned()
                .collect()
        }))
    }

    /// The cylinder `[w]`, enumerated exactly as two balls.
    pub fn cylinder(word: &[bool]) -> Self {
        let pair = IdealBall::cylinder_pair(word).to_vec();
        EffectiveOpen::from_fn(SpaceId::Cantor, move |_| pair.clone())
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn stage(&self, t: u32) -> Vec<IdealBall> {
        (self.enumerator)(t)
    }

    pub fn snapshot(&self, t: u32) -> OpenSnapshot {
        OpenSnapshot {
            space: self.space,
            stage: t,
            balls: self.stage(t),
        }
    }

    /// First stage `t <= upto` whose list is not a superset of stage `t - 1`.
    pub fn first_non_monotone(&self, upto: u32) -> Option<u32> {
        let mut prev: BTreeSet<IdealBall> = self.stage(0).into_iter().collect();
        for t in 1..=upto {
            let cur: BTreeSet<IdealBall> = self.stage(t).into_iter().collect();
            if !prev.is_subset(&cur) {
                return Some(t);
            }
            prev = cur;
        }
        None
    }

    /// Stage `t` lists both stage-`t` lists.
    pub fn union(&self, other: &EffectiveOpen) -> Result<EffectiveOpen> {
        self.same_space(other)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(EffectiveOpen::from_fn(self.space, move |t| {
            let mut out = a.stage(t);
            for ball in b.stage(t) {
                if !out.contains(&ball) {
                    out.push(ball);
                }
            }
            out
        }))
    }

    /// Stage `t` lists witness balls certified inside both stage-`t` lists.
    pub fn intersect(&self, other: &EffectiveOpen) -> Result<EffectiveOpen> {
        self.same_space(other)?;
        let (a, b) = (self.clone(), other.clone());
        let space = self.space;
        Ok(EffectiveOpen::from_fn(space, move |t| {
            witness_cover(space, &[a.stage(t), b.stage(t)], 2, t)
        }))
    }

    fn same_space(&self, other: &EffectiveOpen) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space,
                found: other.space,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for EffectiveOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "EffectiveOpen({}, stage 0: {:?})",
            self.space,
            self.stage(0)
        )
    }
}

/// Balls covering the points that lie in at least `m` of the given unions.
///
/// In the interval the cover is exact: a sweep over the ball endpoints
/// emits every open cell (and every endpoint) with multiplicity `>= m`.
/// In Cantor space a search over cylinder regions of length `<= depth`
/// emits the regions certified inside `m` unions; the output grows with
/// `depth` and with the input lists.
pub fn witness_cover(
    space: SpaceId,
    sets: &[Vec<IdealBall>],
    m: usize,
    depth: u32,
) -> Vec<IdealBall> {
    if m == 0 || sets.len() < m {
        return Vec::new();
    }
    match space {
        SpaceId::UnitInterval => interval_cover(sets, m),
        SpaceId::Cantor => {
            let mut out = Vec::new();
            let mut prefix = Vec::new();
            cantor_cover(sets, m, depth as usize, &mut prefix, &mut out);
            out
        }
    }
}

/// Balls whose union contains every point lying in at least `m` of the
/// given unions. Exact in the interval; in Cantor space every region of
/// length `depth` that could still meet `m` unions is kept whole.
pub fn outer_cover(
    space: SpaceId,
    sets: &[Vec<IdealBall>],
    m: usize,
    depth: u32,
) -> Vec<IdealBall> {
    if m == 0 || sets.len() < m {
        return Vec::new();
    }
    match space {
        SpaceId::UnitInterval => interval_cover(sets, m),
        SpaceId::Cantor => {
            let mut out = Vec::new();
            let mut prefix = Vec::new();
            cantor_outer(sets, m, depth as usize, &mut prefix, &mut out);
            out
        }
    }
}

fn cantor_outer(
    sets: &[Vec<IdealBall>],
    m: usize,
    depth: usize,
    prefix: &mut Vec<bool>,
    out: &mut Vec<IdealBall>,
) {
    let possible = sets
        .iter()
        .filter(|set| {
            set.iter()
                .any(|b| cylinder_relation(prefix, b) != BallRelation::Disjoint)
        })
        .count();
    if possible < m {
        return;
    }
    let whole = sets
        .iter()
        .filter(|set| {
            set.iter()
                .any(|b| cylinder_relation(prefix, b) == BallRelation::Inside)
        })
        .count();
    if whole >= m || prefix.len() >= depth {
        out.extend(IdealBall::cylinder_pair(prefix));
        return;
    }
    for b in [false, true] {
        prefix.push(b);
        cantor_outer(sets, m, depth, prefix, out);
        prefix.pop();
    }
}

fn interval_cover(sets: &[Vec<IdealBall>], m: usize) -> Vec<IdealBall> {
    let zero = Rational::zero();
    let one = Rational::one();
    let mut cuts: BTreeSet<Rational> = [zero.clone(), one.clone()].into();
    for ball in sets.iter().flatten() {
        if let Some((lo, hi)) = ball.interval_ends() {
            if lo > zero && lo < one {
                cuts.insert(lo);
            }
            if hi > zero && hi < one {
                cuts.insert(hi);
            }
        }
    }
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let count = |inside: &dyn Fn(&Rational, &Rational) -> bool| {
        sets.iter()
            .filter(|set| {
                set.iter().any(|b| {
                    let (lo, hi) = b.interval_ends().expect("interval ball");
                    inside(&lo, &hi)
                })
            })
            .count()
    };
    let covers = |x: &Rational| count(&|lo, hi| lo < x && x < hi);
    let n = cuts.len();
    let cell_ok: Vec<bool> = (0..n - 1)
        .map(|i| covers(&(&cuts[i] + &cuts[i + 1]).half()) >= m)
        .collect();
    let ball = |lo: &Rational, hi: &Rational| -> IdealBall {
        IdealBall::interval((lo + hi).half(), (hi - lo).half()).expect("nonempty cell")
    };
    let mut out = Vec::new();
    for (i, ok) in cell_ok.iter().enumerate() {
        if *ok {
            out.push(ball(&cuts[i], &cuts[i + 1]));
        }
    }
    for i in 1..n - 1 {
        if cell_ok[i - 1] && cell_ok[i] && covers(&cuts[i]) >= m {
            out.push(ball(&cuts[i - 1], &cuts[i + 1]));
        }
    }
    // An endpoint of [0, 1] lies in a ball exactly when the ball overhangs it.
    if cell_ok[0] && count(&|lo, _| lo < &zero) >= m {
        out.push(IdealBall::interval(zero.clone(), cuts[1].clone()).expect("positive radius"));
    }
    let last = &cuts[n - 2];
    if cell_ok[n - 2] && count(&|_, hi| hi > &one) >= m {
        out.push(IdealBall::interval(one.clone(), &one - last).expect("positive radius"));
    }
    out
}

fn cantor_cover(
    sets: &[Vec<IdealBall>],
    m: usize,
    depth: usize,
    prefix: &mut Vec<bool>,
    out: &mut Vec<IdealBall>,
) {
    let possible = sets
        .iter()
        .filter(|set| {
            set.iter()
                .any(|b| cylinder_relation(prefix, b) != BallRelation::Disjoint)
        })
        .count();
    if possible < m {
        return;
    }
    let inside = |alt: bool| {
        sets.iter()
            .filter(|set| {
                set.iter()
                    .any(|b| region_relation(prefix, alt, b) == BallRelation::Inside)
            })
            .count()
    };
    let [main, alt] = IdealBall::cylinder_pair(prefix);
    let main_ok = inside(false) >= m;
    let alt_ok = inside(true) >= m;
    if main_ok {
        out.push(main);
    }
    if alt_ok {
        out.push(alt);
    }
    if (main_ok && alt_ok) || prefix.len() >= depth {
        return;
    }
    for b in [false, true] {
        prefix.push(b);
        cantor_cover(sets, m, depth, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ApproxReal;
    use crate::spaces::{open_membership, parse_bits, ApproxPoint, IdealPoint};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn interval_ball(lo: Rational, hi: Rational) -> IdealBall {
        IdealBall::interval((&lo + &hi).half(), (&hi - &lo).half()).unwrap()
    }

    fn point(x: Rational) -> ApproxPoint {
        ApproxPoint::interval(ApproxReal::constant(x))
    }

    #[test]
    fn union_with_empty_is_identity() {
        let u = EffectiveOpen::cylinder(&parse_bits("01").unwrap());
        let v = u.union(&EffectiveOpen::empty(SpaceId::Cantor)).unwrap();
        for t in 0..5 {
            assert_eq!(u.stage(t), v.stage(t));
        }
    }

    #[test]
    fn staged_union_certifies_three_eighths() {
        let u = EffectiveOpen::staged(
            SpaceId::UnitInterval,
            vec![
                vec![IdealBall::interval(q(0, 1), q(1, 4)).unwrap()],
                vec![IdealBall::interval(q(1, 2), q(1, 4)).unwrap()],
            ],
        )
        .unwrap();
        assert!(open_membership(&point(q(3, 8)), &u, 0).unwrap().is_none());
        assert!(open_membership(&point(q(3, 8)), &u, 6).unwrap().is_some());
        assert_eq!(u.first_non_monotone(5), None);
    }

    #[test]
    fn interval_intersection_matches_brute_force() {
        let a = EffectiveOpen::finite(
            SpaceId::UnitInterval,
            vec![interval_ball(q(-1, 4), q(1, 2))],
        )
        .unwrap();
        let b = EffectiveOpen::finite(SpaceId::UnitInterval, vec![interval_ball(q(1, 4), q(3, 4))])
            .unwrap();
        let c = a.intersect(&b).unwrap();
        assert!(open_membership(&point(q(3, 8)), &c, 8).unwrap().is_some());
        for k in 0..=64 {
            let x = q(k, 64);
            let inside = x > q(1, 4) && x < q(1, 2);
            let hit = c.stage(0).iter().any(|ball| {
                ball.contains_ideal(&IdealPoint::Rational(x.clone()))
                    .unwrap()
            });
            assert_eq!(hit, inside, "x = {x}");
        }
    }

    #[test]
    fn interval_cover_keeps_shared_endpoints_and_ends() {
        // (0,1/2) ∪ (1/4, 3/4) twice: every point of (0, 3/4) in one, the
        // overlap in two.
        let sets = vec![
            vec![
                interval_ball(q(-1, 2), q(1, 2)),
                interval_ball(q(1, 4), q(3, 4)),
            ],
            vec![interval_ball(q(-1, 2), q(1, 2))],
        ];
        let cover = witness_cover(SpaceId::UnitInterval, &sets, 2, 0);
        let hit = |x: Rational| {
            cover
                .iter()
                .any(|b| b.contains_ideal(&IdealPoint::Rational(x.clone())).unwrap())
        };
        assert!(hit(q(0, 1)));
        assert!(hit(q(1, 4)));
        assert!(hit(q(49, 100)));
        assert!(!hit(q(1, 2)));
        assert!(!hit(q(5, 8)));
    }

    #[test]
    fn disjoint_cylinders_never_meet() {
        let u = EffectiveOpen::cylinder(&[false]);
        let v = EffectiveOpen::cylinder(&[true]);
        let w = u.intersect(&v).unwrap();
        assert!(w.stage(12).is_empty());
    }

    #[test]
    fn cantor_cover_is_exact_on_nested_cylinders() {
        let c = |s: &str| IdealBall::cylinder_pair(&parse_bits(s).unwrap()).to_vec();
        let sets = vec![c("1"), c("11"), c("111")];
        let cover = witness_cover(SpaceId::Cantor, &sets, 3, 6);
        let ones = ApproxPoint::periodic(&[true]);
        let u = EffectiveOpen::finite(SpaceId::Cantor, cover.clone()).unwrap();
        assert!(open_membership(&ones, &u, 10).unwrap().is_some());
        for k in 0u32..64 {
            let x: Vec<bool> = (0..6).map(|i| k >> i & 1 == 1).collect();
            let p = IdealPoint::word(&x);
            let hit = cover.iter().any(|b| b.contains_ideal(&p).unwrap());
            assert_eq!(hit, x[..3] == [true, true, true], "{x:?}");
        }
    }

    #[test]
    fn outer_cover_contains_inner_cover() {
        let sets = vec![
            vec![IdealBall::cantor(&[], q(3, 8)).unwrap()],
            vec![IdealBall::cylinder(&parse_bits("0").unwrap())],
        ];
        let inner = witness_cover(SpaceId::Cantor, &sets, 2, 6);
        let outer = outer_cover(SpaceId::Cantor, &sets, 2, 6);
        for k in 0..128u32 {
            let w: Vec<bool> = (0..7).map(|i| k >> i & 1 == 1).collect();
            let p = IdealPoint::word(&w);
            let hits = sets
                .iter()
                .filter(|s| s.iter().any(|b| b.contains_ideal(&p).unwrap()))
                .count();
            let in_inner = inner.iter().any(|b| b.contains_ideal(&p).unwrap());
            let in_outer = outer.iter().any(|b| b.contains_ideal(&p).unwrap());
            assert!(!in_inner || hits >= 2);
            assert!(hits < 2 || in_outer, "{w:?}");
        }
    }
}
