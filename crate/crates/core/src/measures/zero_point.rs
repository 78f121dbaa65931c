//! Points of zero measure by nested thirds, and almost decidable radii.

use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{pushforward, ComputableMeasure, Morphism};
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Interval, Rational};
use crate::spaces::{IdealBall, IdealPoint, SpaceId};

/// The nested intervals `J_0 ⊇ J_1 ⊇ …` and certified upper bounds on
/// their measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroMeasureTrace {
    pub intervals: Vec<Interval>,
    pub upper_bounds: Vec<Rational>,
}

impl ZeroMeasureTrace {
    /// CSV with header `k,a,b,upper_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a,b,upper_bound\n");
        for (k, (j, u)) in self.intervals.iter().zip(&self.upper_bounds).enumerate() {
            let _ = writeln!(out, "{k},{},{},{u}", j.lo, j.hi);
        }
        out
    }

    /// Checks nesting, the thirds schedule and `upper_bounds[k] < 2^(1-k)`.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.intervals.len() != self.upper_bounds.len() {
            return Err("interval and bound counts differ".into());
        }
        let three = Rational::integer(3);
        for (k, u) in self.upper_bounds.iter().enumerate() {
            if *u >= Rational::pow2(1 - k as i64) {
                return Err(format!(
                    "bound {u} at level {k} is not below 2^{}",
                    1 - k as i64
                ));
            }
        }
        for (k, w) in self.intervals.windows(2).enumerate() {
            if !w[0].contains_interval(&w[1]) {
                return Err(format!("J_{} is not inside J_{k}", k + 1));
            }
            if w[1].width() * three.clone() != w[0].width() {
                return Err(format!("J_{} is not a third of J_{k}", k + 1));
            }
        }
        Ok(())
    }
}

/// Upper bound of `μ([a, b])` at stage `s`: one minus the lower bound of
/// `[0, a) ∪ (b, 1]`.
pub fn upper_closed(mu: &ComputableMeasure, iv: &Interval, s: u32) -> Result<Rational> {
    let zero = Rational::zero();
    let one = Rational::one();
    let mut outside = Vec::new();
    if iv.lo > zero {
        outside.push(IdealBall::interval(zero, iv.lo.clone())?);
    }
    if iv.hi < one {
        outside.push(IdealBall::interval(one.clone(), &one - &iv.hi)?);
    }
    if outside.is_empty() {
        return Ok(one);
    }
    Ok(one - mu.lower(&outside, s)?)
}

struct Search {
    mu: ComputableMeasure,
    budget: u32,
    trace: Mutex<ZeroMeasureTrace>,
}

impl Search {
    /// Makes sure `J_0..=J_k` exist.
    fn extend_to(&self, k: usize) -> Result<ZeroMeasureTrace> {
        let mut trace = self.trace.lock().expect("trace lock");
        while trace.intervals.len() <= k {
            let level = trace.intervals.len();
            let j = trace.intervals.last().expect("J_0 present").clone();
            let third = j.width() * Rational::new(1, 3);
            let left = Interval::new(j.lo.clone(), &j.lo + &third);
            let right = Interval::new(&j.hi - &third, j.hi.clone());
            // Two disjoint thirds of a set of measure < 2^(2-level) cannot
            // both weigh 2^(1-level) or more.
            let threshold = Rational::pow2(1 - level as i64);
            let mut chosen = None;
            'stages: for s in 0..=self.budget {
                for candidate in [&left, &right] {
                    let u = upper_closed(&self.mu, candidate, s)?;
                    if u < threshold {
                        chosen = Some((candidate.clone(), u));
                        break 'stages;
                    }
                }
            }
            let (next, u) = chosen.ok_or(Error::PrecisionStall { level })?;
            trace.intervals.push(next);
            trace.upper_bounds.push(u);
        }
        Ok(trace.clone())
    }
}

/// Runs the nested-thirds search on `iv`, returning the limit point and
/// the first `levels + 1` intervals. The returned real extends the search
/// on demand, so evaluating it can fail with `PrecisionStall`.
pub fn find_zero_measure_point(
    mu: &ComputableMeasure,
    iv: &Interval,
    budget: u32,
    levels: usize,
) -> Result<(ApproxReal, ZeroMeasureTrace)> {
    if mu.space() != SpaceId::UnitInterval {
        return Err(Error::SpaceMismatch {
            expected: SpaceId::UnitInterval,
            found: mu.space(),
        });
    }
    if iv.is_point() || iv.lo.is_negative() || iv.hi > Rational::one() {
        return Err(Error::BadParameter(format!(
            "{iv:?} is not a nondegenerate subinterval of [0, 1]"
        )));
    }
    let u0 = upper_closed(mu, iv, budget)?.min(Rational::one());
    let search = Arc::new(Search {
        mu: mu.clone(),
        budget,
        trace: Mutex::new(ZeroMeasureTrace {
            intervals: vec![iv.clone()],
            upper_bounds: vec![u0],
        }),
    });
    let trace = search.extend_to(levels)?;
    let width0 = iv.width();
    let point = ApproxReal::try_from_fn(move |n| {
        // |J_k| = 3^-k |J_0| <= 2^(1-n) puts the midpoint within 2^-n.
        let target = Rational::pow2(1 - n as i64);
        let mut k = 0usize;
        let mut w = width0.clone();
        while w > target {
            w = w * Rational::new(1, 3);
            k += 1;
        }
        let t = search.extend_to(k)?;
        Ok(t.intervals[k].midpoint())
    })
    .with_bound(Rational::one());
    Ok((point, trace))
}

/// A ball around an ideal point whose radius carries a certificate that
/// the sphere of that radius is null.
#[derive(Debug, Clone)]
pub struct AlmostDecidableBall {
    pub center: IdealPoint,
    pub radius: ApproxReal,
    pub certificate: ZeroMeasureTrace,
}

/// `count` radii, one in each equal part of `range`, with
/// `μ{x : d(center, x) = r} = 0`, found on the pushforward of `μ` under
/// the distance to `center`.
pub fn almost_decidable_radii(
    mu: &ComputableMeasure,
    center: &IdealPoint,
    count: usize,
    range: &Interval,
    budget: u32,
    levels: usize,
) -> Result<Vec<AlmostDecidableBall>> {
    center.expect_space(mu.space())?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let nu = pushforward(mu, &Morphism::DistanceTo(center.clone()))?;
    let step = range.width() * Rational::new(1, count as i64);
    (0..count)
        .map(|i| {
            let lo = &range.lo + &(&step * &Rational::integer(i as i64));
            let part = Interval::new(lo.clone(), lo + step.clone());
            let (radius, certificate) = find_zero_measure_point(&nu, &part, budget, levels)?;
            Ok(AlmostDecidableBall {
                center: center.clone(),
                radius,
                certificate,
            })
        })
        .collect()
}
