use std::fmt;
use std::sync::Arc;

use super::SchnorrTest;
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Rational};
use crate::spaces::{distance, ApproxPoint, IdealBall, IdealPoint, SpaceId};

type WitnessFn = Arc<dyn Fn(u32) -> IdealBall + Send + Sync>;

/// A Schnorr test with balls `B_n ⊆ A_n` of radius `<= 2^-n` whose closures
/// nest: `d(c_n, c_{n+1}) + r_{n+1} < r_n`.
#[derive(Clone)]
pub struct WitnessedTest {
    test: SchnorrTest,
    witness: WitnessFn,
    budget: u32,
}

impl WitnessedTest {
    /// `budget` bounds the stages searched when certifying `B_n ⊆ A_n`.
    pub fn new<F>(test: SchnorrTest, witness: F, budget: u32) -> Self
    where
        F: Fn(u32) -> IdealBall + Send + Sync + 'static,
    {
        WitnessedTest {
            test,
            witness: Arc::new(witness),
            budget,
        }
    }

    pub fn test(&self) -> &SchnorrTest {
        &self.test
    }

    pub fn witness(&self, n: u32) -> IdealBall {
        (self.witness)(n)
    }

    /// Certifies the chain link at level `n >= 1`.
    pub fn check_level(&self, n: u32) -> Result<()> {
        let broken = |reason: String| Error::BrokenWitnessChain { level: n, reason };
        let b = self.witness(n);
        if b.space() != self.test.space() {
            return Err(broken(format!("ball in {}", b.space())));
        }
        if *b.radius() > Rational::pow2(-(n as i64)) {
            return Err(broken(format!("radius {} exceeds 2^-{n}", b.radius())));
        }
        if n > 1 {
            let prev = self.witness(n - 1);
            let reach = distance(prev.center(), b.center())? + b.radius();
            if reach >= *prev.radius() {
                return Err(broken(format!("closure of B_{n} not inside B_{}", n - 1)));
            }
        }
        let level = self.test.level(n);
        for t in 0..=self.budget {
            for a in level.stage(t) {
                if b.within(&a)? {
                    return Ok(());
                }
            }
        }
        Err(broken(format!("B_{n} not certified inside A_{n}")))
    }
}

impl fmt::Debug for WitnessedTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WitnessedTest({:?})", self.test.name())
    }
}

/// The limit of the witness centers, which lies in every `B_n ⊆ A_n`.
/// Levels `1..=check` are certified up front; deeper links are certified
/// as the oracle reaches them.
pub fn construct_failing_point(t: &WitnessedTest, check: u32) -> Result<ApproxPoint> {
    for n in 1..=check {
        t.check_level(n)?;
    }
    let space = t.test().space();
    let t = t.clone();
    let center = move |n: u32| -> Result<IdealPoint> {
        if n > check {
            t.check_level(n)?;
        }
        Ok(t.witness(n).center().clone())
    };
    Ok(match space {
        SpaceId::Cantor => ApproxPoint::cantor(move |n| {
            let c = center(n as u32 + 1)?;
            let w = c.as_word().unwrap_or(&[]);
            Ok((0..n).map(|i| w.get(i).copied().unwrap_or(false)).collect())
        }),
        SpaceId::UnitInterval => ApproxPoint::interval(
            ApproxReal::try_from_fn(move |n| {
                let c = center(n + 1)?;
                Ok(c.as_rational().cloned().unwrap_or_else(Rational::zero))
            })
            .with_bound(Rational::one()),
        ),
    })
}

/// Concatenated constant blocks: block `i >= 1` has length `base^i` and is
/// all zeros for odd `i`, all ones for even `i`.
pub fn oscillating_point(base: u64) -> Result<ApproxPoint> {
    if base < 2 {
        return Err(Error::BadParameter(format!("block base {base} < 2")));
    }
    Ok(ApproxPoint::cantor(move |n| {
        let mut out = Vec::with_capacity(n);
        let mut len = base;
        let mut odd = true;
        while out.len() < n {
            let take = (n - out.len()).min(usize::try_from(len).unwrap_or(usize::MAX));
            out.extend(std::iter::repeat_n(!odd, take));
            len = len.saturating_mul(base);
            odd = !odd;
        }
        Ok(out)
    }))
}

/// Position just after block `i` of [`oscillating_point`].
pub fn oscillating_block_end(base: u64, i: u32) -> u64 {
    (1..=i).map(|j| base.pow(j)).sum()
}

/// Number of ones among the first `n` bits of [`oscillating_point`].
pub fn oscillating_ones(base: u64, n: u64) -> u64 {
    let (mut pos, mut len, mut ones, mut odd) = (0u64, base, 0u64, true);
    while pos < n {
        let take = (n - pos).min(len);
        if !odd {
            ones += take;
        }
        pos += take;
        len = len.saturating_mul(base);
        odd = !odd;
    }
    ones
}
