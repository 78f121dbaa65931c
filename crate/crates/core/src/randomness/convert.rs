use super::{MLTest, SchnorrTest, StrongBCTest};
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Rational};
use crate::spaces::{outer_cover, witness_cover, EffectiveOpen, IdealBall};

/// Least integer `c >= 0` with `2^c > bound`.
pub fn least_exponent(bound: &Rational) -> i64 {
    if *bound < Rational::one() {
        0
    } else {
        let c = bound.ceil_log2();
        if Rational::pow2(c) > *bound {
            c
        } else {
            c + 1
        }
    }
}

/// [`strong_bc_to_schnorr_with`] at the least `c >= 0` with `2^c > sum_upper`.
pub fn strong_bc_to_schnorr(test: &StrongBCTest) -> Result<SchnorrTest> {
    strong_bc_to_schnorr_with(test, least_exponent(test.sum_upper()))
}

/// Level `k` is the set of points in at least `2^(k+c)` of the `C_n`. At
/// stage `t` it lists the witness cover of the stage-`t` lists of
/// `C_1..C_t`. Markov's inequality gives `μ(A_k) <= Σ μ(C_n) / 2^(k+c) < 2^-k`.
pub fn strong_bc_to_schnorr_with(test: &StrongBCTest, c: i64) -> Result<SchnorrTest> {
    if Rational::pow2(c) <= *test.sum_upper() {
        return Err(Error::BadConstant {
            c,
            bound: test.sum_upper().to_string(),
        });
    }
    let space = test.space();
    let levels = {
        let bc = test.clone();
        move |k: u32| {
            let bc = bc.clone();
            EffectiveOpen::from_fn(space, move |t| match threshold(k, c) {
                Some(m) if m <= t as u64 => {
                    witness_cover(space, &stage_lists(&bc, t), m as usize, t)
                }
                _ => Vec::new(),
            })
        }
    };
    let measures = {
        let bc = test.clone();
        move |k: u32| level_measure(&bc, k, c)
    };
    let name = format!("{}/schnorr", test.name());
    let ml = MLTest::new(name, test.measure().clone(), levels);
    Ok(SchnorrTest::new(ml, measures))
}

/// `ceil(2^(k+c))`, or `None` when it does not fit.
fn threshold(k: u32, c: i64) -> Option<u64> {
    let e = k as i64 + c;
    if e >= 63 {
        None
    } else if e <= 0 {
        Some(1)
    } else {
        Some(1u64 << e)
    }
}

fn stage_lists(bc: &StrongBCTest, t: u32) -> Vec<Vec<IdealBall>> {
    (1..=t).map(|n| bc.level(n).stage(t)).collect()
}

/// `μ(A_k)` from stage-`t` data: the inner cover gives a lower bound; the
/// outer cover of the enumerated parts plus the unenumerated mass
/// `Σ μ(C_n) - Σ_{n<=t} μ(C_n[t])` gives an upper bound.
fn level_measure(bc: &StrongBCTest, k: u32, c: i64) -> ApproxReal {
    let bc = bc.clone();
    ApproxReal::try_from_fn(move |p| {
        let Some(m) = threshold(k, c) else {
            return Err(Error::TooLarge(format!("threshold 2^{}", k as i64 + c)));
        };
        let goal = Rational::pow2(1 - p as i64);
        let first = (m as u32).max(p + 2);
        let last = first.saturating_add(bc.budget());
        let mut t = first;
        loop {
            let (lo, hi) = stage_bracket(&bc, m as usize, t)?;
            if &hi - &lo <= goal {
                return Ok((lo + hi).half());
            }
            if t >= last {
                return Err(Error::StageBudgetExceeded { budget: last });
            }
            t = (t + 1 + t / 4).min(last);
        }
    })
    .with_bound(Rational::one())
}

fn stage_bracket(bc: &StrongBCTest, m: usize, t: u32) -> Result<(Rational, Rational)> {
    let mu = bc.measure();
    let lists = stage_lists(bc, t);
    let inner = witness_cover(bc.space(), &lists, m, t);
    let lo = mu.lower(&inner, t)?;
    let outer = outer_cover(bc.space(), &lists, m, t);
    let outer_hi = Rational::one() - mu.exterior_lower(&outer, t)?;
    let mut enumerated = Rational::zero();
    for list in &lists {
        enumerated += mu.lower(list, t)?;
    }
    let sum_hi = bc.sum().eval(t)? + Rational::pow2(-(t as i64));
    let missing = (sum_hi - enumerated).max(Rational::zero());
    let hi = (outer_hi + missing).min(Rational::one());
    Ok((lo.clone(), hi.max(lo)))
}
