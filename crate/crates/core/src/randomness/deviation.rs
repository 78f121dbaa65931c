use std::sync::{Arc, OnceLock};

use super::StrongBCTest;
use crate::dynamics::{
    correlation, deviation_cover, deviation_exact_mass as exact_mass, DynSystem, Observable,
    SubsequenceSchedule, DEVIATION_LIMIT, ENUM_LIMIT,
};
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Rational};
use crate::spaces::{EffectiveOpen, IdealBall};

/// Level `i` is the deviation set `{x : |S_{n_i}/n_i - ∫f| > δ}`.
///
/// Levels are enumerated from stage `n_i + L - 1` on, where `L` is the
/// number of digits `f` reads; levels longer than the enumeration limit list
/// nothing. The sum of the level measures is computed from exact level
/// measures plus the Chebyshev tail `K/δ² Σ_{i>=I} n_i^-1` with
/// `K = C_0 + 2 Σ_{0<k<L} |C_k|`.
pub fn deviation_schnorr_test(
    sys: &DynSystem,
    f: &Observable,
    delta: &Rational,
    schedule: &SubsequenceSchedule,
) -> Result<StrongBCTest> {
    let table = crate::dynamics::IntTable::new(f)?;
    if !sys.is_symbolic() {
        return Err(Error::UnsupportedObservable(format!(
            "{sys:?} has no exact deviation sets"
        )));
    }
    let depth = table.depth.max(1) as u64;
    let mut k = correlation(sys, f, f, 0)?;
    for lag in 1..depth {
        k += Rational::integer(2) * correlation(sys, f, f, lag)?.abs();
    }
    let weight = k / (delta * delta);

    let levels = {
        let (sys, f, delta, schedule) = (sys.clone(), f.clone(), delta.clone(), schedule.clone());
        let cache: Arc<Vec<OnceLock<Vec<IdealBall>>>> =
            Arc::new((0..64).map(|_| OnceLock::new()).collect());
        move |i: u32| {
            let space = sys.space();
            let n = match schedule.index(i.max(1) as u64) {
                Ok(n) => n,
                Err(_) => return EffectiveOpen::empty(space),
            };
            let words = n + depth - 1;
            let (sys, f, delta, cache) = (sys.clone(), f.clone(), delta.clone(), cache.clone());
            EffectiveOpen::from_fn(space, move |t| {
                if i == 0 || words > ENUM_LIMIT as u64 || words > t as u64 {
                    return Vec::new();
                }
                let compute = || deviation_cover(&sys, &f, &delta, n).unwrap_or_default();
                match cache.get(i as usize) {
                    Some(cell) => cell.get_or_init(compute).clone(),
                    None => compute(),
                }
            })
        }
    };

    let head = |upto: u64| -> Result<Rational> {
        let mut s = Rational::zero();
        for i in 1..upto {
            s += exact_mass(sys, f, delta, schedule.index(i)?, false)?;
        }
        Ok(s)
    };
    let mut start = 1u64;
    while schedule.index(start)? <= 64 {
        start += 1;
    }
    let sum_upper = head(start)? + &weight * &schedule.inverse_tail(start)?;

    let sum = {
        let (sys, f, delta, schedule) = (sys.clone(), f.clone(), delta.clone(), schedule.clone());
        ApproxReal::try_from_fn(move |p| {
            let goal = Rational::pow2(-(p as i64));
            let mut i = 1u64;
            let mut s = Rational::zero();
            loop {
                let tail = &weight * &schedule.inverse_tail(i)?;
                if tail <= goal {
                    return Ok(s + tail.half());
                }
                let n = schedule.index(i)?;
                if n > DEVIATION_LIMIT {
                    return Err(Error::TooLarge(format!("level {i} needs n = {n}")));
                }
                s += exact_mass(&sys, &f, &delta, n, false)?;
                i += 1;
            }
        })
        .with_bound(sum_upper.clone())
    };
    let name = format!("deviation({sys:?}, delta = {delta})");
    Ok(StrongBCTest::new(
        name,
        sys.measure()?.clone(),
        levels,
        sum,
        sum_upper,
    ))
}
