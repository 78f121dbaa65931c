use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::birkhoff::{correlation, IntTable, ENUM_LIMIT};
use super::observable::Observable;
use super::system::DynSystem;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::spaces::{IdealBall, SpaceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMode {
    Exact,
    Chebyshev,
}

/// Largest `n` accepted by the exact deviation count.
pub const DEVIATION_LIMIT: u64 = 1024;

/// Largest window length for exact deviation counts.
const DEPTH_LIMIT: usize = 12;

fn symbolic_table(sys: &DynSystem, f: &Observable) -> Result<IntTable> {
    if !sys.is_symbolic() {
        return Err(Error::UnsupportedObservable(format!(
            "exact deviations need the shift or doubling map, not {sys:?}"
        )));
    }
    if f.space() != sys.space() {
        return Err(Error::SpaceMismatch {
            expected: sys.space(),
            found: f.space(),
        });
    }
    let mut t = IntTable::new(f)?;
    if t.depth == 0 {
        t = IntTable {
            depth: 1,
            scale: t.scale,
            values: vec![t.values[0]; 2],
        };
    }
    if t.depth > DEPTH_LIMIT {
        return Err(Error::TooLarge(format!(
            "observable reads {} digits",
            t.depth
        )));
    }
    Ok(t)
}

/// Number of words of length `n + L - 1` for each value of the scaled sum
/// `D S_n`, by a transfer count over the last `L - 1` digits.
fn sum_distribution(t: &IntTable, n: u64) -> BTreeMap<i128, BigUint> {
    let keep = (1usize << (t.depth - 1)) - 1;
    let mut layer: BTreeMap<(usize, i128), BigUint> = BTreeMap::new();
    for s in 0..=keep {
        layer.insert((s, 0), BigUint::from(1u8));
    }
    for _ in 0..n {
        let mut next: BTreeMap<(usize, i128), BigUint> = BTreeMap::new();
        for ((s, sum), count) in &layer {
            for b in 0..2usize {
                let idx = (s << 1 | b) & t.mask();
                let key = (idx & keep, sum + t.values[idx] as i128);
                *next.entry(key).or_default() += count;
            }
        }
        layer = next;
    }
    let mut out: BTreeMap<i128, BigUint> = BTreeMap::new();
    for ((_, sum), count) in layer {
        *out.entry(sum).or_default() += count;
    }
    out
}

/// `|avg - mean|` for a scaled sum.
fn deviation_of(t: &IntTable, sum: i128, n: u64, mean: &Rational) -> Rational {
    (t.value(sum) / Rational::integer(n as i64) - mean).abs()
}

/// Whether `δ` avoids every achievable value of `|S_n/n - ∫f|`, so the
/// deviation set is a continuity set of the measure.
pub fn delta_admissible(sys: &DynSystem, f: &Observable, delta: &Rational, n: u64) -> Result<bool> {
    let t = symbolic_table(sys, f)?;
    check_n(n)?;
    let mean = t.mean();
    Ok(sum_distribution(&t, n)
        .keys()
        .all(|&s| deviation_of(&t, s, n, &mean) != *delta))
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParameter("n must be positive".into()));
    }
    if n > DEVIATION_LIMIT {
        return Err(Error::TooLarge(format!("n = {n} > {DEVIATION_LIMIT}")));
    }
    Ok(())
}

/// `μ{x : |S_n f(x)/n - ∫f dμ| > δ}` exactly, or its Chebyshev bound.
///
/// The Chebyshev bound is `Var(S_n/n) / δ²`. For the shift and doubling map
/// the variance is computed exactly from the finitely many nonzero
/// correlations; otherwise it is bounded by
/// `‖f̃‖²/n + 2c/((1-α) n^α)` from the system's correlation bound.
pub fn deviation_measure(
    sys: &DynSystem,
    f: &Observable,
    delta: &Rational,
    n: u64,
    mode: DeviationMode,
) -> Result<Rational> {
    if !delta.is_positive() {
        return Err(Error::BadParameter(format!(
            "delta {delta} must be positive"
        )));
    }
    match mode {
        DeviationMode::Exact => exact_mass(sys, f, delta, n, true),
        DeviationMode::Chebyshev => Ok(variance_bound(sys, f, n)? / (delta * delta)),
    }
}

/// `μ{|S_n f/n - ∫f| > δ}` by counting; `reject_ties` raises
/// [`Error::BadDelta`] when some orbit sits exactly at distance `δ`.
pub(crate) fn exact_mass(
    sys: &DynSystem,
    f: &Observable,
    delta: &Rational,
    n: u64,
    reject_ties: bool,
) -> Result<Rational> {
    let t = symbolic_table(sys, f)?;
    check_n(n)?;
    let mean = t.mean();
    let words = n + t.depth as u64 - 1;
    let mut hit = BigUint::from(0u8);
    for (s, count) in sum_distribution(&t, n) {
        let dev = deviation_of(&t, s, n, &mean);
        if reject_ties && dev == *delta {
            return Err(Error::BadDelta {
                delta: delta.to_string(),
                n,
            });
        }
        if dev > *delta {
            hit += count;
        }
    }
    Ok(Rational::from_bigint(BigInt::from(hit)) * Rational::pow2(-(words as i64)))
}

/// Upper bound on `Var(S_n f / n)`.
pub fn variance_bound(sys: &DynSystem, f: &Observable, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::BadParameter("n must be positive".into()));
    }
    let nn = Rational::integer(n as i64);
    if sys.is_symbolic() {
        let depth = IntTable::new(f)?.depth as u64;
        let c0 = correlation(sys, f, f, 0)?;
        let mut extra = Rational::zero();
        for k in 1..depth.min(n) {
            extra += Rational::integer((n - k) as i64) * correlation(sys, f, f, k)?.abs();
        }
        return Ok(c0 / nn.clone() + Rational::integer(2) * extra / (&nn * &nn));
    }
    let bound = sys
        .mixing()
        .ok_or_else(|| Error::BadParameter(format!("{sys:?} has no correlation bound")))?;
    let alpha = bound.alpha().clone();
    if alpha >= Rational::one() {
        return Err(Error::BadAlpha(alpha.to_string()));
    }
    let mu = sys.measure()?;
    let mean = f.mean(mu)?;
    let squares = match f {
        Observable::Cylinder { .. } => mean.clone(),
        _ => {
            let mut s = Rational::zero();
            for (lo, hi, v) in f.interval_pieces()? {
                let w = mu
                    .closed_cdf(&hi)
                    .zip(mu.closed_cdf(&lo))
                    .map(|(b, a)| b - a);
                s += &v
                    * &v
                    * w.ok_or_else(|| Error::UnsupportedObservable("no closed-form CDF".into()))?;
            }
            s
        }
    };
    let c0 = squares - &mean * &mean;
    let (_, inv) = bound.bound_bracket(0, 0, n);
    Ok(c0 / nn + Rational::integer(2) * inv / (Rational::one() - alpha))
}

/// The deviation set `{x : |S_n/n - ∫f| > δ}` as a finite union of balls:
/// cylinders for the shift, open dyadic intervals for the doubling map
/// (which differ from the half-open cells only at endpoints).
pub fn deviation_cover(
    sys: &DynSystem,
    f: &Observable,
    delta: &Rational,
    n: u64,
) -> Result<Vec<IdealBall>> {
    let t = symbolic_table(sys, f)?;
    check_n(n)?;
    let words = n as usize + t.depth - 1;
    if words > ENUM_LIMIT {
        return Err(Error::TooLarge(format!("{words}-digit deviation words")));
    }
    let mean = t.mean();
    let (vmin, vmax) = (
        *t.values.iter().min().expect("nonempty") as i128,
        *t.values.iter().max().expect("nonempty") as i128,
    );
    let space = sys.space();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(words);
    let search = Search {
        t: &t,
        n,
        delta,
        mean: &mean,
        vmin,
        vmax,
        words,
        space,
    };
    search.run(&mut prefix, 0, &mut out)?;
    Ok(out)
}

struct Search<'a> {
    t: &'a IntTable,
    n: u64,
    delta: &'a Rational,
    mean: &'a Rational,
    vmin: i128,
    vmax: i128,
    words: usize,
    space: SpaceId,
}

impl Search<'_> {
    /// `sum` covers the windows completed by `prefix`.
    fn run(&self, prefix: &mut Vec<bool>, sum: i128, out: &mut Vec<IdealBall>) -> Result<()> {
        let done = (prefix.len() + 1).saturating_sub(self.t.depth) as i128;
        let left = self.n as i128 - done;
        let (lo, hi) = (sum + left * self.vmin, sum + left * self.vmax);
        let dev = |s: i128| deviation_of(self.t, s, self.n, self.mean);
        // Deviation is convex in the sum, so it exceeds δ on [lo, hi] only
        // if the mean is outside and the nearer end exceeds δ.
        let avg = |s: i128| self.t.value(s) / Rational::integer(self.n as i64);
        let all_in = if avg(hi) < *self.mean {
            dev(hi) > *self.delta
        } else if avg(lo) > *self.mean {
            dev(lo) > *self.delta
        } else {
            false
        };
        if all_in {
            out.extend(self.emit(prefix));
            return Ok(());
        }
        if dev(lo) <= *self.delta && dev(hi) <= *self.delta {
            return Ok(());
        }
        if prefix.len() == self.words {
            return Ok(());
        }
        for b in [false, true] {
            prefix.push(b);
            let add = if prefix.len() >= self.t.depth {
                let idx = super::observable::word_index(&prefix[prefix.len() - self.t.depth..]);
                self.t.values[idx] as i128
            } else {
                0
            };
            self.run(prefix, sum + add, out)?;
            prefix.pop();
        }
        Ok(())
    }

    fn emit(&self, prefix: &[bool]) -> Vec<IdealBall> {
        match self.space {
            SpaceId::Cantor => IdealBall::cylinder_pair(prefix).to_vec(),
            SpaceId::UnitInterval => {
                let r = Rational::pow2(-(prefix.len() as i64) - 1);
                let c = crate::spaces::prefix_value(prefix) + r.clone();
                vec![IdealBall::interval(c, r).expect("positive radius")]
            }
        }
    }
}
