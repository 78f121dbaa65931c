//! Computable and semi-computable reals as precision oracles.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use serde::{Deserialize, Serialize};

use super::{Interval, Rational};
use crate::error::{Error, Result};

type Oracle = Arc<dyn Fn(u32) -> Result<Rational> + Send + Sync>;

/// A real number presented by an oracle `n -> q_n` with `|x - q_n| <= 2^-n`.
///
/// Oracles are pure: the same precision always yields the same rational.
/// They are fallible only for reals built from budgeted searches (semi-real
/// meets, CDF inverses, zero-measure points); the closed-form constructors
/// never fail.
#[derive(Clone)]
pub struct ApproxReal {
    oracle: Oracle,
    bound: Option<Rational>,
    exact: Option<Rational>,
}

/// One `(precision, value)` evaluation, the JSON form of an approximate real.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub precision: u32,
    pub value: Rational,
}

impl ApproxReal {
    pub fn constant(q: Rational) -> Self {
        let bound = Some(q.abs());
        let exact = Some(q.clone());
        ApproxReal {
            oracle: Arc::new(move |_| Ok(q.clone())),
            bound,
            exact,
        }
    }

    /// Wraps a total oracle. The caller guarantees the `2^-n` contract.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(u32) -> Rational + Send + Sync + 'static,
    {
        ApproxReal {
            oracle: Arc::new(move |n| Ok(f(n))),
            bound: None,
            exact: None,
        }
    }

    /// Wraps a fallible oracle. The caller guarantees the `2^-n` contract
    /// whenever the oracle succeeds.
    pub fn try_from_fn<F>(f: F) -> Self
    where
        F: Fn(u32) -> Result<Rational> + Send + Sync + 'static,
    {
        ApproxReal {
            oracle: Arc::new(f),
            bound: None,
            exact: None,
        }
    }

    /// Attaches a magnitude bound `|x| <= bound`, required by multiplication.
    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound = Some(bound.abs());
        self
    }

    pub fn bound(&self) -> Option<&Rational> {
        self.bound.as_ref()
    }

    /// The value, when the real was built from a known rational.
    pub fn as_exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn eval(&self, n: u32) -> Result<Rational> {
        (self.oracle)(n)
    }

    /// Closed enclosure `[q_n - 2^-n, q_n + 2^-n]` of the represented real.
    pub fn enclosure(&self, n: u32) -> Result<Interval> {
        let q = self.eval(n)?;
        Ok(Interval::around(&q, &Rational::pow2(-(n as i64))))
    }

    pub fn evaluation(&self, n: u32) -> Result<Evaluation> {
        Ok(Evaluation {
            precision: n,
            value: self.eval(n)?,
        })
    }

    /// `sqrt(q)` for `q >= 0`, truncated on the `2^-n` grid scaled by `q`'s
    /// denominator.
    pub fn sqrt(q: Rational) -> Self {
        assert!(!q.is_negative(), "sqrt of a negative rational");
        let bound = Rational::one().max(q.clone());
        let (p, d) = (q.numer().clone(), q.denom().clone());
        ApproxReal::from_fn(move |n| {
            // sqrt(p/d) = sqrt(p*d*4^n) / (d*2^n); the floor loses < 1/(d*2^n).
            let radicand = &p * &d * (BigInt::from(1) << (2 * n as usize));
            let root = radicand
                .to_biguint()
                .map(|r| BigInt::from_biguint(Sign::Plus, r.sqrt()))
                .unwrap_or_default();
            Rational::from_bigints(root, &d << n as usize)
        })
        .with_bound(bound)
    }

    /// Sum of a series given a certified tail bound: `tail(k)` must dominate
    /// `|sum_{i >= k} term(i)|`.
    pub fn series<T, B>(term: T, tail: B) -> Self
    where
        T: Fn(usize) -> Rational + Send + Sync + 'static,
        B: Fn(usize) -> Rational + Send + Sync + 'static,
    {
        ApproxReal::from_fn(move |n| {
            let eps = Rational::pow2(-(n as i64));
            let mut sum = Rational::zero();
            let mut k = 0usize;
            while tail(k) > eps {
                sum += term(k);
                k += 1;
            }
            sum
        })
    }

    /// `sum_{i >= 0} a r^i` for `|r| < 1`.
    pub fn geometric(a: Rational, r: Rational) -> Self {
        assert!(
            r.abs() < Rational::one(),
            "geometric ratio must satisfy |r| < 1"
        );
        let denom = Rational::one() - r.abs();
        let (a2, r2) = (a.clone(), r.clone());
        let bound = a.abs() / denom.clone();
        ApproxReal::series(
            move |i| &a2 * &r2.pow(i as u32),
            move |k| &a.abs() * &r.abs().pow(k as u32) / &denom,
        )
        .with_bound(bound)
    }

    pub fn add(&self, other: &ApproxReal) -> ApproxReal {
        combine(Op::Add, &[self.clone(), other.clone()]).expect("binary add")
    }

    pub fn neg(&self) -> ApproxReal {
        combine(Op::Negate, std::slice::from_ref(self)).expect("unary negate")
    }
}

impl fmt::Debug for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eval(20) {
            Ok(q) => write!(f, "ApproxReal(~{:.8})", q.to_f64()),
            Err(e) => write!(f, "ApproxReal(<{e}>)"),
        }
    }
}

/// Evaluate `x` at precision `n`.
pub fn eval(x: &ApproxReal, n: u32) -> Result<Rational> {
    x.eval(n)
}

/// Operations accepted by [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Add,
    Sub,
    Mul,
    Negate,
    Max,
    Min,
    Abs,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Negate => "negate",
            Op::Max => "max",
            Op::Min => "min",
            Op::Abs => "abs",
        }
    }
}

fn ceil_log2_usize(m: usize) -> u32 {
    usize::BITS - (m.max(1) - 1).leading_zeros()
}

/// Folds operands with `op`.
///
/// Each operand is evaluated at `n + ceil(log2 m) + 1`, so `m` errors of
/// size `2^-(n+ceil(log2 m)+1)` add up to at most `2^-(n+1)`. `sub` is the
/// left fold `x0 - x1 - ...`. `mul` additionally spends `ceil(log2 prod(B_i+1))`
/// bits to absorb the magnitude of the other factors, so every operand
/// must carry a bound.
pub fn combine(op: Op, xs: &[ApproxReal]) -> Result<ApproxReal> {
    if xs.is_empty() {
        return Err(Error::EmptyOperands);
    }
    if matches!(op, Op::Negate | Op::Abs) && xs.len() != 1 {
        return Err(Error::Arity {
            op: op.name(),
            expected: 1,
            got: xs.len(),
        });
    }
    let m = xs.len();
    let extra = ceil_log2_usize(m) + 1;
    let operands: Vec<ApproxReal> = xs.to_vec();
    let all_bounds: Option<Vec<Rational>> = xs.iter().map(|x| x.bound().cloned()).collect();

    let result = match op {
        Op::Add | Op::Sub => ApproxReal::try_from_fn(move |n| {
            let mut acc = operands[0].eval(n + extra)?;
            for x in &operands[1..] {
                let v = x.eval(n + extra)?;
                if op == Op::Add {
                    acc += v;
                } else {
                    acc -= &v;
                }
            }
            Ok(acc)
        }),
        Op::Negate => ApproxReal::try_from_fn(move |n| Ok(-operands[0].eval(n)?)),
        Op::Abs => ApproxReal::try_from_fn(move |n| Ok(operands[0].eval(n)?.abs())),
        Op::Max | Op::Min => ApproxReal::try_from_fn(move |n| {
            let mut acc = operands[0].eval(n)?;
            for x in &operands[1..] {
                let v = x.eval(n)?;
                acc = if op == Op::Max {
                    acc.max(v)
                } else {
                    acc.min(v)
                };
            }
            Ok(acc)
        }),
        Op::Mul => {
            let bounds = all_bounds.clone().ok_or(Error::MissingBound)?;
            let slack: Rational = bounds
                .iter()
                .fold(Rational::one(), |acc, b| acc * (b + &Rational::one()));
            let mag_bits = slack.ceil_log2().max(0) as u32;
            ApproxReal::try_from_fn(move |n| {
                let p = n + extra + mag_bits;
                let mut acc = Rational::one();
                for x in &operands {
                    acc = acc * x.eval(p)?;
                }
                Ok(acc)
            })
        }
    };

    let bound = all_bounds.map(|bs| match op {
        Op::Add | Op::Sub => bs.iter().sum(),
        Op::Mul => bs.iter().fold(Rational::one(), |acc, b| acc * b),
        Op::Negate | Op::Abs | Op::Max | Op::Min => {
            bs.into_iter().fold(Rational::zero(), Rational::max)
        }
    });
    Ok(match bound {
        Some(b) => result.with_bound(b),
        None => result,
    })
}

/// Direction of a semi-computable real's monotone stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// A lower (non-decreasing) or upper (non-increasing) rational stream
/// converging to a real.
#[derive(Clone)]
pub struct SemiReal {
    direction: Direction,
    stream: Arc<dyn Fn(u32) -> Rational + Send + Sync>,
}

impl SemiReal {
    pub fn lower<F>(f: F) -> Self
    where
        F: Fn(u32) -> Rational + Send + Sync + 'static,
    {
        SemiReal {
            direction: Direction::Lower,
            stream: Arc::new(f),
        }
    }

    pub fn upper<F>(f: F) -> Self
    where
        F: Fn(u32) -> Rational + Send + Sync + 'static,
    {
        SemiReal {
            direction: Direction::Upper,
            stream: Arc::new(f),
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn at(&self, stage: u32) -> Rational {
        (self.stream)(stage)
    }

    /// Checks monotonicity on stages `0..=upto`; returns the first offending
    /// stage.
    pub fn check_monotone(&self, upto: u32) -> Option<u32> {
        let mut prev = self.at(0);
        for t in 1..=upto {
            let cur = self.at(t);
            let ok = match self.direction {
                Direction::Lower => cur >= prev,
                Direction::Upper => cur <= prev,
            };
            if !ok {
                return Some(t);
            }
            prev = cur;
        }
        None
    }
}

/// Meets a lower and an upper semi-computable presentation of the same real.
///
/// Evaluation at `n` advances both streams until the gap is at most `2^-n`
/// and returns the midpoint; `max_stage` caps the search.
pub fn semis_to_computable(lo: SemiReal, hi: SemiReal, max_stage: u32) -> Result<ApproxReal> {
    if lo.direction != Direction::Lower || hi.direction != Direction::Upper {
        return Err(Error::BadParameter(
            "semis_to_computable needs (lower, upper) streams".into(),
        ));
    }
    Ok(ApproxReal::try_from_fn(move |n| {
        let eps = Rational::pow2(-(n as i64));
        for t in 0..=max_stage {
            let l = lo.at(t);
            let h = hi.at(t);
            if &h - &l <= eps {
                return Ok((l + h).half());
            }
        }
        Err(Error::StageBudgetExceeded { budget: max_stage })
    }))
}

/// Outcome of a certified comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Less,
    Greater,
    Unseparated,
}

/// Certified strict comparison at precision `n`. Decisive answers are always
/// correct; equality is never certified.
pub fn separate(x: &ApproxReal, y: &ApproxReal, n: u32) -> Result<Separation> {
    let gap = x.eval(n)? - y.eval(n)?;
    let margin = Rational::pow2(1 - n as i64);
    Ok(if gap > margin {
        Separation::Greater
    } else if gap < -margin {
        Separation::Less
    } else {
        Separation::Unseparated
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Independent bisection oracle: a 64-digit-ish bracket for sqrt(2).
    fn sqrt2_bracket() -> (Rational, Rational) {
        let mut lo = q(1, 1);
        let mut hi = q(2, 1);
        for _ in 0..220 {
            let mid = (&lo + &hi).half();
            if &mid * &mid < q(2, 1) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    fn within(value: &Rational, target: &(Rational, Rational), n: u32) -> bool {
        let eps = Rational::pow2(-(n as i64));
        (value - &target.0).abs() <= eps && (value - &target.1).abs() <= eps
    }

    #[test]
    fn constant_is_exact() {
        assert_eq!(eval(&ApproxReal::constant(q(1, 3)), 10).unwrap(), q(1, 3));
    }

    #[test]
    fn sqrt2_against_bisection_oracle() {
        let oracle = sqrt2_bracket();
        let s = ApproxReal::sqrt(q(2, 1));
        for n in 0..=30 {
            assert!(within(&s.eval(n).unwrap(), &oracle, n), "n = {n}");
        }
    }

    #[test]
    fn precision_zero_contract() {
        let x = ApproxReal::sqrt(q(1, 2));
        let v = x.eval(0).unwrap();
        let exact = sqrt2_bracket().0 / q(2, 1);
        assert!((&v - &exact).abs() <= q(1, 1));
    }

    #[test]
    fn combine_examples() {
        let half = ApproxReal::constant(q(1, 2));
        let sum = combine(Op::Add, &[half.clone(), half]).unwrap();
        for n in [0, 5, 40] {
            assert_eq!(sum.eval(n).unwrap(), q(1, 1));
        }

        let two = ApproxReal::constant(q(2, 1));
        let prod = combine(Op::Mul, &[two, ApproxReal::sqrt(q(2, 1))]).unwrap();
        let (lo, hi) = sqrt2_bracket();
        let target = (&lo * &q(2, 1), &hi * &q(2, 1));
        assert!(within(&prod.eval(4).unwrap(), &target, 4));

        let abs = combine(Op::Abs, &[ApproxReal::constant(q(-3, 4))]).unwrap();
        assert_eq!(abs.eval(8).unwrap(), q(3, 4));
    }

    #[test]
    fn mul_without_bound_fails() {
        let unbounded = ApproxReal::from_fn(|_| q(1, 1));
        let err = combine(Op::Mul, &[unbounded, ApproxReal::constant(q(1, 1))]).unwrap_err();
        assert_eq!(err, Error::MissingBound);
        assert_eq!(combine(Op::Add, &[]).unwrap_err(), Error::EmptyOperands);
    }

    #[test]
    fn semis_meet() {
        let lo = SemiReal::lower(|t| q(1, 1) - Rational::pow2(-(t as i64)));
        let hi = SemiReal::upper(|t| q(1, 1) + Rational::pow2(-(t as i64)));
        let x = semis_to_computable(lo, hi, 100).unwrap();
        assert!((x.eval(3).unwrap() - q(1, 1)).abs() <= q(1, 8));

        // Partial sums of sum_{i<=t} 2^-i converge to 2 from below.
        let lo = SemiReal::lower(|t| q(2, 1) - Rational::pow2(-(t as i64)));
        let hi = SemiReal::upper(|_| q(2, 1));
        assert!(lo.check_monotone(50).is_none());
        let x = semis_to_computable(lo, hi, 100).unwrap();
        assert!((x.eval(5).unwrap() - q(2, 1)).abs() <= q(1, 32));

        let lo = SemiReal::lower(|_| q(0, 1));
        let hi = SemiReal::upper(|_| q(1, 1));
        let x = semis_to_computable(lo, hi, 100).unwrap();
        assert_eq!(
            x.eval(1).unwrap_err(),
            Error::StageBudgetExceeded { budget: 100 }
        );
    }

    #[test]
    fn separate_examples() {
        let zero = ApproxReal::constant(q(0, 1));
        let one = ApproxReal::constant(q(1, 1));
        assert_eq!(separate(&zero, &one, 2).unwrap(), Separation::Less);
        let half = ApproxReal::constant(q(1, 2));
        assert_eq!(separate(&half, &half, 20).unwrap(), Separation::Unseparated);
        let s = ApproxReal::sqrt(q(2, 1));
        assert_eq!(
            separate(&s, &ApproxReal::constant(q(3, 2)), 6).unwrap(),
            Separation::Less
        );
    }

    #[test]
    fn geometric_series_matches_closed_form() {
        // 1 + 1/2 + 1/4 + ... = 2
        let g = ApproxReal::geometric(q(1, 1), q(1, 2));
        for n in 0..=30 {
            assert!((g.eval(n).unwrap() - q(2, 1)).abs() <= Rational::pow2(-(n as i64)));
        }
    }
}
