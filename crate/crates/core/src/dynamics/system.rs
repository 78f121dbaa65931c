use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Interval, Rational};
use crate::measures::ComputableMeasure;
use crate::spaces::{ApproxPoint, SpaceId};

use super::mixing::CorrelationBound;

#[derive(Clone)]
pub enum SystemKind {
    /// The left shift on Cantor space.
    Shift,
    /// `x ↦ 2x mod 1`.
    Doubling,
    /// `x ↦ x + x^(1+s) mod 1`.
    MannevillePomeau { s: Rational },
    /// `x ↦ x + θ mod 1`.
    Rotation { theta: ApproxReal },
}

/// A map with its invariant measure (when one is available in closed form).
#[derive(Clone)]
pub struct DynSystem {
    kind: SystemKind,
    measure: Option<ComputableMeasure>,
    mixing: Option<CorrelationBound>,
}

impl DynSystem {
    /// The shift with the fair coin measure.
    pub fn shift() -> Self {
        let measure = ComputableMeasure::bernoulli(Rational::new(1, 2)).expect("fair coin");
        DynSystem {
            kind: SystemKind::Shift,
            measure: Some(measure),
            mixing: None,
        }
    }

    pub fn doubling() -> Self {
        DynSystem {
            kind: SystemKind::Doubling,
            measure: Some(ComputableMeasure::lebesgue()),
            mixing: None,
        }
    }

    /// `s > 0` with denominator at most 4. The invariant measure has no
    /// closed form here, so none is attached.
    pub fn manneville_pomeau(s: Rational) -> Result<Self> {
        if !s.is_positive() || *s.denom() > 4.into() {
            return Err(Error::BadParameter(format!(
                "exponent {s} must be positive with denominator <= 4"
            )));
        }
        Ok(DynSystem {
            kind: SystemKind::MannevillePomeau { s },
            measure: None,
            mixing: None,
        })
    }

    pub fn rotation(theta: ApproxReal) -> Self {
        DynSystem {
            kind: SystemKind::Rotation { theta },
            measure: Some(ComputableMeasure::lebesgue()),
            mixing: None,
        }
    }

    pub fn with_mixing(mut self, bound: CorrelationBound) -> Self {
        self.mixing = Some(bound);
        self
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn mixing(&self) -> Option<&CorrelationBound> {
        self.mixing.as_ref()
    }

    pub fn space(&self) -> SpaceId {
        match self.kind {
            SystemKind::Shift => SpaceId::Cantor,
            _ => SpaceId::UnitInterval,
        }
    }

    pub fn measure(&self) -> Result<&ComputableMeasure> {
        self.measure.as_ref().ok_or_else(|| {
            Error::BadParameter(format!("{self:?} has no closed-form invariant measure"))
        })
    }

    /// Shift and doubling, where cylinder observables give exact answers.
    pub fn is_symbolic(&self) -> bool {
        matches!(self.kind, SystemKind::Shift | SystemKind::Doubling)
    }

    /// Growth factor bound for enclosure widths per step.
    fn lipschitz_bits(&self) -> u32 {
        match &self.kind {
            SystemKind::Shift | SystemKind::Rotation { .. } => 0,
            SystemKind::Doubling => 1,
            SystemKind::MannevillePomeau { s } => (Rational::integer(2) + s).ceil_log2() as u32,
        }
    }

    /// One step on an exact rational, when the result is again rational.
    pub fn step_exact(&self, x: &Rational) -> Option<Rational> {
        match &self.kind {
            SystemKind::Shift => None,
            SystemKind::Doubling => Some((x * &Rational::integer(2)).fract()),
            SystemKind::MannevillePomeau { s } if s.is_integer() => {
                let e = 1 + s.numer().try_into().unwrap_or(0u32);
                Some((x + &x.pow(e)).fract())
            }
            SystemKind::MannevillePomeau { .. } => None,
            SystemKind::Rotation { theta } => theta.as_exact().map(|t| (x + t).fract()),
        }
    }

    /// One step on an enclosure, rounded outward to the `2^-bits` grid.
    /// Fails with `PrecisionExhausted { step }` when the image may reach the
    /// cut at 1 or is wider than 1/2.
    pub fn step_interval(&self, iv: &Interval, bits: u32, step: u64) -> Result<Interval> {
        let exhausted = Error::PrecisionExhausted { step };
        let (lo, hi) = match &self.kind {
            SystemKind::Shift => {
                return Err(Error::SpaceMismatch {
                    expected: SpaceId::UnitInterval,
                    found: SpaceId::Cantor,
                })
            }
            SystemKind::Doubling => (
                &iv.lo * &Rational::integer(2),
                &iv.hi * &Rational::integer(2),
            ),
            SystemKind::MannevillePomeau { s } => {
                let e = s + &Rational::one();
                let (num, den) = (
                    e.numer().try_into().map_err(|_| exhausted.clone())?,
                    e.denom().try_into().map_err(|_| exhausted.clone())?,
                );
                let a = iv.lo.clone().max(Rational::zero());
                let b = iv.hi.clone().min(Rational::one());
                let (pa, _) = a.root_bounds(num, den, bits + 2);
                let (_, pb) = b.root_bounds(num, den, bits + 2);
                (a + pa, b + pb)
            }
            SystemKind::Rotation { theta } => {
                let t = theta.enclosure(bits + 2)?;
                (&iv.lo + &t.lo, &iv.hi + &t.hi)
            }
        };
        let (lo, hi) = (lo.floor_dyadic(bits), hi.ceil_dyadic(bits));
        let k = Rational::from_bigint(lo.floor());
        let out = Interval::new(&lo - &k, &hi - &k);
        if (out.hi >= Rational::one() && !out.is_point()) || out.width() > Rational::new(1, 2) {
            return Err(exhausted);
        }
        Ok(out)
    }

    /// Enclosures of `x, T x, ..., T^n x` on the `2^-bits` grid.
    pub fn orbit_enclosure(&self, x0: &Interval, n: u64, bits: u32) -> Result<Vec<Interval>> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut cur = Interval::new(x0.lo.floor_dyadic(bits), x0.hi.ceil_dyadic(bits));
        out.push(cur.clone());
        for step in 1..=n {
            cur = self.step_interval(&cur, bits, step)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Working precision that leaves about `target` bits after `n` steps.
    pub fn working_bits(&self, n: u64, target: u32) -> u32 {
        let grow = (self.lipschitz_bits() as u64)
            .saturating_mul(n)
            .min(1 << 20) as u32;
        target + grow + 16
    }
}

impl fmt::Debug for DynSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SystemKind::Shift => write!(f, "shift"),
            SystemKind::Doubling => write!(f, "doubling"),
            SystemKind::MannevillePomeau { s } => write!(f, "manneville_pomeau(s = {s})"),
            SystemKind::Rotation { theta } => write!(f, "rotation({theta:?})"),
        }
    }
}

/// `T^n x`. The shift drops `n` symbols; interval maps are exact on exact
/// rationals where possible and otherwise follow validated enclosures.
pub fn iterate(sys: &DynSystem, x: &ApproxPoint, n: u64) -> Result<ApproxPoint> {
    if x.space() != sys.space() {
        return Err(Error::SpaceMismatch {
            expected: sys.space(),
            found: x.space(),
        });
    }
    if let SystemKind::Shift = sys.kind {
        let x = x.clone();
        let skip = usize::try_from(n).map_err(|_| Error::TooLarge(format!("shift by {n}")))?;
        return Ok(ApproxPoint::cantor(move |k| {
            Ok(x.bits(k + skip)?[skip..].to_vec())
        }));
    }
    let real = x.real().expect("interval point").clone();
    if let Some(q) = real.as_exact() {
        let mut cur = q.clone();
        let mut exact = true;
        for _ in 0..n {
            match sys.step_exact(&cur) {
                Some(next) if next.denom().bits() < 4096 => cur = next,
                _ => {
                    exact = false;
                    break;
                }
            }
        }
        if exact {
            return Ok(ApproxPoint::interval(ApproxReal::constant(cur)));
        }
    }
    let sys = sys.clone();
    Ok(ApproxPoint::interval(
        ApproxReal::try_from_fn(move |p| {
            let base = sys.working_bits(n, p + 1);
            let mut last = Error::PrecisionExhausted { step: 0 };
            for extra in [0u32, 16, 64, 256] {
                let bits = base + extra;
                let x0 = real.enclosure(bits)?;
                match sys.orbit_enclosure(&x0, n, bits) {
                    Ok(orbit) => {
                        let end = orbit.last().expect("nonempty orbit");
                        if end.width() <= Rational::pow2(1 - p as i64) {
                            return Ok(end.midpoint());
                        }
                        last = Error::PrecisionExhausted { step: n };
                    }
                    Err(e) => last = e,
                }
            }
            Err(last)
        })
        .with_bound(Rational::one()),
    ))
}
