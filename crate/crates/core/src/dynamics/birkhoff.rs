use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::observable::Observable;
use super::system::{DynSystem, SystemKind};
use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::isomorphism::binary_expand;
use crate::spaces::ApproxPoint;

/// An exact value or a validated enclosure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Average {
    Exact(Rational),
    Enclosure { lo: Rational, hi: Rational },
}

impl Average {
    pub fn interval(&self) -> Interval {
        match self {
            Average::Exact(q) => Interval::point(q.clone()),
            Average::Enclosure { lo, hi } => Interval::new(lo.clone(), hi.clone()),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Average::Exact(q) => Some(q),
            Average::Enclosure { .. } => None,
        }
    }

    /// Midpoint, the value itself when exact.
    pub fn value(&self) -> Rational {
        self.interval().midpoint()
    }

    fn from_interval(iv: Interval) -> Self {
        if iv.is_point() {
            Average::Exact(iv.lo)
        } else {
            Average::Enclosure {
                lo: iv.lo,
                hi: iv.hi,
            }
        }
    }
}

/// A cylinder-form table scaled to integers: `f = values[k] / scale`.
pub(crate) struct IntTable {
    pub depth: usize,
    pub scale: BigInt,
    pub values: Vec<i64>,
}

impl IntTable {
    pub fn new(f: &Observable) -> Result<Self> {
        let (depth, table) = f.cylinder_form().ok_or_else(|| {
            Error::UnsupportedObservable(format!("{f:?} has no dyadic cylinder form"))
        })?;
        let scale = table
            .iter()
            .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        let values = table
            .iter()
            .map(|v| {
                let k = (v * &Rational::from_bigint(scale.clone())).floor();
                i64::try_from(&k).map_err(|_| Error::TooLarge(format!("observable value {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntTable {
            depth,
            scale,
            values,
        })
    }

    pub fn value(&self, scaled: i128) -> Rational {
        Rational::from_bigints(BigInt::from(scaled), self.scale.clone())
    }

    /// Mean under the uniform measure on words of length `depth`.
    pub fn mean(&self) -> Rational {
        let total: i128 = self.values.iter().map(|&v| v as i128).sum();
        self.value(total) * Rational::pow2(-(self.depth as i64))
    }

    pub fn mask(&self) -> usize {
        (1usize << self.depth) - 1
    }
}

fn check_ns(ns: &[u64]) -> Result<u64> {
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter(
            "sample sizes must be positive and strictly increasing".into(),
        ));
    }
    Ok(*ns.last().expect("nonempty"))
}

/// Running sums over the windows of a digit sequence; `digits` has at least
/// `n_max + depth - 1` entries.
fn window_averages(table: &IntTable, digits: &[bool], ns: &[u64]) -> Vec<Average> {
    let mask = table.mask();
    let mut idx = 0usize;
    for &b in &digits[..table.depth.saturating_sub(1)] {
        idx = (idx << 1 | b as usize) & mask;
    }
    let mut out = Vec::with_capacity(ns.len());
    let mut sum: i128 = 0;
    let mut next = ns.iter().peekable();
    let lag = table.depth.saturating_sub(1);
    for i in 0..*ns.last().expect("nonempty") as usize {
        if table.depth > 0 {
            idx = (idx << 1 | digits[i + lag] as usize) & mask;
        }
        sum += table.values[idx] as i128;
        if next.peek().is_some_and(|&&n| n == i as u64 + 1) {
            let n = next.next().expect("peeked");
            out.push(Average::Exact(
                table.value(sum) / Rational::integer(*n as i64),
            ));
        }
    }
    out
}

/// `S_n f (x) / n` for each `n` in the strictly increasing list `ns`.
///
/// Exact for the shift, for the doubling map with a dyadic observable
/// (through certified binary digits) and for orbits of exact rationals that
/// stay rational; validated enclosures otherwise.
pub fn birkhoff_averages(
    sys: &DynSystem,
    f: &Observable,
    x: &ApproxPoint,
    ns: &[u64],
) -> Result<Vec<Average>> {
    if f.space() != sys.space() || x.space() != sys.space() {
        return Err(Error::SpaceMismatch {
            expected: sys.space(),
            found: f.space(),
        });
    }
    let n_max = check_ns(ns)?;
    let len = usize::try_from(n_max).map_err(|_| Error::TooLarge(format!("n = {n_max}")))?;
    if let SystemKind::Shift = sys.kind() {
        let table = IntTable::new(f)?;
        let digits = x.bits(len + table.depth.saturating_sub(1))?;
        return Ok(window_averages(&table, &digits, ns));
    }
    let real = x.real().expect("interval point");
    if let Some(q) = real.as_exact() {
        if let Some(out) = exact_orbit_averages(sys, f, q, ns)? {
            return Ok(out);
        }
    }
    if let (SystemKind::Doubling, Ok(table)) = (sys.kind(), IntTable::new(f)) {
        let digits = binary_expand(real, len + table.depth.saturating_sub(1), 64)?;
        return Ok(window_averages(&table, &digits, ns));
    }
    let bits = sys.working_bits(n_max, 32);
    let orbit = sys.orbit_enclosure(&real.enclosure(bits)?, n_max - 1, bits)?;
    let mut out = Vec::with_capacity(ns.len());
    let mut sum = Interval::point(Rational::zero());
    let mut next = ns.iter().peekable();
    for (i, iv) in orbit.iter().enumerate() {
        sum = sum.add(&f.range_on(iv)?);
        if next.peek().is_some_and(|&&n| n == i as u64 + 1) {
            let n = next.next().expect("peeked");
            out.push(Average::from_interval(
                sum.scale(&Rational::new(1, *n as i64)),
            ));
        }
    }
    Ok(out)
}

fn exact_orbit_averages(
    sys: &DynSystem,
    f: &Observable,
    x: &Rational,
    ns: &[u64],
) -> Result<Option<Vec<Average>>> {
    let mut out = Vec::with_capacity(ns.len());
    let mut cur = x.clone();
    let mut sum = Rational::zero();
    let mut next = ns.iter().peekable();
    for i in 0..*ns.last().expect("nonempty") {
        sum += f.value_at(&cur)?;
        if next.peek().is_some_and(|&&n| n == i + 1) {
            let n = next.next().expect("peeked");
            out.push(Average::Exact(&sum / &Rational::integer(*n as i64)));
        }
        match sys.step_exact(&cur) {
            Some(q) if q.denom().bits() < 4096 => cur = q,
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// `S_n f (x) / n`.
pub fn birkhoff_average(
    sys: &DynSystem,
    f: &Observable,
    x: &ApproxPoint,
    n: u64,
) -> Result<Average> {
    Ok(birkhoff_averages(sys, f, x, &[n])?.remove(0))
}

/// Largest prefix length enumerated by the exact routines.
pub const ENUM_LIMIT: usize = 24;

/// `C_n(E, F) = μ(E∘T^n · F) - μ(E) μ(F)` for the shift or the doubling
/// map, by summing over all prefixes of length `max(n + |E|, |F|)`.
pub fn correlation(sys: &DynSystem, e: &Observable, f: &Observable, n: u64) -> Result<Rational> {
    if !sys.is_symbolic() {
        return Err(Error::UnsupportedObservable(format!(
            "exact correlations need the shift or doubling map, not {sys:?}"
        )));
    }
    for g in [e, f] {
        if g.space() != sys.space() {
            return Err(Error::SpaceMismatch {
                expected: sys.space(),
                found: g.space(),
            });
        }
    }
    let (te, tf) = (IntTable::new(e)?, IntTable::new(f)?);
    let len = (n as usize).saturating_add(te.depth).max(tf.depth);
    if len > ENUM_LIMIT {
        return Err(Error::TooLarge(format!("{len} prefix bits for n = {n}")));
    }
    let (me, mf) = (te.mask(), tf.mask());
    let (se, sf) = (len - n as usize - te.depth, len - tf.depth);
    let mut total: i128 = 0;
    for w in 0usize..1 << len {
        total += te.values[(w >> se) & me] as i128 * tf.values[(w >> sf) & mf] as i128;
    }
    let joint = Rational::from_bigints(BigInt::from(total), &te.scale * &tf.scale)
        * Rational::pow2(-(len as i64));
    Ok(joint - te.mean() * tf.mean())
}

/// Lebesgue measure of `[a, b) ∩ ([c, e) - d mod 1)` for `d` in `[0, 1)`.
fn arc_overlap(a: &Rational, b: &Rational, c: &Rational, e: &Rational, d: &Rational) -> Rational {
    let one = Rational::one();
    let (s, t) = (c - d, e - d);
    let arcs = if !s.is_negative() {
        vec![(s, t)]
    } else if !t.is_positive() {
        vec![(s + one.clone(), t + one)]
    } else {
        vec![(s + one.clone(), one), (Rational::zero(), t)]
    };
    arcs.into_iter()
        .map(|(lo, hi)| (hi.min(b.clone()) - lo.max(a.clone())).max(Rational::zero()))
        .sum()
}

/// Enclosure of `C_n(E, F)` of width at most `2^-p`; exact for symbolic
/// systems, through `nθ` for rotations.
pub fn correlation_enclosure(
    sys: &DynSystem,
    e: &Observable,
    f: &Observable,
    n: u64,
    p: u32,
) -> Result<Interval> {
    match sys.kind() {
        SystemKind::Shift | SystemKind::Doubling => Ok(Interval::point(correlation(sys, e, f, n)?)),
        SystemKind::Rotation { theta } => {
            let (pe, pf) = (e.interval_pieces()?, f.interval_pieces()?);
            let weight: Rational = pe
                .iter()
                .flat_map(|(_, _, u)| pf.iter().map(move |(_, _, v)| (u * v).abs()))
                .sum();
            let extra = (n.max(1) as f64).log2().ceil() as u32
                + weight.clone().max(Rational::one()).ceil_log2() as u32
                + 3;
            let q = p + extra;
            let nt = theta.eval(q)? * Rational::integer(n as i64);
            let radius = Rational::pow2(-(q as i64)) * Rational::integer(n.max(1) as i64);
            let d = nt.fract();
            let mut joint = Rational::zero();
            for (a, b, v) in &pf {
                for (c, g, u) in &pe {
                    joint += u * v * arc_overlap(a, b, c, g, &d);
                }
            }
            let mu = sys.measure()?;
            let centre = joint - e.mean(mu)? * f.mean(mu)?;
            let slack = Rational::integer(2) * weight * radius;
            Ok(Interval::new(&centre - &slack, &centre + &slack))
        }
        SystemKind::MannevillePomeau { .. } => Err(Error::UnsupportedObservable(
            "Manneville-Pomeau correlations have no closed form here".into(),
        )),
    }
}

/// `μ(f ∘ T)`, exact for symbolic systems; equals `μ(f)` by invariance.
pub fn preimage_mean(sys: &DynSystem, f: &Observable) -> Result<Rational> {
    if !sys.is_symbolic() {
        return Err(Error::UnsupportedObservable(format!(
            "{sys:?} is not symbolic"
        )));
    }
    let t = IntTable::new(f)?;
    // f ∘ T reads digits 2..=L+1, so each table entry is hit twice among the
    // 2^(L+1) cells.
    let total: i128 = (0usize..1 << (t.depth + 1))
        .map(|w| t.values[w & t.mask()] as i128)
        .sum();
    Ok(t.value(total) * Rational::pow2(-(t.depth as i64 + 1)))
}
