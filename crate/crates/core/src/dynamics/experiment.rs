use std::fmt::Write as _;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::birkhoff::{birkhoff_averages, Average};
use super::observable::Observable;
use super::schedule::SubsequenceSchedule;
use super::system::DynSystem;
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Interval, Rational};
use crate::randomness::oscillating_point;
use crate::spaces::{bits_to_string, parse_bits, ApproxPoint, SpaceId};

/// The bit stream of a ChaCha8 generator seeded with `seed`, least
/// significant bit of each word first.
pub fn pseudorandom_point(seed: u64) -> ApproxPoint {
    ApproxPoint::cantor(move |n| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = rng.next_u64();
            let take = (n - out.len()).min(64);
            out.extend((0..take).map(|i| w >> i & 1 == 1));
        }
        Ok(out)
    })
}

/// A starting point described in text or JSON.
///
/// Text forms: `p/q` (a rational in `[0, 1]`), `0110` (that word followed
/// by zeros), `01(10)` (a prefix then a repeated period), `random:SEED`,
/// `osc:BASE`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointSpec {
    Rational {
        value: Rational,
    },
    Word {
        #[serde(with = "crate::spaces::bitstring")]
        prefix: Vec<bool>,
        #[serde(with = "crate::spaces::bitstring", default)]
        period: Vec<bool>,
    },
    Pseudorandom {
        seed: u64,
    },
    Oscillating {
        base: u64,
    },
}

impl PointSpec {
    pub fn space(&self) -> SpaceId {
        match self {
            PointSpec::Rational { .. } => SpaceId::UnitInterval,
            _ => SpaceId::Cantor,
        }
    }

    pub fn to_point(&self) -> Result<ApproxPoint> {
        match self {
            PointSpec::Rational { value } => {
                if value.is_negative() || *value > Rational::one() {
                    return Err(Error::BadParameter(format!("{value} is outside [0, 1]")));
                }
                Ok(ApproxPoint::interval(ApproxReal::constant(value.clone())))
            }
            PointSpec::Word { prefix, period } if period.is_empty() => {
                Ok(ApproxPoint::eventually_periodic(prefix, &[false]))
            }
            PointSpec::Word { prefix, period } => {
                Ok(ApproxPoint::eventually_periodic(prefix, period))
            }
            PointSpec::Pseudorandom { seed } => Ok(pseudorandom_point(*seed)),
            PointSpec::Oscillating { base } => oscillating_point(*base),
        }
    }
}

impl FromStr for PointSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        };
        if let Some(seed) = s.strip_prefix("random:") {
            return Ok(PointSpec::Pseudorandom {
                seed: number(seed)?,
            });
        }
        if let Some(base) = s.strip_prefix("osc:") {
            let base = number(base)?;
            if base < 2 {
                return Err(Error::Parse(format!(
                    "oscillation base {base} must be at least 2"
                )));
            }
            return Ok(PointSpec::Oscillating { base });
        }
        if s.contains('/') {
            let value: Rational = s.parse()?;
            if value.is_negative() || value > Rational::one() {
                return Err(Error::Parse(format!("{value} is outside [0, 1]")));
            }
            return Ok(PointSpec::Rational { value });
        }
        match s.split_once('(') {
            Some((prefix, rest)) => {
                let period = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed period in {s:?}")))?;
                let period = parse_bits(period)?;
                if period.is_empty() {
                    return Err(Error::Parse("empty period".into()));
                }
                Ok(PointSpec::Word {
                    prefix: parse_bits(prefix)?,
                    period,
                })
            }
            None => Ok(PointSpec::Word {
                prefix: parse_bits(s)?,
                period: Vec::new(),
            }),
        }
    }
}

impl std::fmt::Display for PointSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointSpec::Rational { value } => f.write_str(&value.to_pq()),
            PointSpec::Word { prefix, period } if period.is_empty() => {
                f.write_str(&bits_to_string(prefix))
            }
            PointSpec::Word { prefix, period } => {
                write!(f, "{}({})", bits_to_string(prefix), bits_to_string(period))
            }
            PointSpec::Pseudorandom { seed } => write!(f, "random:{seed}"),
            PointSpec::Oscillating { base } => write!(f, "osc:{base}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirkhoffRow {
    pub n: u64,
    pub average: Average,
    /// Enclosure of `|S_n/n - ∫f|`.
    pub abs_dev_lo: Rational,
    pub abs_dev_hi: Rational,
    pub on_schedule: bool,
}

/// Averages at small `n` and along a schedule, with the window spread of
/// the schedule samples in the second half of the schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    pub mean: Rational,
    pub rows: Vec<BirkhoffRow>,
    pub window_max: Rational,
    pub window_min: Rational,
}

impl BirkhoffReport {
    /// Certified lower bound on the window's `max - min`.
    pub fn oscillation(&self) -> Rational {
        (&self.window_max - &self.window_min).max(Rational::zero())
    }

    /// Enclosure of the deviation at the last row.
    pub fn final_deviation(&self) -> Interval {
        let last = self.rows.last().expect("nonempty report");
        Interval::new(last.abs_dev_lo.clone(), last.abs_dev_hi.clone())
    }

    /// CSV with header `n,S_n_over_n,mean,abs_dev,on_schedule`; inexact
    /// entries print as `[lo;hi]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,S_n_over_n,mean,abs_dev,on_schedule\n");
        for r in &self.rows {
            let avg = match &r.average {
                Average::Exact(q) => q.to_pq(),
                Average::Enclosure { lo, hi } => format!("[{};{}]", lo.to_pq(), hi.to_pq()),
            };
            let dev = if r.abs_dev_lo == r.abs_dev_hi {
                r.abs_dev_lo.to_pq()
            } else {
                format!("[{};{}]", r.abs_dev_lo.to_pq(), r.abs_dev_hi.to_pq())
            };
            let _ = writeln!(
                out,
                "{},{avg},{},{dev},{}",
                r.n,
                self.mean.to_pq(),
                r.on_schedule
            );
        }
        out
    }
}

/// Number of small `n` sampled densely by [`typicality_experiment`].
pub const DENSE_SAMPLES: u64 = 16;

/// `S_n/n` for `n = 1..=16` and along `n_1..n_{max_i}`. The window is the
/// schedule samples with `i > max_i / 2`; its max and min are certified
/// (lower end of the max, upper end of the min).
pub fn typicality_experiment(
    sys: &DynSystem,
    x: &ApproxPoint,
    f: &Observable,
    schedule: &SubsequenceSchedule,
    max_i: u64,
) -> Result<BirkhoffReport> {
    if max_i == 0 {
        return Err(Error::BadParameter("max_i must be positive".into()));
    }
    let mean = f.mean(sys.measure()?)?;
    let on: Vec<u64> = schedule.indices(max_i)?;
    let mut ns: Vec<u64> = (1..=DENSE_SAMPLES).chain(on.iter().copied()).collect();
    ns.sort_unstable();
    ns.dedup();
    let avgs = birkhoff_averages(sys, f, x, &ns)?;
    let window: Vec<u64> = on[(max_i / 2) as usize..].to_vec();
    let mut window_max: Option<Rational> = None;
    let mut window_min: Option<Rational> = None;
    let mut rows = Vec::with_capacity(ns.len());
    for (n, average) in ns.into_iter().zip(avgs) {
        let iv = average.interval();
        if window.contains(&n) {
            window_max = Some(window_max.map_or(iv.lo.clone(), |m| m.max(iv.lo.clone())));
            window_min = Some(window_min.map_or(iv.hi.clone(), |m| m.min(iv.hi.clone())));
        }
        let dev = iv.shift(&-mean.clone()).abs();
        rows.push(BirkhoffRow {
            n,
            average,
            abs_dev_lo: dev.lo,
            abs_dev_hi: dev.hi,
            on_schedule: on.contains(&n),
        });
    }
    Ok(BirkhoffReport {
        mean,
        rows,
        window_max: window_max.expect("nonempty window"),
        window_min: window_min.expect("nonempty window"),
    })
}
