use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::measures::ComputableMeasure;
use crate::spaces::{bitstring, SpaceId};

/// A bounded observable with an exact finite description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawObservable")]
pub enum Observable {
    /// `1_[w]` on Cantor space.
    Cylinder {
        #[serde(with = "bitstring")]
        word: Vec<bool>,
    },
    /// `1_[lo, hi)` on the unit interval.
    Dyadic { lo: Rational, hi: Rational },
    /// `levels[i]` on `[cuts[i], cuts[i+1])`, the last piece closed at 1.
    Step {
        cuts: Vec<Rational>,
        levels: Vec<Rational>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawObservable {
    Cylinder {
        #[serde(with = "bitstring")]
        word: Vec<bool>,
    },
    Dyadic {
        lo: Rational,
        hi: Rational,
    },
    Step {
        cuts: Vec<Rational>,
        levels: Vec<Rational>,
    },
}

impl TryFrom<RawObservable> for Observable {
    type Error = Error;

    fn try_from(raw: RawObservable) -> Result<Self> {
        match raw {
            RawObservable::Cylinder { word } => Ok(Observable::Cylinder { word }),
            RawObservable::Dyadic { lo, hi } => Observable::interval(lo, hi),
            RawObservable::Step { cuts, levels } => Observable::step(cuts, levels),
        }
    }
}

impl Observable {
    pub fn cylinder(word: &[bool]) -> Self {
        Observable::Cylinder {
            word: word.to_vec(),
        }
    }

    /// `1_[lo, hi)` for `0 <= lo < hi <= 1`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() || lo >= hi || hi > Rational::one() {
            return Err(Error::BadParameter(format!(
                "indicator of [{lo}, {hi}) is not a subinterval of [0, 1]"
            )));
        }
        Ok(Observable::Dyadic { lo, hi })
    }

    /// Cuts must run strictly upward from 0 to 1, one level per piece.
    pub fn step(cuts: Vec<Rational>, levels: Vec<Rational>) -> Result<Self> {
        let ok = cuts.len() >= 2
            && levels.len() + 1 == cuts.len()
            && cuts[0].is_zero()
            && cuts[cuts.len() - 1] == Rational::one()
            && cuts.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::BadParameter(
                "step function needs cuts 0 < ... < 1 and one level per piece".into(),
            ));
        }
        Ok(Observable::Step { cuts, levels })
    }

    pub fn space(&self) -> SpaceId {
        match self {
            Observable::Cylinder { .. } => SpaceId::Cantor,
            _ => SpaceId::UnitInterval,
        }
    }

    /// `M` with `|f| <= M`.
    pub fn bound(&self) -> Rational {
        match self {
            Observable::Step { levels, .. } => levels
                .iter()
                .map(|l| l.abs())
                .fold(Rational::zero(), Rational::max),
            _ => Rational::one(),
        }
    }

    fn pieces(&self) -> Vec<(Rational, Rational, Rational)> {
        match self {
            Observable::Cylinder { .. } => Vec::new(),
            Observable::Dyadic { lo, hi } => {
                let mut out = Vec::new();
                if lo.is_positive() {
                    out.push((Rational::zero(), lo.clone(), Rational::zero()));
                }
                out.push((lo.clone(), hi.clone(), Rational::one()));
                if *hi < Rational::one() {
                    out.push((hi.clone(), Rational::one(), Rational::zero()));
                }
                out
            }
            Observable::Step { cuts, levels } => cuts
                .windows(2)
                .zip(levels)
                .map(|(w, l)| (w[0].clone(), w[1].clone(), l.clone()))
                .collect(),
        }
    }

    /// `(lo, hi, value)` pieces partitioning `[0, 1]`.
    pub fn interval_pieces(&self) -> Result<Vec<(Rational, Rational, Rational)>> {
        match self {
            Observable::Cylinder { .. } => Err(Error::SpaceMismatch {
                expected: SpaceId::UnitInterval,
                found: SpaceId::Cantor,
            }),
            _ => Ok(self.pieces()),
        }
    }

    /// `f(x)` for `x` in `[0, 1]`.
    pub fn value_at(&self, x: &Rational) -> Result<Rational> {
        let pieces = self.interval_pieces()?;
        let last = pieces.len() - 1;
        for (i, (lo, hi, v)) in pieces.iter().enumerate() {
            if lo <= x && (x < hi || (i == last && x <= hi)) {
                return Ok(v.clone());
            }
        }
        Err(Error::BadParameter(format!("{x} outside [0, 1]")))
    }

    /// `f` on a Cantor prefix of at least `depth()` bits.
    pub fn value_on_bits(&self, bits: &[bool]) -> Result<Rational> {
        match self {
            Observable::Cylinder { word } => Ok(if bits.starts_with(word) {
                Rational::one()
            } else {
                Rational::zero()
            }),
            _ => Err(Error::SpaceMismatch {
                expected: SpaceId::Cantor,
                found: SpaceId::UnitInterval,
            }),
        }
    }

    /// Hull of the values taken on `iv ∩ [0, 1]`.
    pub fn range_on(&self, iv: &Interval) -> Result<Interval> {
        let mut out: Option<Interval> = None;
        for (lo, hi, v) in self.interval_pieces()? {
            let meets =
                iv.hi >= lo && iv.lo < hi || (hi == Rational::one() && iv.hi >= hi && iv.lo <= hi);
            if meets {
                let p = Interval::point(v);
                out = Some(match out {
                    Some(o) => o.hull(&p),
                    None => p,
                });
            }
        }
        out.ok_or_else(|| Error::BadParameter(format!("{iv:?} misses [0, 1]")))
    }

    /// `(L, table)`: `f` depends only on the first `L` binary digits, and
    /// `table[k]` is its value on the cell of index `k` (first digit most
    /// significant). `None` when a cut is not dyadic.
    pub fn cylinder_form(&self) -> Option<(usize, Vec<Rational>)> {
        match self {
            Observable::Cylinder { word } => {
                let l = word.len();
                if l > 24 {
                    return None;
                }
                let mut table = vec![Rational::zero(); 1 << l];
                table[word_index(word)] = Rational::one();
                Some((l, table))
            }
            _ => {
                let pieces = self.pieces();
                let mut l = 0usize;
                for (lo, _, _) in &pieces {
                    if !lo.is_dyadic() {
                        return None;
                    }
                    l = l.max(lo.denom().bits().saturating_sub(1) as usize);
                }
                if l > 24 {
                    return None;
                }
                let cell = Rational::pow2(-(l as i64));
                let table = (0..1u64 << l)
                    .map(|k| {
                        self.value_at(&(Rational::integer(k as i64) * cell.clone()))
                            .expect("inside [0, 1]")
                    })
                    .collect();
                Some((l, table))
            }
        }
    }

    /// `∫ f dμ`, exact for closed-form measures.
    pub fn mean(&self, mu: &ComputableMeasure) -> Result<Rational> {
        if mu.space() != self.space() {
            return Err(Error::SpaceMismatch {
                expected: self.space(),
                found: mu.space(),
            });
        }
        match self {
            Observable::Cylinder { word } => mu.cylinder_mass(word).ok_or_else(|| {
                Error::UnsupportedObservable("cylinder mass needs a Bernoulli measure".into())
            }),
            _ => {
                let mut total = Rational::zero();
                for (lo, hi, v) in self.pieces() {
                    let (a, b) = (mu.closed_cdf(&lo), mu.closed_cdf(&hi));
                    match (a, b) {
                        (Some(a), Some(b)) => total += v * (b - a),
                        _ => {
                            return Err(Error::UnsupportedObservable(
                                "interval observable needs a measure with a closed-form CDF".into(),
                            ))
                        }
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Index of a word with its first bit most significant.
pub(crate) fn word_index(word: &[bool]) -> usize {
    word.iter().fold(0usize, |acc, &b| acc << 1 | b as usize)
}
