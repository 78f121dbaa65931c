use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::birkhoff::correlation_enclosure;
use super::observable::Observable;
use super::system::{DynSystem, SystemKind};
use crate::error::{Error, Result};
use crate::exact::Rational;

type Constants = Arc<dyn Fn(usize, usize) -> Rational + Send + Sync>;

/// A claimed decay `|C_n(E_i, E_j)| <= c(i, j) / n^α`.
#[derive(Clone)]
pub struct CorrelationBound {
    alpha: Rational,
    constants: Constants,
}

impl CorrelationBound {
    pub fn new<F>(alpha: Rational, constants: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Rational + Send + Sync + 'static,
    {
        if !alpha.is_positive() {
            return Err(Error::BadAlpha(alpha.to_string()));
        }
        Ok(CorrelationBound {
            alpha,
            constants: Arc::new(constants),
        })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn constant(&self, i: usize, j: usize) -> Rational {
        (self.constants)(i, j)
    }

    /// Rational bracket of `c(i, j) / n^α` of width about `2^-bits`.
    pub fn bound_bracket(&self, i: usize, j: usize, n: u64) -> (Rational, Rational) {
        let c = self.constant(i, j);
        let (num, den) = (
            u32::try_from(self.alpha.numer()).unwrap_or(u32::MAX),
            u32::try_from(self.alpha.denom()).unwrap_or(u32::MAX),
        );
        let (lo, hi) = Rational::integer(n as i64).root_bounds(num, den, 64);
        let lo = lo.max(Rational::pow2(-64));
        (&c / &hi, &c / &lo)
    }
}

impl fmt::Debug for CorrelationBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CorrelationBound(alpha = {})", self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingEntry {
    pub i: usize,
    pub j: usize,
    pub n: u64,
    pub correlation_lo: Rational,
    pub correlation_hi: Rational,
    pub bound_hi: Rational,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingReport {
    pub entries: Vec<MixingEntry>,
    /// For the shift: every entry with `n >= |E_j|` is exactly zero.
    pub shift_horizon_zero: Option<bool>,
}

impl MixingReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.entries.iter().any(|e| e.verdict == Verdict::Fail)
    }
}

/// Checks `|C_n(E_i, E_j)| <= c(i, j) / n^α` for each pair and each `n` in
/// `ns`. A pass is certified; a fail is certified; otherwise unknown.
pub fn verify_mixing(
    sys: &DynSystem,
    events: &[Observable],
    pairs: &[(usize, usize)],
    bound: &CorrelationBound,
    ns: &[u64],
) -> Result<MixingReport> {
    let mut entries = Vec::new();
    let mut horizon = true;
    for &(i, j) in pairs {
        let (e, f) = match (events.get(i), events.get(j)) {
            (Some(e), Some(f)) => (e, f),
            _ => return Err(Error::BadParameter(format!("pair ({i}, {j}) out of range"))),
        };
        for &n in ns {
            let c = correlation_enclosure(sys, e, f, n, 40)?;
            let abs = c.abs();
            let (b_lo, b_hi) = bound.bound_bracket(i, j, n.max(1));
            let verdict = if abs.hi <= b_lo {
                Verdict::Pass
            } else if abs.lo > b_hi {
                Verdict::Fail
            } else {
                Verdict::Unknown
            };
            if let (SystemKind::Shift, Observable::Cylinder { word }) = (sys.kind(), f) {
                if n as usize >= word.len() && !(c.is_point() && c.lo.is_zero()) {
                    horizon = false;
                }
            }
            entries.push(MixingEntry {
                i,
                j,
                n,
                correlation_lo: c.lo.clone(),
                correlation_hi: c.hi.clone(),
                bound_hi: b_hi,
                verdict,
            });
        }
    }
    let shift_horizon_zero = matches!(sys.kind(), SystemKind::Shift).then_some(horizon);
    Ok(MixingReport {
        entries,
        shift_horizon_zero,
    })
}
