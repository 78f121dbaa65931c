use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Indices `n_i = ⌈i^β⌉` (`i >= 1`) with `αβ > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct SubsequenceSchedule {
    alpha: Rational,
    beta: Rational,
}

#[derive(Deserialize)]
struct RawSchedule {
    alpha: Rational,
    beta: Option<Rational>,
}

impl TryFrom<RawSchedule> for SubsequenceSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        match raw.beta {
            Some(beta) => SubsequenceSchedule::new(raw.alpha, beta),
            None => make_schedule(raw.alpha),
        }
    }
}

fn small(q: &Rational, what: &str) -> Result<(u32, u32)> {
    let n = u32::try_from(q.numer())
        .map_err(|_| Error::BadParameter(format!("{what} {q} too large")))?;
    let d = u32::try_from(q.denom())
        .map_err(|_| Error::BadParameter(format!("{what} {q} too large")))?;
    Ok((n, d))
}

/// The least integer `β` with `αβ > 1`, for `0 < α < 1`.
pub fn make_schedule(alpha: Rational) -> Result<SubsequenceSchedule> {
    if !alpha.is_positive() || alpha >= Rational::one() {
        return Err(Error::BadAlpha(alpha.to_string()));
    }
    let beta = Rational::from_bigint(alpha.recip().floor()) + Rational::one();
    SubsequenceSchedule::new(alpha, beta)
}

impl SubsequenceSchedule {
    pub fn new(alpha: Rational, beta: Rational) -> Result<Self> {
        if !alpha.is_positive() || alpha >= Rational::one() {
            return Err(Error::BadAlpha(alpha.to_string()));
        }
        if &alpha * &beta <= Rational::one() {
            return Err(Error::BadAlpha(format!(
                "{alpha} with beta = {beta} (need alpha * beta > 1)"
            )));
        }
        small(&alpha, "alpha")?;
        small(&beta, "beta")?;
        Ok(SubsequenceSchedule { alpha, beta })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// `n_i = ⌈i^β⌉`: the least `m` with `m^q >= i^p` for `β = p/q`.
    pub fn index(&self, i: u64) -> Result<u64> {
        if i == 0 {
            return Err(Error::BadParameter("schedule indices start at 1".into()));
        }
        let (p, q) = small(&self.beta, "beta")?;
        let target = BigUint::from(i).pow(p);
        let mut m = target.nth_root(q);
        if m.pow(q) < target {
            m += BigUint::one();
        }
        u64::try_from(&m).map_err(|_| Error::TooLarge(format!("n_{i}")))
    }

    /// `n_1, ..., n_k`.
    pub fn indices(&self, k: u64) -> Result<Vec<u64>> {
        (1..=k).map(|i| self.index(i)).collect()
    }

    /// `β_i = n_i / n_{i+1}`.
    pub fn ratio(&self, i: u64) -> Result<Rational> {
        Ok(Rational::new(
            self.index(i)? as i64,
            self.index(i + 1)? as i64,
        ))
    }

    /// Rational upper bound on `Σ_{i >= I} n_i^-α`, by the integral test:
    /// `Σ_{i >= I} i^-γ <= I^(1-γ)/(γ-1) + I^-γ` with `γ = αβ`.
    pub fn tail_bound(&self, from: u64) -> Result<Rational> {
        if from == 0 {
            return Err(Error::BadParameter("schedule indices start at 1".into()));
        }
        let gamma = &self.alpha * &self.beta;
        let (p, q) = small(&gamma, "alpha * beta")?;
        let i = Rational::integer(from as i64);
        let (lo, _) = i.root_bounds(p, q, 64);
        let lo = lo.max(Rational::one());
        Ok((i / (gamma - Rational::one()) + Rational::one()) / lo)
    }

    /// Upper bound on `Σ_{i>=from} 1/n_i`.
    pub fn inverse_tail(&self, from: u64) -> Result<Rational> {
        if from == 0 {
            return Err(Error::BadParameter("schedule indices start at 1".into()));
        }
        let (p, q) = small(&self.beta, "beta")?;
        let i = Rational::integer(from as i64);
        let (lo, _) = i.root_bounds(p, q, 64);
        let lo = lo.max(Rational::one());
        Ok((i / (self.beta.clone() - Rational::one()) + Rational::one()) / lo)
    }

    /// First `i0 <= upto` from which `β_i` is non-decreasing up to `upto`.
    pub fn monotone_from(&self, upto: u64) -> Result<u64> {
        let mut start = 1;
        let mut prev = self.ratio(1)?;
        for i in 2..=upto {
            let r = self.ratio(i)?;
            if r < prev {
                start = i;
            }
            prev = r;
        }
        Ok(start)
    }
}

/// Checks `S_k/k - S_l/l <= 2(1 - β) M` on a stream bounded by `M`, for
/// `β <= k/l <= 1`.
pub fn interpolation_gap_check(
    values: &[Rational],
    k: usize,
    l: usize,
    beta: &Rational,
    m: &Rational,
) -> Result<bool> {
    if k == 0 || l > values.len() {
        return Err(Error::BadParameter(format!(
            "need 1 <= k <= l <= {}",
            values.len()
        )));
    }
    let ratio = Rational::new(k as i64, l as i64);
    if k > l || ratio < *beta {
        return Err(Error::BadRatio {
            ratio: ratio.to_string(),
            beta: beta.to_string(),
        });
    }
    if let Some(v) = values[..l].iter().find(|v| v.abs() > *m) {
        return Err(Error::BadParameter(format!(
            "value {v} exceeds the bound {m}"
        )));
    }
    let sk: Rational = values[..k].iter().cloned().sum();
    let sl: Rational = values[..l].iter().cloned().sum();
    let gap = sk / Rational::integer(k as i64) - sl / Rational::integer(l as i64);
    Ok(gap <= Rational::integer(2) * (Rational::one() - beta) * m.clone())
}
