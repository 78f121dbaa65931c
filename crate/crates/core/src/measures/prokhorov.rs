//! Exact and bracketed Prokhorov distance between finite measures.

use std::collections::VecDeque;

use super::FiniteMeasure;
use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::spaces::distance;

/// Largest support the subset method accepts.
pub const SUPPORT_CAP: usize = 15;

fn distance_matrix(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<Vec<Vec<Rational>>> {
    if mu.space() != nu.space() {
        return Err(Error::SpaceMismatch {
            expected: mu.space(),
            found: nu.space(),
        });
    }
    mu.atoms()
        .iter()
        .map(|a| {
            nu.atoms()
                .iter()
                .map(|b| distance(&a.point, &b.point))
                .collect()
        })
        .collect()
}

/// `ρ(μ, ν) = inf{ε : μ(A) <= ν(A^ε) + ε for all A}` with the strict
/// neighbourhood `A^ε = {y : d(y, A) < ε}`.
///
/// Only subsets `S` of the support of `μ` matter. For each `S`,
/// `ν(S^ε)` is a step function of `ε`: on `(d_j, d_{j+1}]` between
/// consecutive distances it equals `W_j = ν{y : d(y, S) <= d_j}`, so the
/// least admissible `ε` on that piece is `max(d_j, μ(S) - W_j)` when it
/// does not pass `d_{j+1}`.
pub fn prokhorov(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<Rational> {
    let size = mu.len().max(nu.len());
    if size > SUPPORT_CAP {
        return Err(Error::SupportTooLarge {
            size,
            cap: SUPPORT_CAP,
        });
    }
    let dist = distance_matrix(mu, nu)?;

    // Distances as ranks so the per-subset work is integer comparisons.
    let mut levels: Vec<Rational> = dist.iter().flatten().cloned().collect();
    levels.push(Rational::zero());
    levels.sort();
    levels.dedup();
    let rank: Vec<Vec<usize>> = dist
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| levels.binary_search(d).expect("present"))
                .collect()
        })
        .collect();

    let m = mu.len();
    let mut worst = Rational::zero();
    for mask in 1u32..(1u32 << m) {
        let members: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let mass: Rational = members.iter().map(|&i| &mu.atoms()[i].weight).sum();
        if mass <= worst {
            continue;
        }
        // ν-mass at each distance rank from S.
        let mut at_rank = vec![Rational::zero(); levels.len()];
        for (j, atom) in nu.atoms().iter().enumerate() {
            let r = members
                .iter()
                .map(|&i| rank[i][j])
                .min()
                .expect("nonempty subset");
            at_rank[r] += &atom.weight;
        }
        let mut best: Option<Rational> = None;
        let mut cumulative = Rational::zero();
        for (k, d) in levels.iter().enumerate() {
            cumulative += &at_rank[k];
            let candidate = d.clone().max(&mass - &cumulative);
            let fits = levels.get(k + 1).is_none_or(|next| candidate <= *next);
            if fits {
                best = Some(candidate);
                break;
            }
        }
        let eps = best.expect("the last piece always fits");
        if eps > worst {
            worst = eps;
        }
    }
    Ok(worst)
}

/// Max flow from `μ` to `ν` along pairs at distance `< ε`.
fn coupled_mass(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    dist: &[Vec<Rational>],
    eps: &Rational,
) -> Rational {
    let (m, k) = (mu.len(), nu.len());
    let n = m + k + 2;
    let (s, t) = (m + k, m + k + 1);
    let big = Rational::integer(2);
    let mut cap = vec![vec![Rational::zero(); n]; n];
    for i in 0..m {
        cap[s][i] = mu.atoms()[i].weight.clone();
        for j in 0..k {
            if dist[i][j] < *eps {
                cap[i][m + j] = big.clone();
            }
        }
    }
    for j in 0..k {
        cap[m + j][t] = nu.atoms()[j].weight.clone();
    }
    let mut flow = Rational::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v].is_positive() {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut push = big.clone();
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v].clone());
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= &push;
            cap[v][u] += &push;
            v = u;
        }
        flow += push;
    }
}

/// Bracket of `ρ(μ, ν)` of width `<= 2^-n` for supports of any size.
///
/// `μ(A) <= ν(A^ε) + ε` for all `A` holds exactly when the flow along
/// `ε`-close pairs reaches `1 - ε`; that test is monotone in `ε`, so
/// bisection on `[0, 1]` closes in on the infimum.
pub fn prokhorov_bisect(mu: &FiniteMeasure, nu: &FiniteMeasure, n: u32) -> Result<Interval> {
    let dist = distance_matrix(mu, nu)?;
    let ok = |eps: &Rational| coupled_mass(mu, nu, &dist, eps) + eps.clone() >= Rational::one();
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let width = Rational::pow2(-(n as i64));
    while &hi - &lo > width {
        let mid = (&lo + &hi).half();
        if ok(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Interval::new(lo, hi))
}
