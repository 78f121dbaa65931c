//! The CDF isomorphism onto Lebesgue measure and binary expansion between
//! the unit interval and Cantor space.

use crate::error::{Error, Result};
use crate::exact::{separate, ApproxReal, Interval, Rational, Separation};
use crate::measures::{pushforward, ComputableMeasure, Morphism};
use crate::spaces::{ApproxPoint, SpaceId};

/// `F(x) = μ([0, x])` for a non-atomic measure on `[0, 1]`, with the
/// envelopes `G_<(y) = sup{x : F(x) < y}` and `G_>(y) = inf{x : F(x) > y}`.
#[derive(Debug, Clone)]
pub struct CdfIsomorphism {
    measure: ComputableMeasure,
}

impl CdfIsomorphism {
    pub fn new(measure: &ComputableMeasure) -> Result<Self> {
        if measure.space() != SpaceId::UnitInterval {
            return Err(Error::SpaceMismatch {
                expected: SpaceId::UnitInterval,
                found: measure.space(),
            });
        }
        if !measure.atom_info().is_non_atomic() {
            return Err(Error::AtomicMeasure);
        }
        Ok(CdfIsomorphism {
            measure: measure.clone(),
        })
    }

    pub fn measure(&self) -> &ComputableMeasure {
        &self.measure
    }

    /// Certified enclosure of `F(x)` for `x` in `[a, b]`, at stage `t`.
    fn sandwich(&self, a: &Rational, b: &Rational, t: u32) -> Result<Interval> {
        let lo = self.measure.cdf_bounds(a, t)?.lo;
        let hi = self.measure.cdf_bounds(b, t)?.hi;
        Ok(Interval::new(lo.clone().min(hi.clone()), hi.max(lo)))
    }

    /// `μ ∘ F^-1`, which is Lebesgue measure.
    pub fn image_measure(&self) -> Result<ComputableMeasure> {
        pushforward(&self.measure, &Morphism::cdf(&self.measure)?)
    }
}

/// `F(x)`: at stage `t` the point is pinned to `[q - 2^-t, q + 2^-t]` and
/// `F` is bracketed by `μ([0, q - 2^-t))` and `1 - μ((q + 2^-t, 1])`; the
/// midpoint is returned once the bracket is at most `2^(1-n)` wide.
pub fn cdf_forward(iso: &CdfIsomorphism, x: &ApproxReal, budget: u32) -> ApproxReal {
    let iso = iso.clone();
    let x = x.clone();
    ApproxReal::try_from_fn(move |n| {
        let goal = Rational::pow2(1 - n as i64);
        let last = n + budget;
        for t in 0..=last {
            let q = x.eval(t + 1)?;
            let margin = Rational::pow2(-(t as i64));
            let enclosure = iso.sandwich(&(&q - &margin), &(&q + &margin), t)?;
            if enclosure.width() <= goal {
                return Ok(enclosure.midpoint());
            }
        }
        Err(Error::StageBudgetExceeded { budget: last })
    })
    .with_bound(Rational::one())
}

/// `G(y)`: at stage `t`, binary search on the grid `i 2^-t` for the
/// largest `x` with `F(x) < y` certified and the smallest with `F(x) > y`
/// certified; these bracket `G_<(y) <= G_>(y)`. Converges exactly when
/// `G_<(y) = G_>(y)`.
pub fn cdf_inverse(iso: &CdfIsomorphism, y: &ApproxReal, budget: u32) -> ApproxReal {
    let iso = iso.clone();
    let y = y.clone();
    ApproxReal::try_from_fn(move |n| {
        let goal = Rational::pow2(1 - n as i64);
        let last = n + budget;
        for t in 1..=last {
            let yq = y.eval(t)?;
            let eps = Rational::pow2(-(t as i64));
            let (y_lo, y_hi) = (&yq - &eps, &yq + &eps);
            let grid = |i: u64| Rational::integer(i as i64) * eps.clone();
            let cells = 1u64 << t.min(62);
            let below =
                |i: u64| -> Result<bool> { Ok(iso.measure.cdf_bounds(&grid(i), t)?.hi < y_lo) };
            let above =
                |i: u64| -> Result<bool> { Ok(iso.measure.cdf_bounds(&grid(i), t)?.lo > y_hi) };
            // Largest certified-below grid point (or 0).
            let (mut a, mut b) = (0u64, cells);
            while a < b {
                let mid = a + (b - a).div_ceil(2);
                if below(mid)? {
                    a = mid;
                } else {
                    b = mid - 1;
                }
            }
            let lo = grid(a);
            // Smallest certified-above grid point (or 1).
            let (mut c, mut d) = (0u64, cells);
            while c < d {
                let mid = c + (d - c) / 2;
                if above(mid)? {
                    d = mid;
                } else {
                    c = mid + 1;
                }
            }
            let hi = grid(c);
            if hi >= lo && &hi - &lo <= goal {
                return Ok((lo + hi).half());
            }
        }
        Err(Error::StageBudgetExceeded { budget: last })
    })
    .with_bound(Rational::one())
}

/// The first `k` binary digits of `x`, each certified by a strict
/// comparison with the next dyadic; `budget` extra bits of precision are
/// tried per digit.
pub fn binary_expand(x: &ApproxReal, k: usize, budget: u32) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(k);
    let mut base = Rational::zero();
    for i in 1..=k {
        let step = Rational::pow2(-(i as i64));
        let cut = ApproxReal::constant(&base + &step);
        let mut decided = None;
        for p in (i as u32 + 2)..=(i as u32 + 2 + budget) {
            match separate(x, &cut, p)? {
                Separation::Greater => {
                    decided = Some(true);
                    break;
                }
                Separation::Less => {
                    decided = Some(false);
                    break;
                }
                Separation::Unseparated => {}
            }
        }
        let bit = decided.ok_or(Error::DyadicBoundary { bit: i })?;
        if bit {
            base += step;
        }
        bits.push(bit);
    }
    Ok(bits)
}

/// `Σ ω_i 2^-i`, reading `n + 1` bits for precision `n`.
pub fn binary_decode(bits: &ApproxPoint) -> Result<ApproxReal> {
    if bits.space() != SpaceId::Cantor {
        return Err(Error::SpaceMismatch {
            expected: SpaceId::Cantor,
            found: bits.space(),
        });
    }
    let bits = bits.clone();
    Ok(ApproxReal::try_from_fn(move |n| {
        Ok(crate::spaces::prefix_value(&bits.bits(n as usize + 1)?))
    })
    .with_bound(Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::prokhorov_bisect;
    use crate::spaces::parse_bits;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c(x: Rational) -> ApproxReal {
        ApproxReal::constant(x)
    }

    fn within(v: Rational, target: Rational, n: u32) -> bool {
        (v - target).abs() <= Rational::pow2(-(n as i64))
    }

    /// Density 3/2 on [0, 1/2] and 1/2 on (1/2, 1].
    fn tilted() -> ComputableMeasure {
        ComputableMeasure::piecewise_density(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![q(3, 2), q(1, 2)],
        )
        .unwrap()
    }

    /// Closed-form CDF of [`tilted`], written out independently.
    fn tilted_cdf(x: &Rational) -> Rational {
        if *x <= q(1, 2) {
            x * &q(3, 2)
        } else {
            q(3, 4) + (x - &q(1, 2)) * q(1, 2)
        }
    }

    #[test]
    fn atoms_are_rejected() {
        let mix = ComputableMeasure::atomic_mixture(
            vec![(crate::spaces::IdealPoint::Rational(q(1, 2)), q(1, 1))],
            Some(ComputableMeasure::lebesgue()),
            q(1, 2),
        )
        .unwrap();
        assert_eq!(CdfIsomorphism::new(&mix).unwrap_err(), Error::AtomicMeasure);
    }

    #[test]
    fn forward_examples() {
        let leb = CdfIsomorphism::new(&ComputableMeasure::lebesgue()).unwrap();
        let x = q(2, 7);
        assert!(within(
            cdf_forward(&leb, &c(x.clone()), 20).eval(10).unwrap(),
            x,
            10
        ));

        let sq = CdfIsomorphism::new(
            &ComputableMeasure::from_cdf(crate::measures::CdfForm::Power(2)).unwrap(),
        )
        .unwrap();
        for n in [4, 10, 16] {
            assert!(within(
                cdf_forward(&sq, &c(q(1, 2)), 20).eval(n).unwrap(),
                q(1, 4),
                n
            ));
        }

        let t = CdfIsomorphism::new(&tilted()).unwrap();
        assert!(within(
            cdf_forward(&t, &c(q(1, 2)), 20).eval(12).unwrap(),
            q(3, 4),
            12
        ));
        let s2 = ApproxReal::sqrt(q(1, 2));
        let v = cdf_forward(&t, &s2, 20).eval(12).unwrap();
        // F(1/√2) = 3/4 + (1/√2 - 1/2)/2
        let s2q = s2.eval(30).unwrap();
        assert!(within(v, tilted_cdf(&s2q), 11));
    }

    #[test]
    fn inverse_examples() {
        let leb = CdfIsomorphism::new(&ComputableMeasure::lebesgue()).unwrap();
        assert!(within(
            cdf_inverse(&leb, &c(q(3, 7)), 20).eval(12).unwrap(),
            q(3, 7),
            12
        ));
        let t = CdfIsomorphism::new(&tilted()).unwrap();
        assert!(within(
            cdf_inverse(&t, &c(q(3, 4)), 20).eval(12).unwrap(),
            q(1, 2),
            12
        ));

        let flat = ComputableMeasure::piecewise_density(
            vec![q(0, 1), q(1, 3), q(2, 3), q(1, 1)],
            vec![q(3, 2), q(0, 1), q(3, 2)],
        )
        .unwrap();
        let f = CdfIsomorphism::new(&flat).unwrap();
        let y = flat.closed_cdf(&q(1, 3)).unwrap();
        assert_eq!(y, q(1, 2));
        let err = cdf_inverse(&f, &c(y), 10).eval(8).unwrap_err();
        assert!(matches!(err, Error::StageBudgetExceeded { .. }));
    }

    #[test]
    fn round_trip_through_the_cdf() {
        let t = CdfIsomorphism::new(&tilted()).unwrap();
        for (a, b) in [(1, 3), (2, 5), (5, 7), (9, 11), (1, 10)] {
            let x = c(q(a, b));
            let g = cdf_inverse(&t, &cdf_forward(&t, &x, 24), 24);
            assert!(within(g.eval(10).unwrap(), q(a, b), 10), "{a}/{b}");
        }
    }

    #[test]
    fn image_measure_is_lebesgue() {
        let t = CdfIsomorphism::new(&tilted()).unwrap();
        let img = t.image_measure().unwrap();
        let leb = ComputableMeasure::lebesgue();
        for n in 3..6 {
            let gap = prokhorov_bisect(
                &img.approximant(n).unwrap(),
                &leb.approximant(n).unwrap(),
                14,
            )
            .unwrap();
            assert!(gap.lo <= Rational::pow2(1 - n as i64), "n = {n}: {gap:?}");
        }
    }

    #[test]
    fn expansion_examples() {
        let bits = |s: &str| parse_bits(s).unwrap();
        assert_eq!(binary_expand(&c(q(1, 3)), 6, 8).unwrap(), bits("010101"));
        assert_eq!(binary_expand(&c(q(2, 3)), 4, 8).unwrap(), bits("1010"));
        assert_eq!(
            binary_expand(&c(q(1, 2)), 3, 8).unwrap_err(),
            Error::DyadicBoundary { bit: 1 }
        );
        assert_eq!(
            binary_expand(&c(q(3, 8)), 5, 8).unwrap_err(),
            Error::DyadicBoundary { bit: 3 }
        );
    }

    #[test]
    fn decode_examples() {
        let one = ApproxPoint::ideal(&crate::spaces::IdealPoint::word(&[true]));
        assert_eq!(binary_decode(&one).unwrap().eval(7).unwrap(), q(1, 2));
        let alt = ApproxPoint::periodic(&[false, true]);
        let d = binary_decode(&alt).unwrap();
        for n in 0..30 {
            assert!(within(d.eval(n).unwrap(), q(1, 3), n));
        }
        let zero = ApproxPoint::ideal(&crate::spaces::IdealPoint::word(&[]));
        assert_eq!(binary_decode(&zero).unwrap().eval(5).unwrap(), q(0, 1));
    }
}
