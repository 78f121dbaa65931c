use num_bigint::BigInt;
use num_integer::Integer;

use typicality_core::dynamics::DynSystem;
use typicality_core::exact::{Interval, Rational};
use typicality_core::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Round to nearest (ties to even) with `bits` significant bits.
fn round_to(x: &Rational, bits: i64) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let scale = Rational::pow2(bits - x.ceil_log2());
    let scaled = x * &scale;
    let (fl, frac) = (scaled.floor(), scaled.fract());
    let n = if frac > q(1, 2) || (frac == q(1, 2) && fl.is_odd()) {
        fl + BigInt::from(1)
    } else {
        fl
    };
    Rational::from_bigint(n) / scale
}

fn reference_orbit(x0: &Rational, n: usize, bits: i64) -> Vec<Rational> {
    let mut out = vec![round_to(x0, bits)];
    for _ in 0..n {
        let x = out.last().unwrap();
        let y = round_to(&(x + &(x * x)), bits);
        out.push(if y >= Rational::one() {
            y - Rational::one()
        } else {
            y
        });
    }
    out
}

fn mp() -> DynSystem {
    DynSystem::manneville_pomeau(q(1, 1)).unwrap()
}

#[test]
fn same_grid_enclosure_holds_until_exhausted() {
    let refs = reference_orbit(&q(1, 3), 1000, 256);
    let mut iv = Interval::new(q(1, 3).floor_dyadic(256), q(1, 3).ceil_dyadic(256));
    let mut last = 0;
    for (step, r) in refs.iter().enumerate() {
        if step > 0 {
            match mp().step_interval(&iv, 256, step as u64) {
                Ok(next) => iv = next,
                Err(Error::PrecisionExhausted { step: s }) => {
                    assert_eq!(s as usize, step);
                    break;
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(iv.contains(r), "step {step}");
        last = step;
    }
    assert!((380..1000).contains(&last), "lasted {last} steps");
}

#[test]
fn working_precision_carries_a_thousand_steps() {
    let sys = mp();
    let bits = sys.working_bits(1000, 256);
    let orbit = sys
        .orbit_enclosure(&Interval::point(q(1, 3)), 1000, bits)
        .unwrap();
    assert_eq!(orbit.len(), 1001);
    assert!(orbit.iter().all(|iv| iv.width() <= Rational::pow2(-256)));

    // The 256-bit reference drifts away from the true orbit.
    let refs = reference_orbit(&q(1, 3), 1000, 256);
    let drift = refs
        .iter()
        .zip(&orbit)
        .position(|(r, iv)| (r - &iv.midpoint()).abs() > q(1, 8));
    let drift = drift.expect("reference should drift");
    assert!((300..1000).contains(&drift), "drift at {drift}");

    // A 1024-bit reference stays inside for all 1000 steps.
    let fine = reference_orbit(&q(1, 3), 1000, 1024);
    let tol = Rational::pow2(-300);
    for (step, (r, iv)) in fine.iter().zip(&orbit).enumerate() {
        assert!((r - &iv.midpoint()).abs() <= tol, "step {step}");
    }
}
