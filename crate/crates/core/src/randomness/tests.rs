use super::*;
use crate::dynamics::{
    deviation_cover, deviation_measure, make_schedule, DeviationMode, DynSystem, Observable,
};
use crate::spaces::{parse_bits, IdealPoint};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn bits(s: &str) -> Vec<bool> {
    parse_bits(s).unwrap()
}

/// Merged open intervals of a list of interval balls.
fn merged(balls: &[IdealBall]) -> Vec<(Rational, Rational)> {
    let mut ivs: Vec<(Rational, Rational)> =
        balls.iter().map(|b| b.interval_ends().unwrap()).collect();
    ivs.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in ivs {
        match out.last_mut() {
            Some(last) if lo < last.1 => last.1 = last.1.clone().max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn word_in(balls: &[IdealBall], w: &[bool]) -> bool {
    balls
        .iter()
        .any(|b| b.contains_ideal(&IdealPoint::word(w)).unwrap())
}

#[test]
fn zeros_fail_every_cylinder_level() {
    let t = builtin_schnorr("cylinder-zeros").unwrap();
    let x = ApproxPoint::ideal(&IdealPoint::word(&[]));
    let v = verify_failure(&x, t.ml(), 12, 16).unwrap();
    assert!(v.is_complete());
    assert_eq!(v.certificates.len(), 12);
    for c in &v.certificates {
        assert!(c.replay(&x, t.ml()).unwrap());
    }
}

#[test]
fn zero_then_ones_escapes_level_two() {
    let t = builtin_schnorr("cylinder-zeros").unwrap();
    let x = ApproxPoint::eventually_periodic(&bits("0"), &bits("1"));
    let v = verify_failure(&x, t.ml(), 3, 24).unwrap();
    assert_eq!(v.uncertified, vec![2, 3]);
    assert_eq!(v.certificates.len(), 1);
}

#[test]
fn small_dyadic_point_fails_initial_interval_level() {
    let t = builtin_schnorr("initial-intervals").unwrap();
    for n in 1..8u32 {
        let x = ApproxPoint::interval(ApproxReal::constant(Rational::pow2(-(n as i64) - 2)));
        let v = verify_failure(&x, t.ml(), n, 2 * n + 8).unwrap();
        assert!(v.is_complete(), "level {n}: {:?}", v.uncertified);
        assert!(v.certificates.iter().all(|c| c.replay(&x, t.ml()).unwrap()));
    }
}

#[test]
fn halving_intervals_convert_to_double_exponential_levels() {
    let bc = builtin_strong_bc("halving-intervals").unwrap();
    assert_eq!(least_exponent(bc.sum_upper()), 1);
    let s = strong_bc_to_schnorr(&bc).unwrap();
    for k in 1..=3u32 {
        let m = 1i64 << (k + 1);
        let cover = s.level(k).stage(m as u32 + 3);
        assert_eq!(
            merged(&cover),
            vec![(q(0, 1), Rational::pow2(-m))],
            "k = {k}"
        );
        let (lo, hi) = s.measure_enclosure(k, 24).unwrap();
        assert!(lo <= Rational::pow2(-m) && Rational::pow2(-m) <= hi);
        assert!(hi < Rational::pow2(-(k as i64)));
    }
    assert!(s.level(2).stage(7).is_empty());
}

#[test]
fn cantor_ones_convert_to_long_cylinders() {
    let bc = builtin_strong_bc("cantor-ones").unwrap();
    let s = strong_bc_to_schnorr(&bc).unwrap();
    let cover = s.level(1).stage(6);
    for k in 0..64u32 {
        let w: Vec<bool> = (0..6).map(|i| k >> (5 - i) & 1 == 1).collect();
        assert_eq!(word_in(&cover, &w), w.starts_with(&[true; 4]), "{w:?}");
    }
    let (lo, hi) = s.measure_enclosure(1, 16).unwrap();
    assert!(lo <= q(1, 16) && q(1, 16) <= hi && hi < q(1, 2));
}

#[test]
fn empty_test_converts_to_empty_levels() {
    let bc = builtin_strong_bc("empty").unwrap();
    assert_eq!(least_exponent(bc.sum_upper()), 0);
    let s = strong_bc_to_schnorr(&bc).unwrap();
    for k in 0..4 {
        assert!(s.level(k).stage(40).is_empty());
        let (_, hi) = s.measure_enclosure(k, 12).unwrap();
        assert!(hi <= Rational::pow2(-11));
    }
}

#[test]
fn constant_must_dominate_the_sum() {
    let bc = builtin_strong_bc("halving-intervals").unwrap();
    assert!(matches!(
        strong_bc_to_schnorr_with(&bc, 0),
        Err(Error::BadConstant { c: 0, .. })
    ));
    assert!(strong_bc_to_schnorr_with(&bc, 2).is_ok());
    assert_eq!(least_exponent(&q(3, 2)), 1);
    assert_eq!(least_exponent(&q(2, 1)), 2);
    assert_eq!(least_exponent(&q(-1, 1)), 0);
}

#[test]
fn hits_grow_with_stage() {
    let bc = builtin_strong_bc("cantor-ones").unwrap();
    let x = ApproxPoint::eventually_periodic(&bits("11111"), &bits("0"));
    let mut prev = 0;
    for stage in 0..12 {
        let h = bc.hits(&x, stage).unwrap();
        assert!(h.len() >= prev);
        prev = h.len();
    }
    assert_eq!(bc.hits(&x, 12).unwrap(), vec![1, 2, 3, 4, 5]);
}

fn zeros_witnessed() -> WitnessedTest {
    let t = builtin_schnorr("cylinder-zeros").unwrap();
    WitnessedTest::new(
        t,
        |n| IdealBall::cantor(&[], Rational::pow2(-(n as i64))).unwrap(),
        4,
    )
}

fn alternating_test() -> SchnorrTest {
    let ml = MLTest::new(
        "alternating",
        crate::measures::ComputableMeasure::bernoulli(q(1, 2)).unwrap(),
        |n| {
            let w: Vec<bool> = (0..2 * n as usize).map(|i| i % 2 == 1).collect();
            EffectiveOpen::cylinder(&w)
        },
    );
    SchnorrTest::new(ml, |n| ApproxReal::constant(Rational::pow2(-2 * n as i64)))
}

#[test]
fn constructed_points_match_examples() {
    let x = construct_failing_point(&zeros_witnessed(), 10).unwrap();
    assert_eq!(x.bits(30).unwrap(), vec![false; 30]);

    let t = alternating_test();
    let w = WitnessedTest::new(
        t.clone(),
        |n| {
            let c: Vec<bool> = (0..2 * n as usize).map(|i| i % 2 == 1).collect();
            IdealBall::cantor(&c, Rational::pow2(-2 * n as i64)).unwrap()
        },
        4,
    );
    let x = construct_failing_point(&w, 10).unwrap();
    assert_eq!(x.bits(12).unwrap(), bits("010101010101"));
    let v = verify_failure(&x, t.ml(), 20, 48).unwrap();
    assert!(v.is_complete(), "{:?}", v.uncertified);
    let v = verify_failure(
        &construct_failing_point(&zeros_witnessed(), 4).unwrap(),
        zeros_witnessed().test().ml(),
        20,
        24,
    )
    .unwrap();
    assert!(v.is_complete());
}

#[test]
fn broken_chain_is_reported() {
    let t = builtin_schnorr("cylinder-zeros").unwrap();
    let w = WitnessedTest::new(
        t,
        |n| match n {
            2 => IdealBall::cantor(&bits("1"), q(1, 4)).unwrap(),
            _ => IdealBall::cantor(&[], Rational::pow2(-(n as i64))).unwrap(),
        },
        4,
    );
    let err = construct_failing_point(&w, 5).unwrap_err();
    assert!(
        matches!(err, Error::BrokenWitnessChain { level: 2, .. }),
        "{err:?}"
    );
}

/// Counts ones by reading the bits, independently of the block formula.
fn ones_by_reading(base: u64, n: usize) -> u64 {
    oscillating_point(base)
        .unwrap()
        .bits(n)
        .unwrap()
        .iter()
        .filter(|&&b| b)
        .count() as u64
}

#[test]
fn oscillating_point_block_averages() {
    let end4 = oscillating_block_end(10, 4);
    assert_eq!(end4, 10 + 100 + 1000 + 10000);
    assert_eq!(
        oscillating_ones(10, end4),
        ones_by_reading(10, end4 as usize)
    );
    assert!(Rational::new(oscillating_ones(10, end4) as i64, end4 as i64) >= q(9, 10));
    let end5 = oscillating_block_end(10, 5);
    assert_eq!(
        oscillating_ones(10, end5),
        ones_by_reading(10, end5 as usize)
    );
    assert!(Rational::new(oscillating_ones(10, end5) as i64, end5 as i64) <= q(13, 100));

    let avg = |i: u32| {
        let e = oscillating_block_end(2, i);
        Rational::new(oscillating_ones(2, e) as i64, e as i64)
    };
    for i in (2..20).step_by(2) {
        assert!(avg(i) - avg(i + 1) > q(1, 10), "i = {i}");
    }
    assert!(oscillating_point(1).is_err());
}

#[test]
fn descriptions_round_trip() {
    let s = strong_bc_to_schnorr(&builtin_strong_bc("halving-intervals").unwrap()).unwrap();
    let d = s.describe(3, 20, 20).unwrap();
    d.check().unwrap();
    assert!(d.certifies_bound());
    let back: TestDescription = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
    back.check().unwrap();

    let z = builtin_schnorr("cylinder-zeros")
        .unwrap()
        .describe(4, 0, 30)
        .unwrap();
    z.check().unwrap();
    assert!(!z.certifies_bound());

    let x = ApproxPoint::ideal(&IdealPoint::word(&[]));
    let v = verify_failure(&x, builtin_schnorr("cylinder-zeros").unwrap().ml(), 3, 8).unwrap();
    let back: Verification = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(back, v);
}

/// Brute-force deviation mass over all words of length `n`.
fn brute_deviation(n: usize, delta: &Rational) -> Rational {
    let mut hit = 0i64;
    for w in 0u32..1 << n {
        let ones = w.count_ones() as i64;
        if (Rational::new(ones, n as i64) - q(1, 2)).abs() > *delta {
            hit += 1;
        }
    }
    Rational::new(hit, 1 << n)
}

#[test]
fn deviation_test_levels_are_exact_deviation_sets() {
    let sys = DynSystem::shift();
    let f = Observable::cylinder(&[true]);
    let delta = q(2, 5);
    let cover = deviation_cover(&sys, &f, &delta, 2).unwrap();
    for w in ["00", "01", "10", "11"] {
        assert_eq!(word_in(&cover, &bits(w)), w == "00" || w == "11", "{w}");
    }
    assert_eq!(brute_deviation(2, &delta), q(1, 2));

    let schedule = make_schedule(q(1, 2)).unwrap();
    let bc = deviation_schnorr_test(&sys, &f, &delta, &schedule).unwrap();
    let mu = bc.measure().clone();
    for i in 1..=2u32 {
        let n = schedule.index(i as u64).unwrap();
        let level = bc.level(i).stage(n as u32);
        assert_eq!(
            mu.lower(&level, n as u32 + 2).unwrap(),
            brute_deviation(n as usize, &delta),
            "level {i}"
        );
    }
    let (s1, s2) = (brute_deviation(1, &delta), brute_deviation(8, &delta));
    let sum = bc.sum().eval(3).unwrap();
    assert!(sum >= &s1 + &s2 - Rational::pow2(-3));
    assert!(sum <= bc.sum_upper().clone() + Rational::pow2(-3));
    assert_eq!(
        deviation_measure(&sys, &f, &delta, 8, DeviationMode::Exact).unwrap(),
        s2
    );

    let wide = deviation_schnorr_test(&sys, &f, &q(2, 1), &schedule).unwrap();
    assert!(wide.level(1).stage(10).is_empty());
}

#[test]
fn witnessed_builtins_build_failing_points() {
    for name in WITNESSED_BUILTINS {
        let w = builtin_witnessed(name, 4).unwrap();
        let x = construct_failing_point(&w, 8).unwrap();
        let v = verify_failure(&x, w.test().ml(), 12, 40).unwrap();
        assert!(v.is_complete(), "{name}: {:?}", v.uncertified);
    }
    assert!(builtin_witnessed("initial-intervals", 4).is_err());
    for name in SCHNORR_BUILTINS {
        builtin_schnorr(name)
            .unwrap()
            .describe(3, 8, 10)
            .unwrap()
            .check()
            .unwrap();
    }
}
