use super::*;
use crate::exact::{ApproxReal, Interval, Rational};
use crate::measures::{ComputableMeasure, Morphism};
use crate::randomness::{oscillating_block_end, oscillating_point};
use crate::spaces::{parse_bits, ApproxPoint, IdealPoint};
use crate::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn bits(s: &str) -> Vec<bool> {
    parse_bits(s).unwrap()
}

fn words(len: usize) -> Vec<Vec<bool>> {
    (0..1u32 << len)
        .map(|k| (0..len).map(|i| k >> (len - 1 - i) & 1 == 1).collect())
        .collect()
}

/// C_n([u], [v]) for the shift by counting words of length n + max(|u|, |v|).
fn brute_correlation(u: &[bool], v: &[bool], n: usize) -> Rational {
    let len = (n + u.len()).max(v.len());
    let mut both = 0i64;
    for w in words(len) {
        if w[n..].starts_with(u) && w.starts_with(v) {
            both += 1;
        }
    }
    Rational::new(both, 1 << len)
        - Rational::pow2(-(u.len() as i64)) * Rational::pow2(-(v.len() as i64))
}

#[test]
fn map_examples() {
    let mp = DynSystem::manneville_pomeau(q(1, 1)).unwrap();
    assert_eq!(mp.step_exact(&q(0, 1)), Some(q(0, 1)));
    assert_eq!(mp.step_exact(&q(1, 2)), Some(q(3, 4)));

    let d = DynSystem::doubling();
    let mut x = q(1, 3);
    for _ in 0..5 {
        x = d.step_exact(&x).unwrap();
    }
    assert_eq!(x, q(2, 3));
    let y = iterate(&d, &ApproxPoint::interval(ApproxReal::constant(q(1, 3))), 5).unwrap();
    assert!(y.real().unwrap().enclosure(30).unwrap().contains(&q(2, 3)));

    let s = iterate(&DynSystem::shift(), &ApproxPoint::periodic(&bits("011")), 4).unwrap();
    assert_eq!(s.bits(6).unwrap(), bits("110110"));
    assert!(DynSystem::manneville_pomeau(q(1, 5)).is_err());
    assert!(DynSystem::manneville_pomeau(q(-1, 2)).is_err());
}

#[test]
fn mp_enclosure_contains_exact_orbit() {
    let mp = DynSystem::manneville_pomeau(q(1, 1)).unwrap();
    let x0 = q(2, 7);
    let orbit = mp
        .orbit_enclosure(&Interval::point(x0.clone()), 9, 256)
        .unwrap();
    let mut x = x0;
    for (i, iv) in orbit.iter().enumerate() {
        assert!(iv.contains(&x), "step {i}");
        let y = &x + &(&x * &x);
        x = if y >= Rational::one() {
            y - Rational::one()
        } else {
            y
        };
    }
    let err = mp
        .orbit_enclosure(&Interval::point(q(2, 7)), 400, 24)
        .unwrap_err();
    assert!(matches!(err, Error::PrecisionExhausted { .. }), "{err:?}");
}

#[test]
fn birkhoff_examples() {
    let shift = DynSystem::shift();
    let one = Observable::cylinder(&[true]);
    let alt = ApproxPoint::periodic(&bits("01"));
    assert_eq!(
        birkhoff_average(&shift, &one, &alt, 1000).unwrap().exact(),
        Some(&q(1, 2))
    );

    let d = DynSystem::doubling();
    let left = Observable::interval(q(0, 1), q(1, 2)).unwrap();
    let zero = ApproxPoint::interval(ApproxReal::constant(q(0, 1)));
    for n in [1, 7, 100] {
        assert_eq!(
            birkhoff_average(&d, &left, &zero, n).unwrap().exact(),
            Some(&q(1, 1))
        );
    }

    let end4 = oscillating_block_end(10, 4);
    let osc = oscillating_point(10).unwrap();
    let avg = birkhoff_average(&shift, &one, &osc, end4).unwrap();
    assert!(avg.interval().lo >= q(9, 10));
}

#[test]
fn averages_agree_with_direct_counts() {
    let shift = DynSystem::shift();
    let f = Observable::cylinder(&bits("10"));
    let x = pseudorandom_point(7);
    let ns = [1u64, 5, 64, 333];
    let got = birkhoff_averages(&shift, &f, &x, &ns).unwrap();
    let b = x.bits(400).unwrap();
    for (n, avg) in ns.iter().zip(&got) {
        let hits = (0..*n as usize).filter(|&i| b[i] && !b[i + 1]).count() as i64;
        assert_eq!(
            avg.exact(),
            Some(&Rational::new(hits, *n as i64)),
            "n = {n}"
        );
    }
    assert!(birkhoff_averages(&shift, &f, &x, &[5, 3]).is_err());
}

#[test]
fn correlation_examples() {
    let shift = DynSystem::shift();
    let (z, o) = (
        Observable::cylinder(&[false]),
        Observable::cylinder(&[true]),
    );
    assert_eq!(correlation(&shift, &z, &o, 1).unwrap(), q(0, 1));
    assert_eq!(correlation(&shift, &z, &z, 0).unwrap(), q(1, 4));
    let all = Observable::cylinder(&[]);
    assert_eq!(correlation(&shift, &z, &all, 3).unwrap(), q(0, 1));

    for (u, v) in [("0", "0"), ("01", "10"), ("110", "1"), ("1", "0110")] {
        let (u, v) = (bits(u), bits(v));
        for n in 0..6 {
            let c = correlation(
                &shift,
                &Observable::cylinder(&u),
                &Observable::cylinder(&v),
                n as u64,
            )
            .unwrap();
            assert_eq!(c, brute_correlation(&u, &v, n), "{u:?} {v:?} {n}");
        }
    }
    let long = Observable::cylinder(&[true; 20]);
    assert!(matches!(
        correlation(&shift, &long, &long, 10),
        Err(Error::TooLarge(_))
    ));
}

#[test]
fn maps_preserve_their_measures() {
    let shift = DynSystem::shift();
    for len in 0..=6 {
        for w in words(len) {
            let f = Observable::cylinder(&w);
            assert_eq!(
                preimage_mean(&shift, &f).unwrap(),
                Rational::pow2(-(len as i64))
            );
        }
    }
    let d = DynSystem::doubling();
    for (a, b) in [(0, 1), (1, 4), (3, 8), (5, 11)] {
        let lo = Rational::new(a, 16);
        let hi = Rational::new(a + b, 16);
        let f = Observable::interval(lo.clone(), hi.clone()).unwrap();
        assert_eq!(preimage_mean(&d, &f).unwrap(), hi - lo);
    }
}

#[test]
fn shift_and_doubling_mix_exactly() {
    let shift = DynSystem::shift();
    let events: Vec<Observable> = (1..=3)
        .flat_map(words)
        .map(|w| Observable::cylinder(&w))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..events.len())
        .flat_map(|i| (0..events.len()).map(move |j| (i, j)))
        .collect();
    let bound = CorrelationBound::new(q(1, 2), |_, _| q(1, 1000)).unwrap();
    let ns: Vec<u64> = (3..=12).collect();
    let report = verify_mixing(&shift, &events, &pairs, &bound, &ns).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.shift_horizon_zero, Some(true));
    assert!(report
        .entries
        .iter()
        .all(|e| e.correlation_lo.is_zero() && e.correlation_hi.is_zero()));

    let d = DynSystem::doubling();
    let dy = [
        Observable::interval(q(1, 4), q(1, 2)).unwrap(),
        Observable::interval(q(3, 8), q(1, 2)).unwrap(),
    ];
    for n in 3..8 {
        assert_eq!(
            correlation(&d, &dy[0], &dy[1], n).unwrap(),
            q(0, 1),
            "n = {n}"
        );
    }
    assert_ne!(correlation(&d, &dy[1], &dy[1], 1).unwrap(), q(0, 1));
}

#[test]
fn golden_rotation_breaks_polynomial_decay() {
    let root5 = ApproxReal::sqrt(q(5, 1));
    let theta = ApproxReal::try_from_fn(move |n| Ok((root5.eval(n + 1)? - Rational::one()).half()));
    let rot = DynSystem::rotation(theta);
    let half = Observable::interval(q(0, 1), q(1, 2)).unwrap();
    let bound = CorrelationBound::new(q(1, 2), |_, _| q(1, 4)).unwrap();
    let fib = [
        1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987,
    ];
    let report = verify_mixing(&rot, &[half], &[(0, 0)], &bound, &fib).unwrap();
    assert!(report.any_fail());
    let last = report.entries.last().unwrap();
    assert!(last.correlation_lo > q(1, 5), "{last:?}");
}

/// μ{|S_n/n - mean| > δ} for the shift and `f = 1_[w]`, by brute force.
fn brute_deviation(w: &[bool], n: usize, delta: &Rational) -> Rational {
    let len = n + w.len() - 1;
    let mean = Rational::pow2(-(w.len() as i64));
    let mut hit = 0i64;
    for word in words(len) {
        let s = (0..n).filter(|&i| word[i..].starts_with(w)).count() as i64;
        if (Rational::new(s, n as i64) - mean.clone()).abs() > *delta {
            hit += 1;
        }
    }
    Rational::new(hit, 1 << len)
}

#[test]
fn deviation_examples() {
    let shift = DynSystem::shift();
    let one = Observable::cylinder(&[true]);
    assert_eq!(
        deviation_measure(&shift, &one, &q(2, 5), 2, DeviationMode::Exact).unwrap(),
        q(1, 2)
    );
    assert_eq!(
        deviation_measure(&shift, &one, &q(2, 5), 2, DeviationMode::Chebyshev).unwrap(),
        q(25, 32)
    );
    assert_eq!(
        deviation_measure(&shift, &one, &q(2, 1), 5, DeviationMode::Exact).unwrap(),
        q(0, 1)
    );
    assert!(matches!(
        deviation_measure(&shift, &one, &q(1, 5), 10, DeviationMode::Exact),
        Err(Error::BadDelta { n: 10, .. })
    ));
    assert!(!delta_admissible(&shift, &one, &q(1, 5), 10).unwrap());
    assert!(delta_admissible(&shift, &one, &q(1, 5), 16).unwrap());
}

#[test]
fn deviation_counts_match_brute_force() {
    let shift = DynSystem::shift();
    for w in ["1", "11", "10"] {
        let w = bits(w);
        let f = Observable::cylinder(&w);
        for n in 1..=12 {
            for delta in [q(1, 5), q(2, 5), q(3, 5), q(1, 7)] {
                if !delta_admissible(&shift, &f, &delta, n as u64).unwrap() {
                    continue;
                }
                let exact =
                    deviation_measure(&shift, &f, &delta, n as u64, DeviationMode::Exact).unwrap();
                assert_eq!(
                    exact,
                    brute_deviation(&w, n, &delta),
                    "{w:?} n={n} δ={delta}"
                );
                let cheb =
                    deviation_measure(&shift, &f, &delta, n as u64, DeviationMode::Chebyshev)
                        .unwrap();
                assert!(exact <= cheb, "{w:?} n={n} δ={delta}");
            }
        }
    }
}

#[test]
fn deviation_cover_is_the_deviation_set() {
    let shift = DynSystem::shift();
    let f = Observable::cylinder(&bits("11"));
    let delta = q(1, 5);
    let n = 6;
    let cover = deviation_cover(&shift, &f, &delta, n).unwrap();
    for w in words(n as usize + 1) {
        let s = (0..n as usize).filter(|&i| w[i] && w[i + 1]).count() as i64;
        let inside = (Rational::new(s, n as i64) - q(1, 4)).abs() > delta;
        let listed = cover
            .iter()
            .any(|b| b.contains_ideal(&IdealPoint::word(&w)).unwrap());
        assert_eq!(listed, inside, "{w:?}");
    }
    let d = DynSystem::doubling();
    let left = Observable::interval(q(0, 1), q(1, 2)).unwrap();
    let m = deviation_measure(&d, &left, &q(2, 5), 2, DeviationMode::Exact).unwrap();
    assert_eq!(m, q(1, 2));
    let mu = ComputableMeasure::lebesgue();
    let cover = deviation_cover(&d, &left, &q(2, 5), 2).unwrap();
    assert_eq!(mu.lower(&cover, 12).unwrap(), q(1, 2));
}

#[test]
fn schedule_examples() {
    let s = make_schedule(q(1, 2)).unwrap();
    assert_eq!(s.beta(), &q(3, 1));
    assert_eq!(s.indices(4).unwrap(), vec![1, 8, 27, 64]);
    assert_eq!(make_schedule(q(3, 4)).unwrap().beta(), &q(2, 1));
    assert_eq!(make_schedule(q(1, 3)).unwrap().beta(), &q(4, 1));
    assert!(matches!(make_schedule(q(1, 1)), Err(Error::BadAlpha(_))));
    assert!(matches!(make_schedule(q(0, 1)), Err(Error::BadAlpha(_))));
    assert!(SubsequenceSchedule::new(q(1, 2), q(2, 1)).is_err());

    let partial: f64 = (10..1_000_000u64).map(|i| (i as f64).powf(-1.5)).sum();
    assert!(s.tail_bound(10).unwrap().to_f64() >= partial);
    let inv: f64 = (10..1_000_000u64).map(|i| (i as f64).powi(-3)).sum();
    assert!(s.inverse_tail(10).unwrap().to_f64() >= inv);

    for i in 1..50 {
        assert!(s.ratio(i).unwrap() < s.ratio(i + 1).unwrap());
        assert_eq!(
            s.ratio(i).unwrap(),
            Rational::new(i as i64, i as i64 + 1).pow(3)
        );
    }
    assert_eq!(s.monotone_from(50).unwrap(), 1);

    let frac = SubsequenceSchedule::new(q(1, 2), q(5, 2)).unwrap();
    assert_eq!(frac.index(2).unwrap(), 6);
    assert_eq!(frac.index(4).unwrap(), 32);
}

#[test]
fn interpolation_examples() {
    let m = q(3, 1);
    let flat = vec![m.clone(); 20];
    assert!(interpolation_gap_check(&flat, 15, 20, &q(3, 4), &m).unwrap());

    let (k, l) = (15usize, 20usize);
    let beta = Rational::new(k as i64, l as i64);
    let tight: Vec<Rational> = (0..l)
        .map(|i| if i < k { m.clone() } else { -m.clone() })
        .collect();
    let sk: Rational = tight[..k].iter().cloned().sum();
    let sl: Rational = tight.iter().cloned().sum();
    let gap = sk / Rational::integer(k as i64) - sl / Rational::integer(l as i64);
    assert_eq!(
        gap,
        Rational::integer(2) * (Rational::one() - beta.clone()) * m.clone()
    );
    assert!(interpolation_gap_check(&tight, k, l, &beta, &m).unwrap());

    assert!(matches!(
        interpolation_gap_check(&tight, 10, 20, &beta, &m),
        Err(Error::BadRatio { .. })
    ));
}

#[test]
fn step_examples() {
    let leb = ComputableMeasure::lebesgue();
    let id = StepSource::Map(Morphism::Identity);
    let a = step_approx(&id, &leb, &q(1, 2), 40, 20).unwrap();
    a.check().unwrap();
    assert!(a.max_gap() < q(1, 2));
    assert!(a.levels.first().unwrap().enclosure().hi <= q(-1, 1));
    assert!(a.levels.last().unwrap().enclosure().lo >= q(1, 1));

    let bern = ComputableMeasure::bernoulli(q(1, 2)).unwrap();
    let f = StepSource::Observable(Observable::cylinder(&[true]));
    let a = step_approx(&f, &bern, &q(1, 4), 40, 20).unwrap();
    a.check().unwrap();
    for l in &a.levels {
        let e = l.enclosure();
        assert!(!e.contains(&q(0, 1)) && !e.contains(&q(1, 1)), "{e:?}");
    }

    let a = step_approx(&f, &bern, &q(3, 1), 40, 20).unwrap();
    assert_eq!(a.levels.len(), 2);
    a.check().unwrap();
}

#[test]
fn typicality_examples() {
    let shift = DynSystem::shift();
    let one = Observable::cylinder(&[true]);
    let x = pseudorandom_point(2026);
    let avg = birkhoff_average(&shift, &one, &x, 1 << 20).unwrap();
    assert!((avg.value() - q(1, 2)).abs() <= q(1, 50));

    let s = make_schedule(q(1, 2)).unwrap();
    let r = typicality_experiment(&shift, &oscillating_point(10).unwrap(), &one, &s, 100).unwrap();
    assert!(r.oscillation() >= q(1, 2), "{}", r.oscillation());

    let d = DynSystem::doubling();
    let left = Observable::interval(q(0, 1), q(1, 2)).unwrap();
    let third = ApproxPoint::interval(ApproxReal::constant(q(1, 3)));
    let r = typicality_experiment(&d, &third, &left, &make_schedule(q(3, 4)).unwrap(), 10).unwrap();
    for row in &r.rows {
        if row.n % 2 == 0 {
            assert_eq!(row.average.exact(), Some(&q(1, 2)), "n = {}", row.n);
        }
    }
    let csv = r.to_csv();
    assert!(csv.starts_with("n,S_n_over_n,mean,abs_dev,on_schedule\n"));
    assert!(csv.contains("\n4,1/2,1/2,0/1,true\n"), "{csv}");
}

#[test]
fn point_specs_parse() {
    for (text, want) in [
        ("3/7", PointSpec::Rational { value: q(3, 7) }),
        ("1/1", PointSpec::Rational { value: q(1, 1) }),
        (
            "0110",
            PointSpec::Word {
                prefix: bits("0110"),
                period: vec![],
            },
        ),
        (
            "01(10)",
            PointSpec::Word {
                prefix: bits("01"),
                period: bits("10"),
            },
        ),
        ("random:42", PointSpec::Pseudorandom { seed: 42 }),
        ("osc:10", PointSpec::Oscillating { base: 10 }),
    ] {
        let p: PointSpec = text.parse().unwrap();
        assert_eq!(p, want);
        assert_eq!(p.to_string().parse::<PointSpec>().unwrap(), want);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PointSpec>(&json).unwrap(), want);
    }
    for bad in ["3/", "2/1", "01(", "random:x", "osc:1", "0a1"] {
        assert!(bad.parse::<PointSpec>().is_err(), "{bad:?}");
    }
    let x = "01(10)".parse::<PointSpec>().unwrap().to_point().unwrap();
    assert_eq!(x.bits(7).unwrap(), bits("0110101"));
}
