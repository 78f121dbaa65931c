use proptest::collection::vec;
use proptest::prelude::*;

use typicality_core::dynamics::{
    birkhoff_average, delta_admissible, deviation_measure, interpolation_gap_check, make_schedule,
    DeviationMode, DynSystem, Observable, PointSpec,
};
use typicality_core::exact::ApproxReal;
use typicality_core::exact::Rational;
use typicality_core::isomorphism::{binary_decode, binary_expand};
use typicality_core::measures::{prokhorov, ComputableMeasure, FiniteMeasure};
use typicality_core::spaces::{
    outer_cover, witness_cover, ApproxPoint, IdealBall, IdealPoint, SpaceId,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| q(n, d))
}

fn finite_measure(space: SpaceId, max: usize) -> impl Strategy<Value = FiniteMeasure> {
    vec((0u32..16, 0usize..5, 1i64..8), 1..=max).prop_map(move |atoms| {
        let total: i64 = atoms.iter().map(|a| a.2).sum();
        let pts = atoms.into_iter().map(|(k, len, w)| {
            let p = match space {
                SpaceId::UnitInterval => IdealPoint::Rational(q(k as i64, 15)),
                SpaceId::Cantor => {
                    IdealPoint::word(&(0..len).map(|i| k >> i & 1 == 1).collect::<Vec<_>>())
                }
            };
            (p, q(w, total))
        });
        FiniteMeasure::collect(space, pts).unwrap()
    })
}

fn space() -> impl Strategy<Value = SpaceId> {
    prop_oneof![Just(SpaceId::UnitInterval), Just(SpaceId::Cantor)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_text_round_trips(x in rational()) {
        prop_assert_eq!(x.to_pq().parse::<Rational>().unwrap(), x.clone());
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), x);
    }

    #[test]
    fn text_parsers_never_panic(s in "\\PC{0,24}") {
        let _ = s.parse::<Rational>();
        let _ = s.parse::<IdealPoint>();
        let _ = s.parse::<PointSpec>();
        let _ = serde_json::from_str::<FiniteMeasure>(&s);
        let _ = serde_json::from_str::<IdealBall>(&s);
    }

    #[test]
    fn point_spec_text_round_trips(s in "[01]{0,8}(\\([01]{1,4}\\))?") {
        let p: PointSpec = s.parse().unwrap();
        prop_assert_eq!(p.to_string().parse::<PointSpec>().unwrap(), p);
    }

    #[test]
    fn measures_round_trip_through_json(m in space().prop_flat_map(|s| finite_measure(s, 6))) {
        let json = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<FiniteMeasure>(&json).unwrap(), m);
    }

    #[test]
    fn prokhorov_is_a_metric(
        (a, b, c) in space().prop_flat_map(|s| (finite_measure(s, 5), finite_measure(s, 5), finite_measure(s, 5)))
    ) {
        let ab = prokhorov(&a, &b).unwrap();
        prop_assert_eq!(&ab, &prokhorov(&b, &a).unwrap());
        prop_assert!(!ab.is_negative() && ab <= Rational::one());
        prop_assert_eq!(prokhorov(&a, &a).unwrap(), Rational::zero());
        prop_assert_eq!(ab.is_zero(), a == b);
        let ac = prokhorov(&a, &c).unwrap();
        let bc = prokhorov(&b, &c).unwrap();
        prop_assert!(ac <= ab + bc);
    }

    #[test]
    fn interpolation_holds_on_bounded_streams(
        raw in vec(-50i64..=50, 1..120),
        m in 1i64..10,
        cut in 0.0f64..1.0,
    ) {
        let mm = q(m, 1);
        let values: Vec<Rational> = raw.iter().map(|v| q(v * m, 50)).collect();
        let l = values.len();
        let k = ((l as f64 * cut).ceil() as usize).clamp(1, l);
        let beta = q(k as i64, l as i64);
        prop_assert!(interpolation_gap_check(&values, k, l, &beta, &mm).unwrap());
    }

    #[test]
    fn shift_averages_count_hits(bits in vec(any::<bool>(), 1..200), n in 1u64..150) {
        let n = n.min(bits.len() as u64);
        let f = Observable::cylinder(&[true]);
        let x = ApproxPoint::eventually_periodic(&bits, &[false]);
        let avg = birkhoff_average(&DynSystem::shift(), &f, &x, n).unwrap();
        let ones = bits[..n as usize].iter().filter(|&&b| b).count() as i64;
        prop_assert_eq!(avg.exact(), Some(&q(ones, n as i64)));
    }

    #[test]
    fn exact_deviation_below_chebyshev(n in 1u64..=16, num in 1i64..10, den in 2i64..12, w in vec(any::<bool>(), 1..=2)) {
        let sys = DynSystem::shift();
        let f = Observable::cylinder(&w);
        let delta = q(num, den);
        prop_assume!(delta_admissible(&sys, &f, &delta, n).unwrap());
        let exact = deviation_measure(&sys, &f, &delta, n, DeviationMode::Exact).unwrap();
        let cheb = deviation_measure(&sys, &f, &delta, n, DeviationMode::Chebyshev).unwrap();
        prop_assert!(exact <= cheb);
    }

    #[test]
    fn schedule_indices_increase(num in 1i64..20, den in 2i64..21) {
        prop_assume!(num < den && 4 * num >= den);
        let s = make_schedule(q(num, den)).unwrap();
        prop_assert!(s.alpha() * s.beta() > Rational::one());
        let idx = s.indices(30).unwrap();
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        for i in [1u64, 5, 17] {
            let tail = s.tail_bound(i).unwrap().to_f64();
            let partial: f64 = (i..i + 500).map(|j| (s.index(j).unwrap() as f64).powf(-s.alpha().to_f64())).sum();
            prop_assert!(partial <= tail);
        }
    }

    #[test]
    fn expand_then_decode(n in 1i64..10_000, d in 1i64..5000) {
        let d = 2 * d + 1;
        let x = q(n % d, d);
        prop_assume!(!x.is_zero());
        let bits = binary_expand(&ApproxReal::constant(x.clone()), 30, 64).unwrap();
        let back = binary_decode(&ApproxPoint::ideal(&IdealPoint::word(&bits))).unwrap();
        prop_assert!((back.eval(32).unwrap() - x).abs() <= Rational::pow2(-29));
    }

    #[test]
    fn inner_cover_mass_below_outer(
        words in vec(vec(any::<bool>(), 1..5), 1..5),
        m in 1usize..3,
    ) {
        let sets: Vec<Vec<IdealBall>> = words.iter().map(|w| IdealBall::cylinder_pair(w).to_vec()).collect();
        let mu = ComputableMeasure::bernoulli(q(1, 2)).unwrap();
        let inner = witness_cover(SpaceId::Cantor, &sets, m, 8);
        let outer = outer_cover(SpaceId::Cantor, &sets, m, 8);
        let lo = mu.lower(&inner, 10).unwrap();
        let out_rest = mu.exterior_lower(&outer, 10).unwrap();
        prop_assert!(lo <= Rational::one() - out_rest);
    }
}
