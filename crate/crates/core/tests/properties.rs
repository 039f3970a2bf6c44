use std::collections::BTreeMap;

use modwalk::cfrac::expand;
use modwalk::chains::{
    classify_generator, coupled_step, interval_map, inversion_partner, lift, negation_partner,
    project_c, simulate_w, simulate_x, simulate_y, GammaElement,
};
use modwalk::minkowski::{kernel_pushforward_cdf, qmark_bracket, qmark_oracle};
use modwalk::tiling::{are_adjacent, neighbors, reduce_to_fundamental};
use modwalk::{
    chi_half, lambda_survival, qmark, qmark_inverse, ContinuedFraction, DyadicRational,
    ExtendedRational, GeneratorIndex, IntervalMapIndex, Mode, ProjectiveMatrix, SignPair,
    UpperHalfPoint, WalkConfig,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn unit_rational(max_den: i64) -> impl Strategy<Value = ExtendedRational> {
    (1..=max_den).prop_flat_map(|q| (0..=q).prop_map(move |p| ExtendedRational::ratio(p, q).unwrap()))
}

fn open_unit_rational(max_den: i64) -> impl Strategy<Value = ExtendedRational> {
    (2..=max_den).prop_flat_map(|q| (1..q).prop_map(move |p| ExtendedRational::ratio(p, q).unwrap()))
}

fn extended_rational() -> impl Strategy<Value = ExtendedRational> {
    prop_oneof![
        10 => (-1_000_000i64..=1_000_000, 1i64..=10_000)
            .prop_map(|(p, q)| ExtendedRational::ratio(p, q).unwrap()),
        1 => Just(ExtendedRational::infinity()),
    ]
}

fn generator() -> impl Strategy<Value = GeneratorIndex> {
    (0usize..9).prop_map(|i| GeneratorIndex::new(i).unwrap())
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<GeneratorIndex>> {
    prop::collection::vec(generator(), 0..=max_len)
}

fn h(i: GeneratorIndex, x: &ExtendedRational) -> ExtendedRational {
    ProjectiveMatrix::generator(i).mobius_real(x)
}

fn is_degenerate(x: &ExtendedRational) -> bool {
    x.is_zero() || x.is_infinite() || project_c(x) == ExtendedRational::one()
}

fn multiset(values: impl IntoIterator<Item = ExtendedRational>) -> BTreeMap<ExtendedRational, usize> {
    let mut m = BTreeMap::new();
    for v in values {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

fn dyadic(num: u64, exp: u64) -> DyadicRational {
    DyadicRational::new(BigInt::from(num), exp)
}

fn one() -> ExtendedRational {
    ExtendedRational::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn continued_fraction_round_trip(x in extended_rational()) {
        prop_assume!(x.is_finite() && !x.is_negative());
        let cf = expand(&x).unwrap();
        prop_assert!(cf.is_canonical());
        prop_assert_eq!(cf.value(), x);
        prop_assert_eq!(ContinuedFraction::from_json(&cf.to_json()).unwrap(), cf);
    }

    #[test]
    fn extended_rational_display_round_trip(x in extended_rational()) {
        prop_assert_eq!(x.to_string().parse::<ExtendedRational>().unwrap(), x);
    }

    #[test]
    fn qmark_matches_mediant_oracle(x in unit_rational(500)) {
        prop_assert_eq!(qmark(&x).unwrap(), qmark_oracle(&x).unwrap());
    }

    #[test]
    fn qmark_reflection(x in unit_rational(10_000)) {
        let one_minus = x.unimodular_map_i64(-1, 1, 0, 1);
        prop_assert_eq!(qmark(&one_minus).unwrap(), qmark(&x).unwrap().complement());
    }

    #[test]
    fn qmark_contractions(x in unit_rational(10_000)) {
        let qx = qmark(&x).unwrap();
        prop_assert_eq!(qmark(&x.unimodular_map_i64(1, 0, 1, 1)).unwrap(), qx.half());
        prop_assert_eq!(qmark(&x.unimodular_map_i64(0, 1, 1, 1)).unwrap(), qx.half().complement());
    }

    #[test]
    fn qmark_tent_invariance(w in unit_rational(10_000)) {
        let h4 = interval_map(IntervalMapIndex::new(4).unwrap(), &w).unwrap();
        let h1 = interval_map(IntervalMapIndex::new(1).unwrap(), &w).unwrap();
        let lhs = qmark(&h4).unwrap().add(&qmark(&h1).unwrap().complement());
        prop_assert_eq!(lhs, qmark(&w).unwrap());
    }

    #[test]
    fn qmark_kernel_stationarity(w in unit_rational(10_000)) {
        let lhs = ExtendedRational::from(kernel_pushforward_cdf(&w).unwrap());
        prop_assert_eq!(lhs, qmark(&w).unwrap().to_rational());
    }

    #[test]
    fn qmark_strictly_increasing(x in unit_rational(2000), y in unit_rational(2000)) {
        prop_assert_eq!(x.cmp(&y), qmark(&x).unwrap().cmp(&qmark(&y).unwrap()));
    }

    #[test]
    fn qmark_inverse_round_trips(x in unit_rational(10_000), num in 0u64..(1 << 20)) {
        prop_assert_eq!(qmark_inverse(&qmark(&x).unwrap()).unwrap(), x);
        let d = dyadic(num, 20);
        prop_assert_eq!(qmark(&qmark_inverse(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn bracket_encloses_every_continuation(
        prefix in prop::collection::vec(1u64..6, 1..8),
        rest in prop::collection::vec(1u64..6, 0..6),
    ) {
        let bracket = qmark_bracket(&prefix).unwrap();
        let mut full = prefix.clone();
        full.extend(&rest);
        let x = ContinuedFraction::from_u64s(0, &full).unwrap().value();
        prop_assert!(bracket.contains(&qmark(&x).unwrap()));
        let s: u64 = prefix.iter().sum();
        prop_assert!(bracket.width() <= dyadic(1, s - 1));
    }

    #[test]
    fn chi_half_reciprocal_symmetry(y in open_unit_rational(10_000)) {
        let sum = chi_half(&y).unwrap().add(&chi_half(&y.recip()).unwrap());
        prop_assert_eq!(sum, DyadicRational::one());
    }

    #[test]
    fn lambda_is_symmetric(x in extended_rational()) {
        prop_assume!(x.is_finite());
        // Pr(X > x) = Pr(X < −x) for an atomless symmetric law
        let left = lambda_survival(&x).unwrap();
        let right = lambda_survival(&x.neg()).unwrap().complement();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn lambda_is_nonincreasing(x in extended_rational(), y in extended_rational()) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(lambda_survival(&lo).unwrap() >= lambda_survival(&hi).unwrap());
    }

    #[test]
    fn equivariance_under_negation_and_inversion(x in extended_rational()) {
        let all = || GeneratorIndex::all();
        prop_assert_eq!(
            multiset(all().map(|i| h(i, &x.neg()))),
            multiset(all().map(|i| h(i, &x).neg()))
        );
        prop_assert_eq!(
            multiset(all().map(|i| h(i, &x.recip().neg()))),
            multiset(all().map(|i| h(i, &x).recip().neg()))
        );
        for i in all() {
            prop_assert_eq!(h(i, &x.neg()), h(negation_partner(i), &x).neg());
            if i.get() != 0 {
                prop_assert_eq!(h(i, &x.recip().neg()), h(inversion_partner(i), &x));
            }
        }
    }

    #[test]
    fn projection_consistency_on_unit_interval(x in open_unit_rational(10_000), i in generator()) {
        prop_assume!(!is_degenerate(&x));
        prop_assert_eq!(
            project_c(&h(i, &x)),
            interval_map(classify_generator(i), &project_c(&x)).unwrap()
        );
    }

    #[test]
    fn projection_consistency_transported(x in extended_rational(), i in generator()) {
        let w = project_c(&x);
        let g = GammaElement::carrying(&w, &x).unwrap();
        prop_assert_eq!(
            project_c(&h(i, &x)),
            interval_map(classify_generator(g.conjugate_generator(i)), &w).unwrap()
        );
    }

    #[test]
    fn coupled_step_preserves_projection(x in extended_rational(), path in word(30)) {
        let (mut x, mut w) = (x.clone(), project_c(&x));
        for m in path {
            let (nx, nw) = coupled_step(&x, &w, m).unwrap();
            prop_assert_eq!(&nx, &h(m, &x));
            prop_assert_eq!(project_c(&nx), nw.clone());
            x = nx;
            w = nw;
        }
    }

    #[test]
    fn lifts_cover_the_orbit(w in open_unit_rational(10_000)) {
        let lifts = multiset(SignPair::all().map(|s| lift(&w, s).unwrap()));
        let orbit = multiset([w.clone(), w.neg(), w.recip(), w.recip().neg()]);
        prop_assert_eq!(lifts, orbit);
        for s in SignPair::all() {
            prop_assert_eq!(project_c(&lift(&w, s).unwrap()), w.clone());
        }
    }

    #[test]
    fn mobius_action_is_a_homomorphism(a in word(6), b in word(6), x in extended_rational()) {
        let product = |w: &[GeneratorIndex]| w.iter().fold(ProjectiveMatrix::identity(), |m, &i| {
            m.multiply(&ProjectiveMatrix::generator(i))
        });
        let (pa, pb) = (product(&a), product(&b));
        prop_assert_eq!(pa.multiply(&pb).mobius_real(&x), pa.mobius_real(&pb.mobius_real(&x)));
        prop_assert!(pa.multiply(&pa.inverse()).is_identity());
        prop_assert_eq!(ProjectiveMatrix::from_json(&pa.to_json()).unwrap(), pa);
    }

    #[test]
    fn reduction_recovers_the_tile(path in word(6)) {
        let m = path.iter().fold(ProjectiveMatrix::identity(), |m, &i| {
            m.multiply(&ProjectiveMatrix::generator(i))
        });
        let z0 = UpperHalfPoint::from_parts(&ExtendedRational::zero(), &"3/2".parse().unwrap()).unwrap();
        let r = reduce_to_fundamental(&m.mobius_complex(&z0));
        prop_assert!(!r.on_boundary);
        prop_assert_eq!(r.tile, m);
        prop_assert_eq!(r.point, z0);
    }

    #[test]
    fn reduction_lands_in_fundamental_domain(re in -50i64..50, num in 1i64..400, den in 1i64..400) {
        let z = UpperHalfPoint::from_parts(
            &ExtendedRational::ratio(re * 7, 13).unwrap(),
            &ExtendedRational::ratio(num, den).unwrap(),
        ).unwrap();
        let r = reduce_to_fundamental(&z);
        let half = ExtendedRational::ratio(1, 2).unwrap();
        prop_assert!(ExtendedRational::from(r.point.re().clone()).abs() <= half);
        prop_assert!(ExtendedRational::from(r.point.abs_sq()) >= one());
        prop_assert_eq!(r.tile.mobius_complex(&r.point), z);
    }

    #[test]
    fn adjacency_is_symmetric(path in word(5), i in generator()) {
        let m = path.iter().fold(ProjectiveMatrix::identity(), |m, &k| {
            m.multiply(&ProjectiveMatrix::generator(k))
        });
        let n = &neighbors(&m)[i.get()];
        prop_assert!(neighbors(n).contains(&m));
        prop_assert!(are_adjacent(n, &m));
    }

    #[test]
    fn interval_maps_preserve_unit_interval(w in unit_rational(10_000), i in 0usize..5) {
        let y = interval_map(IntervalMapIndex::new(i).unwrap(), &w).unwrap();
        prop_assert!(!y.is_negative() && y <= one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), steps in 0usize..40) {
        let cfg = WalkConfig::new(seed, steps, 6, Mode::Exact);
        let start: ExtendedRational = "5/7".parse().unwrap();
        prop_assert_eq!(simulate_x(&start, &cfg), simulate_x(&start, &cfg));
        prop_assert_eq!(simulate_y(&start, &cfg), simulate_y(&start, &cfg));
        prop_assert_eq!(simulate_w(&start, &cfg).unwrap(), simulate_w(&start, &cfg).unwrap());
        for t in simulate_x(&start, &cfg) {
            prop_assert_eq!(t.values.len(), steps + 1);
        }
    }
}
