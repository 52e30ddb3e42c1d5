use corner_blowup::charts::max_abs_diff;
use corner_blowup::compactify::{
    act_on_octant, act_radial, curve_limit, exact_limit, push_quotient, theta, theta_inverse,
    PolyCurve, Pushforward, QuotientChart, RadialPoint,
};
use corner_blowup::exact_linalg::{int, quotient_map, rat, vec_to_f64, QMatrix, Rational, Subspace};
use corner_blowup::semilattice::{act, close, random_admissible_ordering, reduce_along, tag_events, Tag};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| rat(p, q))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(rational(), n)
}

/// A subspace of `Q^n` spanned by up to `n` random (often dependent) vectors.
fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    proptest::collection::vec(vector(n), 0..=n).prop_map(move |vs| Subspace::span(n, vs).unwrap())
}

fn proper_subspace(n: usize) -> impl Strategy<Value = Subspace> {
    subspace(n).prop_filter("proper", |s| !s.is_full())
}

fn with_ambient<T: std::fmt::Debug>(
    f: impl Fn(usize) -> BoxedStrategy<T> + Clone + 'static,
) -> impl Strategy<Value = (usize, T)> {
    (1usize..=6).prop_flat_map(move |n| (Just(n), f(n)))
}

fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
    proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), n)
        .prop_map(move |rows| {
            QMatrix::from_rows(n, rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap()
        })
        .prop_filter("invertible", QMatrix::is_invertible)
}

fn curve(n: usize) -> impl Strategy<Value = PolyCurve> {
    proptest::collection::vec(vector(n), 1..=4).prop_map(|c| PolyCurve::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_is_commutative_associative_idempotent(
        (_, (a, b, c)) in with_ambient(|n| (subspace(n), subspace(n), subspace(n)).boxed())
    ) {
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        prop_assert_eq!(
            a.intersect(&b).unwrap().intersect(&c).unwrap(),
            a.intersect(&b.intersect(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.intersect(&a).unwrap(), a.clone());
        let meet = a.intersect(&b).unwrap();
        prop_assert!(a.contains(&meet).unwrap() && b.contains(&meet).unwrap());
    }

    #[test]
    fn mutual_containment_is_equality((_, (a, b)) in with_ambient(|n| (subspace(n), subspace(n)).boxed())) {
        let both = a.contains(&b).unwrap() && b.contains(&a).unwrap();
        prop_assert_eq!(both, a == b);
    }

    #[test]
    fn quotient_kernel_is_the_subspace((n, (y, x)) in with_ambient(|n| (proper_subspace(n), vector(n)).boxed())) {
        let q = quotient_map(n, &y).unwrap();
        prop_assert_eq!(q.target_dim(), n - y.dim());
        prop_assert_eq!(q.matrix().rank(), n - y.dim());
        let image_zero = q.apply(&x).unwrap().iter().all(|v| v == &int(0));
        prop_assert_eq!(image_zero, y.contains_vector(&x).unwrap());
    }

    #[test]
    fn quotients_compose((n, (a, b, x)) in with_ambient(|n| (subspace(n), subspace(n), vector(n)).boxed())) {
        // a ∩ b ⊂ a: the coarser quotient factors through the finer one
        let fine = a.intersect(&b).unwrap();
        prop_assume!(!a.is_full());
        let qf = quotient_map(n, &fine).unwrap();
        let qa = quotient_map(n, &a).unwrap();
        let r = qf.factor_through(&qa).unwrap();
        prop_assert_eq!(r.mul_vec(&qf.apply(&x).unwrap()).unwrap(), qa.apply(&x).unwrap());
    }

    #[test]
    fn closure_is_idempotent((n, gens) in with_ambient(|n| proptest::collection::vec(proper_subspace(n), 0..4).boxed())) {
        let s = close(n, &gens).unwrap();
        let again = close(n, s.members()).unwrap();
        prop_assert_eq!(&again, &s);
        for g in &gens {
            prop_assert!(s.index_of(g).is_some());
        }
        for i in 0..s.len() {
            for j in 0..s.len() {
                let meet = s.members()[i].intersect(&s.members()[j]).unwrap();
                prop_assert!(s.index_of(&meet).is_some());
            }
        }
    }

    #[test]
    fn reduction_drops_one_member_per_step_and_tags_are_order_free(
        (n, gens) in with_ambient(|n| proptest::collection::vec(proper_subspace(n), 0..5).boxed()),
        seed in any::<u64>(),
    ) {
        let s = close(n, &gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = random_admissible_ordering(&s, &mut rng);
        let second = random_admissible_ordering(&s, &mut rng);
        let steps = reduce_along(&s, &first).unwrap();
        for (i, step) in steps.iter().enumerate() {
            prop_assert_eq!(step.family_size(), s.len() - 1 - i);
        }
        let a = tag_events(&steps);
        let b = tag_events(&reduce_along(&s, &second).unwrap());
        prop_assert_eq!(&a, &b);
        for (&(p, q), tags) in &a {
            let comparable = s.is_subset(p, q) || s.is_subset(q, p);
            let expected = if comparable { vec![Tag::Lifted] } else { vec![Tag::Untouched] };
            prop_assert_eq!(tags, &expected);
        }
    }

    #[test]
    fn action_commutes_with_closure(
        (n, (gens, g)) in with_ambient(|n| (proptest::collection::vec(proper_subspace(n), 0..4), invertible(n)).boxed())
    ) {
        let s = close(n, &gens).unwrap();
        let moved: Vec<Subspace> = gens.iter().map(|y| y.image(&g).unwrap()).collect();
        prop_assert_eq!(act(&s, &g).unwrap(), close(n, &moved).unwrap());
    }

    #[test]
    fn theta_round_trip(v in proptest::collection::vec(-50.0f64..50.0, 1..6), at_infinity in any::<bool>()) {
        prop_assume!(!at_infinity || v.iter().any(|x| x.abs() > 1e-3));
        let p = if at_infinity { RadialPoint::direction(v).unwrap() } else { RadialPoint::Interior(v) };
        let back = theta_inverse(&theta(&p)).unwrap();
        prop_assert_eq!(back.is_interior(), p.is_interior());
        prop_assert!(max_abs_diff(back.vec(), p.vec()) <= 1e-10);
    }

    #[test]
    fn theta_is_equivariant((n, (g, x)) in with_ambient(|n| (invertible(n), vector(n)).boxed()), at_infinity in any::<bool>()) {
        let x = vec_to_f64(&x);
        prop_assume!(!at_infinity || x.iter().any(|v| v.abs() > 1e-3));
        let p = if at_infinity { RadialPoint::direction(x).unwrap() } else { RadialPoint::Interior(x) };
        let lhs = theta(&act_radial(&g, &p).unwrap());
        let rhs = act_on_octant(&g, &theta(&p)).unwrap();
        prop_assert_eq!(n + 1, lhs.len());
        prop_assert!(max_abs_diff(lhs.coords(), rhs.coords()) <= 1e-12);
    }

    #[test]
    fn push_quotient_matches_exact_projection((n, (y, x)) in with_ambient(|n| (proper_subspace(n), vector(n)).boxed())) {
        let q = quotient_map(n, &y).unwrap();
        let exact = vec_to_f64(&q.apply(&x).unwrap());
        match push_quotient(&RadialPoint::Interior(vec_to_f64(&x)), &q).unwrap() {
            Pushforward::Point(z) => prop_assert!(max_abs_diff(z.vec(), &exact) <= 1e-12),
            Pushforward::OnBlownUpSphere => prop_assert!(false, "finite point on S_Y"),
        }
    }

    #[test]
    fn limits_ignore_positive_leading_rescale((_, c) in with_ambient(|n| curve(n).boxed()), factor in 1i64..20) {
        let scaled = c.scale_leading(&int(factor));
        let (a, b) = (curve_limit(&c).unwrap(), curve_limit(&scaled).unwrap());
        if c.degree() > 0 {
            prop_assert!(a.approx_eq(&b, 1e-12));
        } else {
            prop_assert!(b.is_interior());
        }
    }

    #[test]
    fn projection_commutes_with_limits((n, (y, c)) in with_ambient(|n| (proper_subspace(n), curve(n)).boxed())) {
        let q = quotient_map(n, &y).unwrap();
        let exact = exact_limit(&c.project(&q).unwrap()).to_radial();
        let chart = QuotientChart::new(n, &y).unwrap();
        let charted = chart.curve_limit(&c).unwrap();
        prop_assert!(exact.approx_eq(&charted, 1e-9), "{:?} vs {:?}", exact, charted);
        // off S_Y the pointwise pushforward of the limit agrees as well
        if let Pushforward::Point(z) = push_quotient(&curve_limit(&c).unwrap(), &q).unwrap() {
            prop_assert!(z.approx_eq(&exact, 1e-9));
        }
    }
}
