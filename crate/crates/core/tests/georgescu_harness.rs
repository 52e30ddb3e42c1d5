use corner_blowup::compactify::PolyCurve;
use corner_blowup::exact_linalg::{rat, Rational};
use corner_blowup::georgescu::{
    random_curve, verify_injectivity, verify_order_independence, GeorgescuSpace, CLOSURE_TOL,
};
use corner_blowup::nbody::{builtin_semilattices, common_translation, nbody_semilattice, NBodySpec};
use corner_blowup::semilattice::{
    admissible_orderings, random_admissible_ordering, AdmissibleOrdering, Semilattice,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn orderings_for(s: &Semilattice, rng: &mut ChaCha8Rng) -> Vec<AdmissibleOrdering> {
    let all = admissible_orderings(s, 25);
    if all.len() <= 24 {
        return all;
    }
    let mut chosen = vec![AdmissibleOrdering::canonical(s)];
    while chosen.len() < 12 {
        let o = random_admissible_ordering(s, rng);
        if !chosen.contains(&o) {
            chosen.push(o);
        }
    }
    chosen
}

#[test]
fn order_independence_on_every_builtin() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, s) in builtin_semilattices() {
        let space = GeorgescuSpace::new(s.clone()).unwrap();
        let orderings = orderings_for(&s, &mut rng);
        let curves: Vec<PolyCurve> = (0..60).map(|_| random_curve(&mut rng, &s)).collect();
        let report = verify_order_independence(&space, &orderings, &curves, CLOSURE_TOL).unwrap();
        assert!(report.passed(), "{name}: {:?}", report.counterexamples);
        assert!(report.max_deviation_from_product.0 <= CLOSURE_TOL, "{name}");
    }
}

#[test]
fn lifted_members_take_the_tower_route() {
    // In the N=3 semilattice, every nontrivial member is lifted by some smaller
    // one under some ordering, so the harness compares genuinely different routes.
    let s = nbody_semilattice(&NBodySpec::new(3, 1).unwrap()).unwrap();
    let space = GeorgescuSpace::new(s.clone()).unwrap();
    let routes = space.routes(&AdmissibleOrdering::canonical(&s)).unwrap();
    let towers = routes.iter().filter(|r| r.is_some()).count();
    assert!(towers > 0);
    for (p, route) in routes.iter().enumerate() {
        if let Some(q) = route {
            assert!(s.is_subset(*q, p) && *q != p);
        }
    }
}

#[test]
fn injectivity_on_builtins() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (name, s) in builtin_semilattices() {
        let space = GeorgescuSpace::new(s.clone()).unwrap();
        let curves: Vec<PolyCurve> = (0..80).map(|_| random_curve(&mut rng, &s)).collect();
        let report = verify_injectivity(&space, &curves, CLOSURE_TOL).unwrap();
        assert!(report.passed(), "{name}: {:?}", report.counterexamples);
    }
}

#[test]
fn diagonal_points_and_signatures() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (_, s) in builtin_semilattices() {
        let space = GeorgescuSpace::new(s.clone()).unwrap();
        for _ in 0..20 {
            let x: Vec<Rational> = (0..s.ambient())
                .map(|_| rat(rng.gen_range(-7..=7), rng.gen_range(1..=3)))
                .collect();
            let p = space.diagonal(&x).unwrap();
            assert_eq!(p, space.curve_limit_tuple(&PolyCurve::constant(x).unwrap()).unwrap());
            assert!(space.signature(&p).unwrap().at_infinity.is_empty());
        }
        for _ in 0..40 {
            let c = random_curve(&mut rng, &s);
            let p = space.curve_limit_tuple(&c).unwrap();
            let sig = space.signature(&p).unwrap();
            assert_eq!(sig.at_infinity.is_empty(), !p.components[0].is_direction());
            // the finite members form an up-set
            for a in 0..s.len() {
                for b in 0..s.len() {
                    if s.is_subset(a, b) && p.components[a].is_interior() {
                        assert!(p.components[b].is_interior());
                    }
                }
            }
        }
    }
}

#[test]
fn translations_act_on_tuples_but_not_on_the_semilattice() {
    let spec = NBodySpec::new(3, 2).unwrap();
    let s = nbody_semilattice(&spec).unwrap();
    let space = GeorgescuSpace::new(s.clone()).unwrap();
    let tau = common_translation(&spec, &[rat(1, 2), rat(-3, 1)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..40 {
        let c = random_curve(&mut rng, &s);
        let moved = space.translate(&space.curve_limit_tuple(&c).unwrap(), &tau).unwrap();
        let direct = space.curve_limit_tuple(&c.translate(&tau).unwrap()).unwrap();
        assert!(space.distance(&moved, &direct) <= 1e-12);
    }
    let origin = space.diagonal(&vec![rat(0, 1); 6]).unwrap();
    let shifted = space.translate(&origin, &tau).unwrap();
    assert!(space.distance(&origin, &shifted) > 0.1);
}
