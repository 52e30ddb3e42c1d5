//! The Georgescu compactification as the closure of the diagonal image of `X`
//! in `∏_{Y∈F} \overline{X/Y}`, and the harness comparing it with the
//! iterated blow-up of `X̄` along the boundary spheres `S_Y`.
//!
//! Points of the closure are witnessed by polynomial curves. The blow-up
//! side is evaluated by walking an admissible ordering: a member that was
//! lifted by an earlier center `Q ⊂ P` is reached through the tower
//! `X -> X/Q -> (X/Q)/(P/Q)`, every other member directly through the chart
//! of `ψ_P`. Agreement across orderings and with the direct product model is
//! what the harness measures.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::charts::{max_abs_diff, norm};
use crate::compactify::{
    exact_limit, theta, CompactifyError, ExactLimit, PolyCurve, QuotientChart, RadialPoint,
};
use crate::exact_linalg::{
    int, quotient_map, rat, vec_to_f64, LinalgError, QMatrix, QuotientMap, Rational,
};
use crate::report::Decimal;
use crate::semilattice::{
    reduce_along, AdmissibleOrdering, Semilattice, SemilatticeError, Tag,
};

/// Tolerance for quotient compatibility and for agreement of computed tuples.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Below this norm a projected direction counts as vanishing.
const VANISHING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeorgescuError {
    #[error(transparent)]
    Semilattice(#[from] SemilatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Compactify(#[from] CompactifyError),
    #[error("not a closure point: {0}")]
    Violation(Violation),
    #[error("curve lives in dimension {found}, semilattice in {expected}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("tuple has {found} components, semilattice has {expected} members")]
    ComponentCount { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, GeorgescuError>;

/// A failed compatibility check between the components at `smaller ⊂ larger`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Both components finite, but `X/Y -> X/Y'` does not map one to the other.
    QuotientMismatch {
        smaller: usize,
        larger: usize,
        deviation: f64,
    },
    /// Finite at `Y` but at infinity at `Y' ⊃ Y`.
    NotUpwardClosed { smaller: usize, larger: usize },
    /// A direction at `Y` that survives the projection to `X/Y'` does not match `Y'`.
    DirectionMismatch {
        smaller: usize,
        larger: usize,
        deviation: f64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::QuotientMismatch { smaller, larger, deviation } => write!(
                f,
                "members {smaller} ⊂ {larger}: finite components differ by {deviation:e}"
            ),
            Violation::NotUpwardClosed { smaller, larger } => write!(
                f,
                "member {smaller} is finite but {larger} ⊃ {smaller} is at infinity"
            ),
            Violation::DirectionMismatch { smaller, larger, deviation } => write!(
                f,
                "members {smaller} ⊂ {larger}: projected direction differs by {deviation:e}"
            ),
        }
    }
}

/// A tuple `(z_Y)_{Y∈F}`, indexed like the semilattice members.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeorgescuPoint {
    pub components: Vec<RadialPoint>,
}

/// Members whose component lies at infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FaceSignature {
    pub at_infinity: BTreeSet<usize>,
}

struct Tower {
    chart: QuotientChart,
    /// `T` with `q_P = T · q' · q_Q`.
    to_canonical: QMatrix,
}

/// A semilattice together with its quotient maps and chart data.
pub struct GeorgescuSpace {
    lattice: Semilattice,
    quotients: Vec<QuotientMap>,
    charts: Vec<QuotientChart>,
    /// `induced[(a, b)] = R` with `q_b = R q_a`, for `members[a] ⊊ members[b]`.
    induced: BTreeMap<(usize, usize), QMatrix>,
    towers: BTreeMap<(usize, usize), Tower>,
}

impl GeorgescuSpace {
    pub fn new(lattice: Semilattice) -> Result<Self> {
        let n = lattice.ambient();
        let quotients = lattice
            .members()
            .iter()
            .map(|y| quotient_map(n, y))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let charts = lattice
            .members()
            .iter()
            .map(|y| QuotientChart::new(n, y))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut induced = BTreeMap::new();
        let mut towers = BTreeMap::new();
        let inclusions = lattice.strict_inclusions();
        for a in 0..lattice.len() {
            for b in 0..lattice.len() {
                if !inclusions[a][b] {
                    continue;
                }
                induced.insert((a, b), quotients[a].factor_through(&quotients[b])?);
                if a == 0 {
                    continue;
                }
                // P/Q inside X/Q, in the quotient coordinates of Q.
                let inner = lattice.members()[b].image(quotients[a].matrix())?;
                let chart = QuotientChart::new(quotients[a].target_dim(), &inner)?;
                let composite = chart.quotient().matrix().mul(quotients[a].matrix())?;
                let to_canonical = composite.solve_left(quotients[b].matrix())?;
                towers.insert((a, b), Tower { chart, to_canonical });
            }
        }
        Ok(Self {
            lattice,
            quotients,
            charts,
            induced,
            towers,
        })
    }

    pub fn lattice(&self) -> &Semilattice {
        &self.lattice
    }

    pub fn quotient(&self, member: usize) -> &QuotientMap {
        &self.quotients[member]
    }

    pub fn induced(&self, smaller: usize, larger: usize) -> Option<&QMatrix> {
        self.induced.get(&(smaller, larger))
    }

    fn check_curve(&self, c: &PolyCurve) -> Result<()> {
        if c.ambient() != self.lattice.ambient() {
            return Err(GeorgescuError::AmbientMismatch {
                expected: self.lattice.ambient(),
                found: c.ambient(),
            });
        }
        Ok(())
    }

    /// `δ(x) = (π_{X/Y} x)_Y`.
    pub fn diagonal(&self, x: &[Rational]) -> Result<GeorgescuPoint> {
        if x.len() != self.lattice.ambient() {
            return Err(GeorgescuError::AmbientMismatch {
                expected: self.lattice.ambient(),
                found: x.len(),
            });
        }
        let components = self
            .quotients
            .iter()
            .map(|q| Ok(RadialPoint::Interior(vec_to_f64(&q.apply(x)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeorgescuPoint { components })
    }

    /// Exact per-member limits of `c(t) + Y`.
    pub fn exact_limits(&self, c: &PolyCurve) -> Result<Vec<ExactLimit>> {
        self.check_curve(c)?;
        self.quotients
            .iter()
            .map(|q| Ok(exact_limit(&c.project(q)?)))
            .collect()
    }

    /// The closure point reached by `c(t)` as `t -> ∞`.
    pub fn curve_limit_tuple(&self, c: &PolyCurve) -> Result<GeorgescuPoint> {
        let components = self
            .exact_limits(c)?
            .iter()
            .map(ExactLimit::to_radial)
            .collect();
        Ok(GeorgescuPoint { components })
    }

    /// Compatibility of the components along every inclusion `Y ⊊ Y'`.
    pub fn check(&self, p: &GeorgescuPoint) -> std::result::Result<(), Violation> {
        for (&(a, b), r) in &self.induced {
            let (za, zb) = (&p.components[a], &p.components[b]);
            match (za, zb) {
                (RadialPoint::Interior(x), RadialPoint::Interior(y)) => {
                    let deviation = max_abs_diff(&r.mul_vec_f64(x), y);
                    if !(deviation <= CLOSURE_TOL) {
                        return Err(Violation::QuotientMismatch {
                            smaller: a,
                            larger: b,
                            deviation,
                        });
                    }
                }
                (RadialPoint::Interior(_), RadialPoint::Direction(_)) => {
                    return Err(Violation::NotUpwardClosed {
                        smaller: a,
                        larger: b,
                    });
                }
                (RadialPoint::Direction(v), other) => {
                    let image = r.mul_vec_f64(v);
                    let size = norm(&image);
                    if size <= VANISHING_TOL {
                        continue;
                    }
                    let expected = RadialPoint::Direction(image.iter().map(|x| x / size).collect());
                    if !expected.approx_eq(other, CLOSURE_TOL) {
                        let deviation = if other.is_direction() {
                            max_abs_diff(expected.vec(), other.vec())
                        } else {
                            f64::INFINITY
                        };
                        return Err(Violation::DirectionMismatch {
                            smaller: a,
                            larger: b,
                            deviation,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self, p: &GeorgescuPoint) -> Result<()> {
        if p.components.len() != self.lattice.len() {
            return Err(GeorgescuError::ComponentCount {
                expected: self.lattice.len(),
                found: p.components.len(),
            });
        }
        self.check(p).map_err(GeorgescuError::Violation)
    }

    pub fn signature(&self, p: &GeorgescuPoint) -> Result<FaceSignature> {
        self.validate(p)?;
        Ok(FaceSignature {
            at_infinity: p
                .components
                .iter()
                .enumerate()
                .filter(|(_, z)| z.is_direction())
                .map(|(i, _)| i)
                .collect(),
        })
    }

    /// Max over members of the distance between `Θ`-images.
    pub fn distance(&self, a: &GeorgescuPoint, b: &GeorgescuPoint) -> f64 {
        a.components
            .iter()
            .zip(&b.components)
            .map(|(x, y)| max_abs_diff(theta(x).coords(), theta(y).coords()))
            .fold(0.0, f64::max)
    }

    /// Translation `x ↦ x + τ` extended to the compactification: finite
    /// components shift by `π_{X/Y} τ`, directions are fixed.
    pub fn translate(&self, p: &GeorgescuPoint, tau: &[Rational]) -> Result<GeorgescuPoint> {
        let shift = self.diagonal(tau)?;
        let components = p
            .components
            .iter()
            .zip(shift.components)
            .map(|(z, s)| match z {
                RadialPoint::Interior(x) => RadialPoint::Interior(
                    x.iter().zip(s.vec()).map(|(a, b)| a + b).collect(),
                ),
                RadialPoint::Direction(_) => z.clone(),
            })
            .collect();
        Ok(GeorgescuPoint { components })
    }

    /// For each member, the center through which the blow-up along
    /// `ordering` reaches it: `None` for the direct chart, `Some(q)` for the
    /// tower through the most recent center `q` that lifted it.
    pub fn routes(&self, ordering: &AdmissibleOrdering) -> Result<Vec<Option<usize>>> {
        let steps = reduce_along(&self.lattice, ordering)?;
        let mut lifted_by: Vec<Option<usize>> = vec![None; self.lattice.len()];
        let mut routes = vec![None; self.lattice.len()];
        for step in &steps {
            routes[step.center] = lifted_by[step.center];
            for tm in &step.members {
                if tm.tag == Tag::Lifted {
                    lifted_by[tm.member] = Some(step.center);
                }
            }
        }
        Ok(routes)
    }

    /// The component at `member` reached through `route`.
    pub fn component_via(&self, member: usize, route: Option<usize>, c: &PolyCurve) -> Result<RadialPoint> {
        self.check_curve(c)?;
        match route {
            None => Ok(self.charts[member].curve_limit(c)?),
            Some(q) => self.through_tower(q, member, c),
        }
    }

    /// The blow-up side: components computed by walking `ordering` through
    /// chart maps, reaching each lifted member through its most recent center.
    pub fn tuple_along(&self, ordering: &AdmissibleOrdering, c: &PolyCurve) -> Result<GeorgescuPoint> {
        let routes = self.routes(ordering)?;
        let components = routes
            .iter()
            .enumerate()
            .map(|(p, &route)| self.component_via(p, route, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeorgescuPoint { components })
    }

    fn through_tower(&self, q: usize, p: usize, c: &PolyCurve) -> Result<RadialPoint> {
        let tower = &self.towers[&(q, p)];
        let inner = c.project(&self.quotients[q])?;
        let z = tower.chart.curve_limit(&inner)?;
        let image = tower.to_canonical.mul_vec_f64(z.vec());
        Ok(match z {
            RadialPoint::Interior(_) => RadialPoint::Interior(image),
            RadialPoint::Direction(_) => RadialPoint::direction(image)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairDeviation {
    pub first: usize,
    pub second: usize,
    pub max_deviation: Decimal,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderCounterexample {
    pub curve: usize,
    pub ordering_a: Vec<usize>,
    pub ordering_b: Option<Vec<usize>>,
    pub deviation: Decimal,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub max_deviation: Decimal,
    pub pairs_checked: usize,
    pub orderings: usize,
    pub curves: usize,
    pub tolerance: Decimal,
    /// Largest distance between any ordering's tuple and the direct product model.
    pub max_deviation_from_product: Decimal,
    pub per_pair: Vec<PairDeviation>,
    pub counterexamples: Vec<OrderCounterexample>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Evaluates every curve along every ordering and compares the tuples pairwise
/// (and against [`GeorgescuSpace::curve_limit_tuple`]).
pub fn verify_order_independence(
    space: &GeorgescuSpace,
    orderings: &[AdmissibleOrdering],
    curves: &[PolyCurve],
    tol: f64,
) -> Result<OrderReport> {
    let mut per_pair: Vec<PairDeviation> = Vec::new();
    for i in 0..orderings.len() {
        for j in i + 1..orderings.len() {
            per_pair.push(PairDeviation {
                first: i,
                second: j,
                max_deviation: Decimal(0.0),
            });
        }
    }
    let plans = orderings
        .iter()
        .map(|o| space.routes(o))
        .collect::<Result<Vec<_>>>()?;
    let mut counterexamples = Vec::new();
    let mut max_from_product = 0.0f64;
    let mut pairs_checked = 0;
    for (ci, c) in curves.iter().enumerate() {
        let direct = space.curve_limit_tuple(c)?;
        // Orderings that share a route for a member share its computation.
        let mut cache: BTreeMap<(usize, Option<usize>), RadialPoint> = BTreeMap::new();
        let mut tuples = Vec::with_capacity(plans.len());
        for plan in &plans {
            let mut components = Vec::with_capacity(plan.len());
            for (p, &route) in plan.iter().enumerate() {
                let z = match cache.get(&(p, route)) {
                    Some(z) => z.clone(),
                    None => {
                        let z = space.component_via(p, route, c)?;
                        cache.insert((p, route), z.clone());
                        z
                    }
                };
                components.push(z);
            }
            tuples.push(GeorgescuPoint { components });
        }
        for (oi, t) in tuples.iter().enumerate() {
            let d = space.distance(t, &direct);
            max_from_product = max_from_product.max(d);
            if !(d <= tol) {
                counterexamples.push(OrderCounterexample {
                    curve: ci,
                    ordering_a: orderings[oi].sequence.clone(),
                    ordering_b: None,
                    deviation: Decimal(d),
                });
            }
        }
        let mut k = 0;
        for i in 0..tuples.len() {
            for j in i + 1..tuples.len() {
                let d = space.distance(&tuples[i], &tuples[j]);
                pairs_checked += 1;
                let entry = &mut per_pair[k];
                entry.max_deviation = Decimal(entry.max_deviation.0.max(d));
                if !(d <= tol) {
                    counterexamples.push(OrderCounterexample {
                        curve: ci,
                        ordering_a: orderings[i].sequence.clone(),
                        ordering_b: Some(orderings[j].sequence.clone()),
                        deviation: Decimal(d),
                    });
                }
                k += 1;
            }
        }
    }
    let max_deviation = per_pair
        .iter()
        .map(|p| p.max_deviation.0)
        .fold(0.0, f64::max);
    Ok(OrderReport {
        max_deviation: Decimal(max_deviation),
        pairs_checked,
        orderings: orderings.len(),
        curves: curves.len(),
        tolerance: Decimal(tol),
        max_deviation_from_product: Decimal(max_from_product),
        per_pair,
        counterexamples,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Collision {
    pub first: usize,
    pub second: usize,
    pub distance: Decimal,
    /// True when the two curves have the same exact limits (the tuples should coincide).
    pub same_class: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub pairs_checked: usize,
    pub distinct_class_pairs: usize,
    pub same_class_pairs: usize,
    /// Smallest tuple distance between curves with different exact limits.
    pub min_separation: Decimal,
    pub tolerance: Decimal,
    pub counterexamples: Vec<Collision>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Curves whose exact per-member limits differ must give tuples more than
/// `tol` apart; curves with equal exact limits (positive rescalings of the
/// dominant behavior) must give tuples within `tol`.
pub fn verify_injectivity(
    space: &GeorgescuSpace,
    curves: &[PolyCurve],
    tol: f64,
) -> Result<InjectivityReport> {
    let keys = curves
        .iter()
        .map(|c| space.exact_limits(c))
        .collect::<Result<Vec<_>>>()?;
    let tuples = curves
        .iter()
        .map(|c| space.curve_limit_tuple(c))
        .collect::<Result<Vec<_>>>()?;
    let mut report = InjectivityReport {
        pairs_checked: 0,
        distinct_class_pairs: 0,
        same_class_pairs: 0,
        min_separation: Decimal(f64::INFINITY),
        tolerance: Decimal(tol),
        counterexamples: Vec::new(),
    };
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            report.pairs_checked += 1;
            let d = space.distance(&tuples[i], &tuples[j]);
            let same_class = keys[i] == keys[j];
            let bad = if same_class {
                report.same_class_pairs += 1;
                !(d <= tol)
            } else {
                report.distinct_class_pairs += 1;
                report.min_separation = Decimal(report.min_separation.0.min(d));
                !(d > tol)
            };
            if bad {
                report.counterexamples.push(Collision {
                    first: i,
                    second: j,
                    distance: Decimal(d),
                    same_class,
                });
            }
        }
    }
    Ok(report)
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

/// A random rational curve of degree ≤ 3. Half of the time the dominant
/// coefficient is drawn from a random nontrivial member `Y`, so the limit lies
/// on `S_Y` and the front faces of the blow-up are exercised.
pub fn random_curve<R: Rng + ?Sized>(rng: &mut R, lattice: &Semilattice) -> PolyCurve {
    let n = lattice.ambient();
    let degree = rng.gen_range(0..=3usize);
    let mut coeffs: Vec<Vec<Rational>> = (0..=degree)
        .map(|_| (0..n).map(|_| random_rational(rng)).collect())
        .collect();
    if degree > 0 && lattice.len() > 1 && rng.gen_bool(0.5) {
        let member = &lattice.members()[rng.gen_range(1..lattice.len())];
        // Drop to lower degrees too, so sub-leading terms can fall in smaller members.
        let depth = rng.gen_range(1..=degree);
        for d in (degree + 1 - depth)..=degree {
            coeffs[d] = random_combination(rng, member.basis(), n);
        }
    }
    if let Some(top) = coeffs.last_mut() {
        if top.iter().all(|x| x == &int(0)) {
            top[rng.gen_range(0..n)] = int(1);
        }
    }
    PolyCurve::new(coeffs).expect("coefficients share the ambient dimension")
}

fn random_combination<R: Rng + ?Sized>(rng: &mut R, basis: &[Vec<Rational>], n: usize) -> Vec<Rational> {
    let mut out = vec![int(0); n];
    for b in basis {
        let factor = random_rational(rng);
        for (o, x) in out.iter_mut().zip(b) {
            *o += &factor * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{ints, Subspace};
    use crate::semilattice::{admissible_orderings, close};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn axis_space() -> GeorgescuSpace {
        let x_axis = Subspace::span_i64(2, &[&[1, 0]]).unwrap();
        GeorgescuSpace::new(close(2, &[x_axis]).unwrap()).unwrap()
    }

    fn curve(coeffs: &[&[i64]]) -> PolyCurve {
        PolyCurve::new(coeffs.iter().map(|c| ints(c)).collect()).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let space = axis_space();
        let p = space.diagonal(&ints(&[1, 2])).unwrap();
        assert_eq!(
            p.components,
            vec![RadialPoint::Interior(vec![1.0, 2.0]), RadialPoint::Interior(vec![2.0])]
        );
        assert!(space.signature(&p).unwrap().at_infinity.is_empty());
        let origin = space.diagonal(&ints(&[0, 0])).unwrap();
        assert!(origin.components.iter().all(|z| z.vec().iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn curve_limit_tuple_examples() {
        let space = axis_space();
        let p = space.curve_limit_tuple(&curve(&[&[0, 5], &[1, 0]])).unwrap();
        assert_eq!(
            p.components,
            vec![RadialPoint::Direction(vec![1.0, 0.0]), RadialPoint::Interior(vec![5.0])]
        );
        assert_eq!(space.signature(&p).unwrap().at_infinity, BTreeSet::from([0]));

        let p = space.curve_limit_tuple(&curve(&[&[0, 0], &[0, 1], &[1, 0]])).unwrap();
        assert!(p.components.iter().all(RadialPoint::is_direction));
        assert_eq!(space.signature(&p).unwrap().at_infinity, BTreeSet::from([0, 1]));

        let constant = curve(&[&[3, -4]]);
        assert_eq!(
            space.curve_limit_tuple(&constant).unwrap(),
            space.diagonal(&ints(&[3, -4])).unwrap()
        );
    }

    #[test]
    fn non_closure_tuple_is_rejected() {
        let space = axis_space();
        let bad = GeorgescuPoint {
            components: vec![RadialPoint::Interior(vec![0.0, 1.0]), RadialPoint::Interior(vec![2.0])],
        };
        assert!(matches!(
            space.signature(&bad),
            Err(GeorgescuError::Violation(Violation::QuotientMismatch { .. }))
        ));
        let bad = GeorgescuPoint {
            components: vec![RadialPoint::Interior(vec![0.0, 1.0]), RadialPoint::Direction(vec![1.0])],
        };
        assert!(matches!(
            space.signature(&bad),
            Err(GeorgescuError::Violation(Violation::NotUpwardClosed { .. }))
        ));
    }

    #[test]
    fn chain_has_one_ordering_and_is_consistent() {
        let line = Subspace::span_i64(3, &[&[1, 0, 0]]).unwrap();
        let plane = Subspace::span_i64(3, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        let space = GeorgescuSpace::new(close(3, &[line, plane]).unwrap()).unwrap();
        let orders = admissible_orderings(space.lattice(), 10);
        assert_eq!(orders.len(), 1);
        let curves = vec![curve(&[&[1, 2, 3], &[1, 0, 0], &[0, 0, 0]]), curve(&[&[0, 0, 1], &[2, 1, 0]])];
        let report = verify_order_independence(&space, &orders, &curves, CLOSURE_TOL).unwrap();
        assert!(report.passed());
        assert_eq!(report.pairs_checked, 0);
    }

    #[test]
    fn tower_route_agrees_with_product_model() {
        let line = Subspace::span_i64(3, &[&[1, 1, 0]]).unwrap();
        let plane = Subspace::span_i64(3, &[&[1, 1, 0], &[0, 1, 2]]).unwrap();
        let space = GeorgescuSpace::new(close(3, &[line, plane]).unwrap()).unwrap();
        let order = AdmissibleOrdering::canonical(space.lattice());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = random_curve(&mut rng, space.lattice());
            let along = space.tuple_along(&order, &c).unwrap();
            let direct = space.curve_limit_tuple(&c).unwrap();
            assert!(space.distance(&along, &direct) < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn injectivity_examples() {
        let space = axis_space();
        let c1 = curve(&[&[0, 0], &[1, 0]]);
        let c2 = curve(&[&[0, 1], &[1, 0]]);
        let report = verify_injectivity(&space, &[c1.clone(), c2], CLOSURE_TOL).unwrap();
        assert!(report.passed());
        assert_eq!(report.distinct_class_pairs, 1);

        let report = verify_injectivity(&space, &[c1.clone(), c1.clone()], CLOSURE_TOL).unwrap();
        assert!(report.passed());
        assert_eq!(report.same_class_pairs, 1);

        // c and 3c: same direction at {0}, different finite component at the axis
        let c = curve(&[&[1, 2], &[1, 0]]);
        let c3 = curve(&[&[3, 6], &[3, 0]]);
        let a = space.curve_limit_tuple(&c).unwrap();
        let b = space.curve_limit_tuple(&c3).unwrap();
        assert!(a.components[0].approx_eq(&b.components[0], 1e-15));
        assert!(!a.components[1].approx_eq(&b.components[1], 1e-9));
    }

    #[test]
    fn translation_shifts_finite_components_only() {
        let space = axis_space();
        let c = curve(&[&[0, 5], &[1, 0]]);
        let tau = ints(&[2, -1]);
        let moved = space.translate(&space.curve_limit_tuple(&c).unwrap(), &tau).unwrap();
        let direct = space.curve_limit_tuple(&c.translate(&tau).unwrap()).unwrap();
        assert!(space.distance(&moved, &direct) < 1e-15);
        assert_eq!(moved.components[1], RadialPoint::Interior(vec![4.0]));
    }
}
