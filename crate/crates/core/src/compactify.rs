//! Radial compactification `Z̄ = Z ⊔ S_Z` and its octant coordinates.
//!
//! `Θ_n` sends a finite point `x` to `(1, x)/⟨x⟩` and a half-line `R₊v` to
//! `(0, v)/|v|`, identifying `R̄^n` with the closed half sphere `S^n_1`.
//! Curves are polynomial with exact rational coefficients so that their
//! limits at infinity are decided by the leading coefficient, not guessed
//! from a numeric evaluation.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{
    self, max_abs_diff, norm, psi_tilde, scale, ChartError, OctantPoint, SphereBlowupPoint,
    SplitSpherePoint,
};
use crate::exact_linalg::{
    from_json_vector, is_zero_vec, json_vector, positive_normalize, quotient_map, to_f64,
    vec_to_f64, JsonRational, LinalgError, QMatrix, QuotientMap, Rational, Subspace,
};

/// Split between finite points and directions in `Θ⁻¹`.
pub const THETA_SPLIT_TOL: f64 = 1e-12;
/// Two directions are the same point of `S_Z` when they differ by at most this.
pub const DIRECTION_EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompactifyError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("a direction needs a nonzero vector")]
    ZeroDirection,
    #[error("curve has no coefficients")]
    EmptyCurve,
    #[error("ambient dimension must be positive")]
    ZeroAmbient,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies on the blown-up sphere S_Y; its image needs front-face data")]
    OnBlownUpSphere,
}

pub type Result<T> = std::result::Result<T, CompactifyError>;

/// A point of `Z̄`: either a finite point or a unit direction (a half-line).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "vec", rename_all = "lowercase")]
pub enum RadialPoint {
    Interior(Vec<f64>),
    Direction(Vec<f64>),
}

impl RadialPoint {
    pub fn interior(x: Vec<f64>) -> Self {
        RadialPoint::Interior(x)
    }

    /// The half-line through `v`; `v` and `2v` give the same point, `v` and `-v` do not.
    pub fn direction(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if n == 0.0 || !n.is_finite() {
            return Err(CompactifyError::ZeroDirection);
        }
        Ok(RadialPoint::Direction(scale(&v, 1.0 / n)))
    }

    pub fn dim(&self) -> usize {
        self.vec().len()
    }

    pub fn vec(&self) -> &[f64] {
        match self {
            RadialPoint::Interior(v) | RadialPoint::Direction(v) => v,
        }
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, RadialPoint::Interior(_))
    }

    pub fn is_direction(&self) -> bool {
        matches!(self, RadialPoint::Direction(_))
    }

    /// Same kind and coordinates within `tol` (max-abs).
    pub fn approx_eq(&self, other: &RadialPoint, tol: f64) -> bool {
        self.is_interior() == other.is_interior() && max_abs_diff(self.vec(), other.vec()) <= tol
    }
}

/// `Θ_n : Z̄ -> S^n_1`.
pub fn theta(p: &RadialPoint) -> OctantPoint {
    let mut coords = Vec::with_capacity(p.dim() + 1);
    match p {
        RadialPoint::Interior(x) => {
            coords.push(1.0);
            coords.extend_from_slice(x);
        }
        RadialPoint::Direction(v) => {
            coords.push(0.0);
            coords.extend_from_slice(v);
        }
    }
    OctantPoint::normalized(1, coords).expect("theta image is a nonzero octant vector")
}

/// `Θ_n⁻¹ : S^n_1 -> Z̄`.
pub fn theta_inverse(q: &OctantPoint) -> Result<RadialPoint> {
    let coords = q.coords();
    let Some((&y0, rest)) = coords.split_first() else {
        return Err(CompactifyError::ZeroAmbient);
    };
    if y0 < -THETA_SPLIT_TOL {
        return Err(ChartError::NegativeCoordinate { index: 0, value: y0 }.into());
    }
    if y0 > THETA_SPLIT_TOL {
        Ok(RadialPoint::Interior(scale(rest, 1.0 / y0)))
    } else {
        RadialPoint::direction(rest.to_vec())
    }
}

/// Linear action on `Z̄`: `g x` on finite points, `R₊ g v` on directions.
pub fn act_radial(g: &QMatrix, p: &RadialPoint) -> Result<RadialPoint> {
    if g.cols() != p.dim() {
        return Err(CompactifyError::DimensionMismatch {
            expected: g.cols(),
            found: p.dim(),
        });
    }
    let image = g.mul_vec_f64(p.vec());
    match p {
        RadialPoint::Interior(_) => Ok(RadialPoint::Interior(image)),
        RadialPoint::Direction(_) => RadialPoint::direction(image),
    }
}

/// The same action read through `Θ`: `GL(R^n)` acts on the last `n` coordinates
/// of `R^{n+1}`, followed by renormalization onto `S^n_1`.
pub fn act_on_octant(g: &QMatrix, q: &OctantPoint) -> Result<OctantPoint> {
    let (y0, rest) = q.coords().split_first().ok_or(CompactifyError::ZeroAmbient)?;
    if g.cols() != rest.len() {
        return Err(CompactifyError::DimensionMismatch {
            expected: g.cols(),
            found: rest.len(),
        });
    }
    let mut coords = vec![*y0];
    coords.extend(g.mul_vec_f64(rest));
    Ok(OctantPoint::normalized(1, coords)?)
}

/// Image under `ψ_Y` of a point of `X̄`, or the marker that the point lies on `S_Y`.
#[derive(Clone, Debug, PartialEq)]
pub enum Pushforward {
    Point(RadialPoint),
    OnBlownUpSphere,
}

/// `x ↦ x + Y` on finite points, `R₊v ↦ R₊(v + Y)` on directions off `S_Y`.
pub fn push_quotient(p: &RadialPoint, q: &QuotientMap) -> Result<Pushforward> {
    if p.dim() != q.source_dim() {
        return Err(CompactifyError::DimensionMismatch {
            expected: q.source_dim(),
            found: p.dim(),
        });
    }
    let image = q.apply_f64(p.vec());
    Ok(match p {
        RadialPoint::Interior(_) => Pushforward::Point(RadialPoint::Interior(image)),
        RadialPoint::Direction(_) => {
            if norm(&image) <= THETA_SPLIT_TOL {
                Pushforward::OnBlownUpSphere
            } else {
                Pushforward::Point(RadialPoint::direction(image)?)
            }
        }
    })
}

/// A polynomial path `t ↦ Σ_k t^k v_k` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCurve {
    coeffs: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct PolyCurveRepr {
    coeffs: Vec<Vec<JsonRational>>,
}

impl Serialize for PolyCurve {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyCurveRepr {
            coeffs: self.coeffs.iter().map(|v| json_vector(v)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyCurve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyCurveRepr::deserialize(deserializer)?;
        PolyCurve::new(repr.coeffs.into_iter().map(from_json_vector).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl PolyCurve {
    pub fn new(coeffs: Vec<Vec<Rational>>) -> Result<Self> {
        let first = coeffs.first().ok_or(CompactifyError::EmptyCurve)?;
        let n = first.len();
        if n == 0 {
            return Err(CompactifyError::ZeroAmbient);
        }
        if let Some(c) = coeffs.iter().find(|c| c.len() != n) {
            return Err(CompactifyError::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
        Ok(Self { coeffs })
    }

    pub fn constant(v: Vec<Rational>) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn ambient(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn coeffs(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }

    /// Highest degree with a nonzero coefficient (0 for constant curves).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !is_zero_vec(c))
            .unwrap_or(0)
    }

    /// `(degree, coefficient)` of the dominant term, if the curve is not constant.
    pub fn leading(&self) -> Option<(usize, &[Rational])> {
        match self.degree() {
            0 => None,
            d => Some((d, &self.coeffs[d])),
        }
    }

    pub fn constant_term(&self) -> &[Rational] {
        &self.coeffs[0]
    }

    /// Coefficient-wise image `t ↦ g c(t)`.
    pub fn map(&self, g: &QMatrix) -> Result<PolyCurve> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| g.mul_vec(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PolyCurve::new(coeffs)
    }

    pub fn project(&self, q: &QuotientMap) -> Result<PolyCurve> {
        self.map(q.matrix())
    }

    /// `t ↦ c(t) + tau`.
    pub fn translate(&self, tau: &[Rational]) -> Result<PolyCurve> {
        if tau.len() != self.ambient() {
            return Err(CompactifyError::DimensionMismatch {
                expected: self.ambient(),
                found: tau.len(),
            });
        }
        let mut coeffs = self.coeffs.clone();
        for (c, t) in coeffs[0].iter_mut().zip(tau) {
            *c += t;
        }
        PolyCurve::new(coeffs)
    }

    /// Multiplies the dominant coefficient by `factor`.
    pub fn scale_leading(&self, factor: &Rational) -> PolyCurve {
        let mut coeffs = self.coeffs.clone();
        let d = self.degree();
        for c in coeffs[d].iter_mut() {
            *c *= factor;
        }
        PolyCurve { coeffs }
    }

    pub fn eval_f64(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient()];
        for c in self.coeffs.iter().rev() {
            for (o, x) in out.iter_mut().zip(c) {
                *o = *o * t + to_f64(x);
            }
        }
        out
    }
}

/// Limit of a curve at `t -> ∞`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExactLimit {
    Interior(Vec<Rational>),
    /// Direction of the dominant coefficient, canonically rescaled by a positive factor.
    Direction(Vec<Rational>),
}

impl ExactLimit {
    pub fn to_radial(&self) -> RadialPoint {
        match self {
            ExactLimit::Interior(v) => RadialPoint::Interior(vec_to_f64(v)),
            ExactLimit::Direction(v) => {
                RadialPoint::direction(vec_to_f64(v)).expect("dominant coefficient is nonzero")
            }
        }
    }
}

pub fn exact_limit(c: &PolyCurve) -> ExactLimit {
    match c.leading() {
        None => ExactLimit::Interior(c.constant_term().to_vec()),
        Some((_, lead)) => ExactLimit::Direction(positive_normalize(lead)),
    }
}

/// Dominant-term limit of `c(t)` in `Z̄` as `t -> ∞`.
pub fn curve_limit(c: &PolyCurve) -> Result<RadialPoint> {
    if c.ambient() == 0 {
        return Err(CompactifyError::ZeroAmbient);
    }
    Ok(exact_limit(c).to_radial())
}

/// Leading `(degree, coefficient)` of the vector polynomial `t ↦ (1, c(t))`.
fn homogenized_leading(c: &PolyCurve) -> (usize, Vec<Rational>) {
    match c.leading() {
        None => {
            let mut v = vec![Rational::from_integer(1.into())];
            v.extend_from_slice(c.constant_term());
            (0, v)
        }
        Some((d, lead)) => {
            let mut v = vec![Rational::zero()];
            v.extend_from_slice(lead);
            (d, v)
        }
    }
}

/// Chart data for `ψ_Y : [X̄ : S_Y] -> \overline{X/Y}`.
///
/// The frame `g = [Q; B]` stacks the quotient matrix `Q` on a basis `B` of `Y`,
/// so `g` maps `Y` onto `{0} × R^q` and the first `n - q` coordinates of `g x`
/// are the quotient coordinates of `x`. In these coordinates `Θ_n` sends `S_Y`
/// to `{0} × S^{q-1}` and `ψ_Y = Θ_{n-q}⁻¹ ∘ p₁ ∘ Ψ̃ ∘ Θ_n^β`.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    quotient: QuotientMap,
    frame: QMatrix,
}

impl QuotientChart {
    pub fn new(ambient: usize, kernel: &Subspace) -> Result<Self> {
        let quotient = quotient_map(ambient, kernel)?;
        let frame = if kernel.is_zero() {
            quotient.matrix().clone()
        } else {
            quotient.matrix().stack(&kernel.basis_matrix())?
        };
        debug_assert!(frame.is_invertible());
        Ok(Self { quotient, frame })
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    pub fn frame(&self) -> &QMatrix {
        &self.frame
    }

    fn target_dim(&self) -> usize {
        self.quotient.target_dim()
    }

    fn split(&self, coords: Vec<f64>) -> Result<SplitSpherePoint> {
        let cut = self.target_dim() + 1;
        let (eta, mu) = coords.split_at(cut);
        Ok(SplitSpherePoint::new(1, eta.to_vec(), 0, mu.to_vec())?)
    }

    /// `Θ_n^β` on points of `X̄` off `S_Y`.
    pub fn theta_beta(&self, p: &RadialPoint) -> Result<SphereBlowupPoint> {
        let framed = act_radial(&self.frame, p)?;
        let q = theta(&framed);
        if norm(&q.coords()[..=self.target_dim()]) <= THETA_SPLIT_TOL {
            return Err(CompactifyError::OnBlownUpSphere);
        }
        Ok(SphereBlowupPoint::Regular(self.split(q.into_coords())?))
    }

    /// Limit in `[X̄ : S_Y]` of the lift of `c(t)` as `t -> ∞`.
    ///
    /// With `u(t) = (1, Q c(t))` and `w(t) = (1, g c(t))`, the two `Ψ̃`
    /// components are `lim u/|u|` and `lim (|u|/|w|, B c/|w|)`; both are read off
    /// the leading coefficients. When `u` grows strictly slower than `w`, the
    /// limit lies on the front face over the direction of `B c`.
    pub fn lift_curve(&self, c: &PolyCurve) -> Result<SphereBlowupPoint> {
        let framed = c.map(&self.frame)?;
        let (deg_w, lead_w) = homogenized_leading(&framed);
        let cut = self.target_dim() + 1;
        if lead_w[..cut].iter().any(|x| !x.is_zero()) {
            let w = OctantPoint::normalized(1, vec_to_f64(&lead_w))?;
            return Ok(SphereBlowupPoint::Regular(self.split(w.into_coords())?));
        }
        let projected = c.project(&self.quotient)?;
        let (deg_u, lead_u) = homogenized_leading(&projected);
        debug_assert!(deg_u < deg_w);
        let phi = OctantPoint::normalized(1, vec_to_f64(&lead_u))?;
        let psi_tilde = OctantPoint::normalized(0, vec_to_f64(&lead_w[cut..]))?;
        Ok(SphereBlowupPoint::FrontFace { phi, psi_tilde })
    }

    /// `Θ_{n-q}⁻¹ ∘ p₁ ∘ Ψ̃` on a point of the blown-up octant.
    pub fn psi_y(&self, p: &SphereBlowupPoint) -> Result<RadialPoint> {
        let (phi, _) = psi_tilde(p)?;
        theta_inverse(&phi)
    }

    /// The chart route for `ψ_Y` on points of `X̄`.
    pub fn push(&self, p: &RadialPoint) -> Result<Pushforward> {
        match self.theta_beta(p) {
            Ok(lifted) => Ok(Pushforward::Point(self.psi_y(&lifted)?)),
            Err(CompactifyError::OnBlownUpSphere) => Ok(Pushforward::OnBlownUpSphere),
            Err(e) => Err(e),
        }
    }

    /// Limit of `c(t) + Y` in `\overline{X/Y}` through the chart route.
    pub fn curve_limit(&self, c: &PolyCurve) -> Result<RadialPoint> {
        self.psi_y(&self.lift_curve(c)?)
    }
}

/// Blow-down of a lifted limit, back in `S^n_1` (frame coordinates).
pub fn lifted_to_octant(p: &SphereBlowupPoint) -> OctantPoint {
    charts::sphere_blow_down(p).to_octant()
}
