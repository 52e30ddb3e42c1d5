//! Explicit chart maps for blow-ups of the linear corner models `R^n_k` and
//! of sphere octants.
//!
//! Conventions: `R^n_k = [0,∞)^k × R^{n-k}` (the non-negative coordinates
//! come first), `S^{n-1}_k = S^{n-1} ∩ R^n_k`, and
//! `S^{n,n'}_{k,k'} = S^{n+n'} ∩ (R^n_k × R^{n'+1}_{k'})`. Coordinate
//! permutations are explicit [`CoordinatePermutation`] values.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Tolerance for unit norm and octant sign constraints.
pub const INVARIANT_TOL: f64 = 1e-12;
/// Tolerance for identities between composed maps.
pub const COMPOSITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("negative radial parameter {0}")]
    NegativeRadius(f64),
    #[error("expected a unit vector, norm is {0}")]
    NotUnit(f64),
    #[error("coordinate {index} must be non-negative, got {value}")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("octant index {k} exceeds dimension {n}")]
    BadOctant { k: usize, n: usize },
    #[error("point lies on the blow-up center (|eta| = {0}); use front-face data instead")]
    OnCenter(f64),
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("trivial p-submanifold cannot be a blow-up center")]
    TrivialCenter,
    #[error("index set must lie in 1..={n}, found {index}")]
    BadIndex { index: usize, n: usize },
    #[error("non-finite coordinate")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, ChartError>;

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest absolute coordinate difference; `INFINITY` on a length mismatch.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn scale(v: &[f64], factor: f64) -> Vec<f64> {
    v.iter().map(|x| x * factor).collect()
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(ChartError::LengthMismatch { expected, found });
    }
    Ok(())
}

fn check_corner(v: &[f64], k: usize) -> Result<()> {
    if k > v.len() {
        return Err(ChartError::BadOctant { k, n: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(ChartError::NonFinite);
    }
    for (index, &value) in v.iter().enumerate().take(k) {
        if value < -INVARIANT_TOL {
            return Err(ChartError::NegativeCoordinate { index, value });
        }
    }
    Ok(())
}

/// A point of the sphere octant `S^{n-1}_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OctantPoint {
    k: usize,
    coords: Vec<f64>,
}

impl OctantPoint {
    /// Validates unit norm and the sign of the first `k` coordinates.
    pub fn new(k: usize, coords: Vec<f64>) -> Result<Self> {
        check_corner(&coords, k)?;
        let n = norm(&coords);
        if (n - 1.0).abs() > INVARIANT_TOL {
            return Err(ChartError::NotUnit(n));
        }
        Ok(Self { k, coords })
    }

    /// Rescales `coords` onto the unit sphere before validating.
    pub fn normalized(k: usize, coords: Vec<f64>) -> Result<Self> {
        check_corner(&coords, k)?;
        let n = norm(&coords);
        if n == 0.0 {
            return Err(ChartError::ZeroVector);
        }
        Self::new(k, scale(&coords, 1.0 / n))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Length of the coordinate vector (`n` for a point of `S^{n-1}_k`).
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// Uniform sample of `S^{len-1}_k`: a Gaussian vector folded into the octant.
pub fn sample_octant<R: Rng + ?Sized>(rng: &mut R, len: usize, k: usize) -> OctantPoint {
    assert!(len > 0 && k <= len, "octant S^{}_{} is empty", len as isize - 1, k);
    loop {
        let mut v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        for x in v.iter_mut().take(k) {
            *x = x.abs();
        }
        if norm(&v) > 1e-6 {
            return OctantPoint::normalized(k, v).expect("folded gaussian is a valid octant point");
        }
    }
}

/// A coordinate permutation: `apply(v)[i] = v[source[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinatePermutation {
    source: Vec<usize>,
}

impl CoordinatePermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            source: (0..n).collect(),
        }
    }

    /// `R^n_k × R^{n'}_{k'} -> R^{n+n'}_{k+k'}`, `(x', x'', y', y'') ↦ (x', y', x'', y'')`.
    pub fn canonical(n: usize, k: usize, n_prime: usize, k_prime: usize) -> Self {
        let mut source: Vec<usize> = (0..k).collect();
        source.extend(n..n + k_prime);
        source.extend(k..n);
        source.extend(n + k_prime..n + n_prime);
        Self { source }
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.source.len(), "permutation length mismatch");
        self.source.iter().map(|&i| v[i]).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut source = vec![0; self.source.len()];
        for (i, &s) in self.source.iter().enumerate() {
            source[s] = i;
        }
        Self { source }
    }
}

/// The local model `L_I = { x_i = 0, i ∈ I }` inside `R^n_k` (indices 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSubmanifold {
    n: usize,
    k: usize,
    indices: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryDepth {
    /// Number of constrained coordinates among the first `k`.
    pub b: usize,
    /// Codimension `#I`.
    pub c: usize,
    /// Dimension `n - c`.
    pub d: usize,
}

impl ModelSubmanifold {
    pub fn new(n: usize, k: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        if k > n {
            return Err(ChartError::BadOctant { k, n });
        }
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&index) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(ChartError::BadIndex { index, n });
        }
        Ok(Self { n, k, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn boundary_depth(&self) -> BoundaryDepth {
        let b = self.indices.iter().filter(|&&i| i <= self.k).count();
        let c = self.indices.len();
        BoundaryDepth { b, c, d: self.n - c }
    }

    /// `I = ∅` gives an open subset, which cannot be blown up.
    pub fn is_trivial(&self) -> bool {
        self.indices.is_empty()
    }
}

/// A non-trivial `L_I ⊂ R^n_k` presented as `R^{n-c}_{k-b} × {0} ⊂ R^{n-c}_{k-b} × R^c_b`.
#[derive(Clone, Debug)]
pub struct BlowupCenter {
    model: ModelSubmanifold,
    split: CoordinatePermutation,
}

impl BlowupCenter {
    pub fn new(model: ModelSubmanifold) -> Result<Self> {
        if model.is_trivial() {
            return Err(ChartError::TrivialCenter);
        }
        let n = model.n;
        let k = model.k;
        // Along the center: free corner coords, then free interior coords;
        // normal directions: constrained corner coords, then constrained interior coords.
        let along_corner = (0..k).filter(|i| !model.indices.contains(&(i + 1)));
        let along_free = (k..n).filter(|i| !model.indices.contains(&(i + 1)));
        let normal_corner = (0..k).filter(|i| model.indices.contains(&(i + 1)));
        let normal_free = (k..n).filter(|i| model.indices.contains(&(i + 1)));
        let source = along_corner
            .chain(along_free)
            .chain(normal_corner)
            .chain(normal_free)
            .collect();
        Ok(Self {
            model,
            split: CoordinatePermutation { source },
        })
    }

    pub fn model(&self) -> &ModelSubmanifold {
        &self.model
    }

    fn dims(&self) -> (usize, usize, usize, usize) {
        let depth = self.model.boundary_depth();
        (depth.d, self.model.k - depth.b, depth.c, depth.b)
    }

    /// Inverse of the blow-down away from the center.
    pub fn lift(&self, point: &[f64]) -> Result<LocalBlowupPoint> {
        check_len(self.model.n, point.len())?;
        check_corner(point, self.model.k)?;
        let (d, l, _, b) = self.dims();
        let permuted = self.split.apply(point);
        let (x, y) = permuted.split_at(d);
        let r = norm(y);
        if r == 0.0 {
            return Err(ChartError::OnCenter(r));
        }
        LocalBlowupPoint::new(x.to_vec(), l, OctantPoint::normalized(b, y.to_vec())?, r)
    }

    /// Blow-down expressed back in the original coordinates of `R^n_k`.
    pub fn blow_down(&self, p: &LocalBlowupPoint) -> Vec<f64> {
        let (x, y) = blow_down(p);
        let mut joined = x;
        joined.extend(y);
        self.split.inverse().apply(&joined)
    }
}

/// Coordinates `(x, ξ, r) ∈ R^n_l × S^{n'-1}_{l'} × [0,∞)` of a blown-up local model.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBlowupPoint {
    x: Vec<f64>,
    l: usize,
    xi: OctantPoint,
    r: f64,
}

impl LocalBlowupPoint {
    pub fn new(x: Vec<f64>, l: usize, xi: OctantPoint, r: f64) -> Result<Self> {
        check_corner(&x, l)?;
        if !(r >= 0.0) {
            return Err(ChartError::NegativeRadius(r));
        }
        Ok(Self { x, l, xi, r })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn xi(&self) -> &OctantPoint {
        &self.xi
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// A point of `R^n_l × (S^{n'-1}_{l'} ⊔ (R^{n'}_{l'} \ {0}))`.
#[derive(Clone, Debug, PartialEq)]
pub enum BlownUpPoint {
    /// On the front face: `(x, ξ)`.
    Boundary { x: Vec<f64>, l: usize, xi: OctantPoint },
    /// Off the center: `(x, y)` with `y ≠ 0`.
    Interior {
        x: Vec<f64>,
        l: usize,
        y: Vec<f64>,
        l_prime: usize,
    },
}

pub fn kappa(x: &[f64], l: usize, xi: &OctantPoint, r: f64) -> Result<BlownUpPoint> {
    check_corner(x, l)?;
    if !(r >= 0.0) {
        return Err(ChartError::NegativeRadius(r));
    }
    if r == 0.0 {
        Ok(BlownUpPoint::Boundary {
            x: x.to_vec(),
            l,
            xi: xi.clone(),
        })
    } else {
        Ok(BlownUpPoint::Interior {
            x: x.to_vec(),
            l,
            y: scale(xi.coords(), r),
            l_prime: xi.k(),
        })
    }
}

pub fn kappa_inverse(p: &BlownUpPoint) -> Result<LocalBlowupPoint> {
    match p {
        BlownUpPoint::Boundary { x, l, xi } => LocalBlowupPoint::new(x.clone(), *l, xi.clone(), 0.0),
        BlownUpPoint::Interior { x, l, y, l_prime } => {
            let r = norm(y);
            let xi = OctantPoint::normalized(*l_prime, y.clone())?;
            LocalBlowupPoint::new(x.clone(), *l, xi, r)
        }
    }
}

/// `β(x, ξ, r) = (x, rξ)`.
pub fn blow_down(p: &LocalBlowupPoint) -> (Vec<f64>, Vec<f64>) {
    (p.x.clone(), scale(p.xi.coords(), p.r))
}

/// A point `(η, μ)` of `S^{n,n'}_{k,k'}`, `η ∈ R^n_k`, `μ ∈ R^{n'+1}_{k'}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSpherePoint {
    k: usize,
    k_prime: usize,
    eta: Vec<f64>,
    mu: Vec<f64>,
}

impl SplitSpherePoint {
    pub fn new(k: usize, eta: Vec<f64>, k_prime: usize, mu: Vec<f64>) -> Result<Self> {
        check_corner(&eta, k)?;
        check_corner(&mu, k_prime)?;
        let n = (norm(&eta).powi(2) + norm(&mu).powi(2)).sqrt();
        if (n - 1.0).abs() > INVARIANT_TOL {
            return Err(ChartError::NotUnit(n));
        }
        Ok(Self {
            k,
            k_prime,
            eta,
            mu,
        })
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    /// Concatenated coordinates `(η, μ)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.eta.clone();
        v.extend_from_slice(&self.mu);
        v
    }

    /// The same point in `S^{n+n'}_{k+k'}` via the canonical permutation.
    pub fn to_octant(&self) -> OctantPoint {
        let perm =
            CoordinatePermutation::canonical(self.eta.len(), self.k, self.mu.len(), self.k_prime);
        OctantPoint {
            k: self.k + self.k_prime,
            coords: perm.apply(&self.coords()),
        }
    }

    pub fn from_octant(
        p: &OctantPoint,
        n: usize,
        k: usize,
        k_prime: usize,
    ) -> Result<SplitSpherePoint> {
        if n > p.len() || k + k_prime != p.k() {
            return Err(ChartError::LengthMismatch {
                expected: p.len(),
                found: n,
            });
        }
        let perm = CoordinatePermutation::canonical(n, k, p.len() - n, k_prime);
        let coords = perm.inverse().apply(p.coords());
        let (eta, mu) = coords.split_at(n);
        SplitSpherePoint::new(k, eta.to_vec(), k_prime, mu.to_vec())
    }
}

/// `Υ(φ, ψ) = (ψ₁ φ, ψ̃)` for `φ ∈ S^{n-1}_k`, `ψ = (ψ₁, ψ̃) ∈ S^{n'+1}_{k'+1}`.
pub fn upsilon(phi: &OctantPoint, psi: &OctantPoint) -> Result<SplitSpherePoint> {
    if psi.k() == 0 {
        return Err(ChartError::BadOctant {
            k: psi.k(),
            n: psi.len(),
        });
    }
    let psi1 = psi.coords()[0];
    if !(-INVARIANT_TOL..=1.0 + INVARIANT_TOL).contains(&psi1) {
        return Err(ChartError::NegativeCoordinate {
            index: 0,
            value: psi1,
        });
    }
    let psi1 = psi1.clamp(0.0, 1.0);
    SplitSpherePoint::new(
        phi.k(),
        scale(phi.coords(), psi1),
        psi.k() - 1,
        psi.coords()[1..].to_vec(),
    )
}

/// `Ψ(η, μ) = (η/|η|, (|η|, μ))`, defined off `{0} × S^{n'}_{k'}`.
pub fn psi_map(p: &SplitSpherePoint) -> Result<(OctantPoint, OctantPoint)> {
    let r = norm(&p.eta);
    if r <= INVARIANT_TOL {
        return Err(ChartError::OnCenter(r));
    }
    let phi = OctantPoint::normalized(p.k, p.eta.clone())?;
    let mut psi = Vec::with_capacity(p.mu.len() + 1);
    psi.push(r);
    psi.extend_from_slice(&p.mu);
    Ok((phi, OctantPoint::new(p.k_prime + 1, psi)?))
}

/// A point of `[S^{n,n'}_{k,k'} : {0} × S^{n'}_{k'}]`.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereBlowupPoint {
    /// Off the center; the blow-down is a diffeomorphism there.
    Regular(SplitSpherePoint),
    /// On the front face over `(0, ψ̃)`, with normal direction `φ ∈ S^{n-1}_k`.
    FrontFace {
        phi: OctantPoint,
        psi_tilde: OctantPoint,
    },
}

/// The extension `Ψ̃` of `Ψ` to the blown-up sphere octant.
pub fn psi_tilde(p: &SphereBlowupPoint) -> Result<(OctantPoint, OctantPoint)> {
    match p {
        SphereBlowupPoint::Regular(q) => psi_map(q),
        SphereBlowupPoint::FrontFace { phi, psi_tilde } => {
            let mut psi = Vec::with_capacity(psi_tilde.len() + 1);
            psi.push(0.0);
            psi.extend_from_slice(psi_tilde.coords());
            Ok((phi.clone(), OctantPoint::new(psi_tilde.k() + 1, psi)?))
        }
    }
}

/// Blow-down of `[S^{n,n'}_{k,k'} : {0} × S^{n'}_{k'}]`.
pub fn sphere_blow_down(p: &SphereBlowupPoint) -> SplitSpherePoint {
    match p {
        SphereBlowupPoint::Regular(q) => q.clone(),
        SphereBlowupPoint::FrontFace { phi, psi_tilde } => SplitSpherePoint {
            k: phi.k(),
            k_prime: psi_tilde.k(),
            eta: vec![0.0; phi.len()],
            mu: psi_tilde.coords().to_vec(),
        },
    }
}

/// The local model `M = R^m_{k_m} × R^p_{k_p}`, `P = {0} × R^p_{k_p}`, `Q = {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NestedCenters {
    pub m: usize,
    pub k_m: usize,
    pub p: usize,
    pub k_p: usize,
}

/// `𝓑(x, y, t) = (x, ty, (y₁x, ỹ), t) ∈ [M:P] × [M:Q]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairImage {
    pub x: OctantPoint,
    pub z: Vec<f64>,
    pub w: SplitSpherePoint,
    pub t: f64,
}

impl NestedCenters {
    pub fn new(m: usize, k_m: usize, p: usize, k_p: usize) -> Result<Self> {
        if m == 0 {
            return Err(ChartError::TrivialCenter);
        }
        if k_m > m {
            return Err(ChartError::BadOctant { k: k_m, n: m });
        }
        if k_p > p {
            return Err(ChartError::BadOctant { k: k_p, n: p });
        }
        Ok(Self { m, k_m, p, k_p })
    }

    fn check_x(&self, x: &OctantPoint) -> Result<()> {
        check_len(self.m, x.len())?;
        if x.k() != self.k_m {
            return Err(ChartError::BadOctant { k: x.k(), n: self.m });
        }
        Ok(())
    }

    fn check_y(&self, y: &OctantPoint) -> Result<()> {
        check_len(self.p + 1, y.len())?;
        if y.k() != self.k_p + 1 {
            return Err(ChartError::BadOctant {
                k: y.k(),
                n: self.p + 1,
            });
        }
        Ok(())
    }

    /// `β_{M,P}(x, z) = (z₁ x, z̃)` on `S^{m-1}_{k_m} × R^{p+1}_{k_p+1}`.
    pub fn beta_mp(&self, x: &OctantPoint, z: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        check_len(self.p + 1, z.len())?;
        check_corner(z, self.k_p + 1)?;
        let mut out = scale(x.coords(), z[0]);
        out.extend_from_slice(&z[1..]);
        Ok(out)
    }

    /// `β_{M,Q}(w, t) = t w` on `S^{m,p-1}_{k_m,k_p} × [0,∞)`.
    pub fn beta_mq(&self, w: &SplitSpherePoint, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(ChartError::NegativeRadius(t));
        }
        Ok(scale(&w.coords(), t))
    }

    /// `ζ(x, y, t) = (x, t y)`: `[[M:Q]:[P:Q]] -> [M:P]`.
    pub fn zeta(&self, x: &OctantPoint, y: &OctantPoint, t: f64) -> Result<(OctantPoint, Vec<f64>)> {
        self.check_x(x)?;
        self.check_y(y)?;
        if !(t >= 0.0) {
            return Err(ChartError::NegativeRadius(t));
        }
        Ok((x.clone(), scale(y.coords(), t)))
    }

    /// `Υ × id`: the blow-down `[[M:Q]:[P:Q]] -> [M:Q]`.
    pub fn upsilon_times_id(
        &self,
        x: &OctantPoint,
        y: &OctantPoint,
        t: f64,
    ) -> Result<(SplitSpherePoint, f64)> {
        self.check_x(x)?;
        self.check_y(y)?;
        if !(t >= 0.0) {
            return Err(ChartError::NegativeRadius(t));
        }
        Ok((upsilon(x, y)?, t))
    }

    pub fn b_map(&self, x: &OctantPoint, y: &OctantPoint, t: f64) -> Result<PairImage> {
        let (x_out, z) = self.zeta(x, y, t)?;
        let (w, t) = self.upsilon_times_id(x, y, t)?;
        Ok(PairImage { x: x_out, z, w, t })
    }

    /// `(x, z, (w₁, w₂), t) ↦ (x, (|w₁|, w₂), t)`.
    pub fn b_left_inverse(&self, image: &PairImage) -> Result<(OctantPoint, OctantPoint, f64)> {
        self.check_x(&image.x)?;
        let mut y = Vec::with_capacity(self.p + 1);
        y.push(norm(image.w.eta()));
        y.extend_from_slice(image.w.mu());
        Ok((image.x.clone(), OctantPoint::new(self.k_p + 1, y)?, image.t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oct(k: usize, v: &[f64]) -> OctantPoint {
        OctantPoint::new(k, v.to_vec()).unwrap()
    }

    #[test]
    fn boundary_depth_examples() {
        let d = ModelSubmanifold::new(3, 2, [1, 3]).unwrap().boundary_depth();
        assert_eq!((d.b, d.c, d.d), (1, 2, 1));
        let d = ModelSubmanifold::new(5, 2, []).unwrap().boundary_depth();
        assert_eq!((d.b, d.c, d.d), (0, 0, 5));
        let d = ModelSubmanifold::new(4, 4, [1, 2, 3, 4]).unwrap().boundary_depth();
        assert_eq!((d.b, d.c, d.d), (4, 4, 0));
        assert!(ModelSubmanifold::new(2, 3, []).is_err());
        assert!(ModelSubmanifold::new(2, 1, [0]).is_err());
    }

    #[test]
    fn trivial_center_is_rejected() {
        let m = ModelSubmanifold::new(3, 1, []).unwrap();
        assert!(matches!(BlowupCenter::new(m), Err(ChartError::TrivialCenter)));
    }

    #[test]
    fn center_lift_and_blow_down() {
        let center = BlowupCenter::new(ModelSubmanifold::new(3, 2, [1, 3]).unwrap()).unwrap();
        let point = [0.5, 2.0, -1.5];
        let lifted = center.lift(&point).unwrap();
        assert_eq!(lifted.x(), &[2.0]);
        assert_eq!(lifted.l(), 1);
        assert_eq!(lifted.xi().k(), 1);
        assert!(max_abs_diff(&center.blow_down(&lifted), &point) < 1e-15);
        assert!(matches!(center.lift(&[0.0, 1.0, 0.0]), Err(ChartError::OnCenter(_))));
    }

    #[test]
    fn kappa_cases() {
        let xi = oct(1, &[0.6, 0.8]);
        let b = kappa(&[1.0], 0, &xi, 0.0).unwrap();
        assert_eq!(b, BlownUpPoint::Boundary { x: vec![1.0], l: 0, xi: xi.clone() });
        match kappa(&[1.0], 0, &xi, 2.0).unwrap() {
            BlownUpPoint::Interior { y, .. } => assert_eq!(y, vec![1.2, 1.6]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(kappa(&[1.0], 0, &xi, -1.0), Err(ChartError::NegativeRadius(_))));
    }

    #[test]
    fn kappa_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let xi = sample_octant(&mut rng, 3, 2);
            let r: f64 = rng.gen_range(0.0..5.0);
            let x = vec![rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)];
            let back = kappa_inverse(&kappa(&x, 1, &xi, r).unwrap()).unwrap();
            assert!((back.r() - r).abs() < 1e-12);
            assert!(max_abs_diff(back.xi().coords(), xi.coords()) < 1e-12);
        }
    }

    #[test]
    fn blow_down_examples() {
        let xi = oct(0, &[0.6, -0.8]);
        let p0 = LocalBlowupPoint::new(vec![3.0], 1, xi.clone(), 0.0).unwrap();
        assert_eq!(blow_down(&p0), (vec![3.0], vec![0.0, -0.0]));
        let p1 = LocalBlowupPoint::new(vec![3.0], 1, xi.clone(), 1.0).unwrap();
        assert_eq!(blow_down(&p1), (vec![3.0], vec![0.6, -0.8]));
    }

    #[test]
    fn upsilon_examples() {
        let phi = oct(1, &[0.6, 0.8]);
        let s = 0.75f64.sqrt();
        let out = upsilon(&phi, &oct(1, &[0.5, s])).unwrap();
        assert!(max_abs_diff(&out.coords(), &[0.3, 0.4, s]) < 1e-15);
        let out = upsilon(&phi, &oct(1, &[1.0, 0.0])).unwrap();
        assert_eq!(out.coords(), vec![0.6, 0.8, 0.0]);
        let out = upsilon(&phi, &oct(1, &[0.0, 1.0])).unwrap();
        assert_eq!(out.coords(), vec![0.0, 0.0, 1.0]);
        // S^0_1 = {1}: the degenerate pair P = Q leaves φ unchanged
        let out = upsilon(&phi, &oct(1, &[1.0])).unwrap();
        assert_eq!(out.coords(), vec![0.6, 0.8]);
        assert!(upsilon(&phi, &oct(0, &[0.0, 1.0])).is_err());
    }

    #[test]
    fn psi_examples() {
        let p = SplitSpherePoint::new(0, vec![0.36, 0.48], 0, vec![0.8]).unwrap();
        let (phi, psi) = psi_map(&p).unwrap();
        assert!(max_abs_diff(phi.coords(), &[0.6, 0.8]) < 1e-15);
        assert!(max_abs_diff(psi.coords(), &[0.6, 0.8]) < 1e-15);
        let back = upsilon(&phi, &psi).unwrap();
        assert!(max_abs_diff(&back.coords(), &p.coords()) < 1e-15);

        let unit = SplitSpherePoint::new(0, vec![0.6, 0.8], 0, vec![0.0]).unwrap();
        let (phi, psi) = psi_map(&unit).unwrap();
        assert_eq!(phi.coords(), &[0.6, 0.8]);
        assert_eq!(psi.coords(), &[1.0, 0.0]);

        let center = SplitSpherePoint::new(0, vec![0.0, 0.0], 0, vec![1.0]).unwrap();
        assert!(matches!(psi_map(&center), Err(ChartError::OnCenter(_))));
    }

    #[test]
    fn front_face_blows_down_to_center() {
        let phi = oct(1, &[0.6, 0.8]);
        let psi_t = oct(0, &[0.0, -1.0]);
        let p = SphereBlowupPoint::FrontFace { phi: phi.clone(), psi_tilde: psi_t };
        let (a, b) = psi_tilde(&p).unwrap();
        let via_upsilon = upsilon(&a, &b).unwrap();
        assert_eq!(via_upsilon.coords(), sphere_blow_down(&p).coords());
        assert_eq!(sphere_blow_down(&p).coords(), vec![0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn canonical_permutation_moves_corner_coordinates_forward() {
        // (x', x'', y', y'') with n=3,k=1 and n'=2,k'=1
        let perm = CoordinatePermutation::canonical(3, 1, 2, 1);
        let v = [10.0, 11.0, 12.0, 20.0, 21.0];
        assert_eq!(perm.apply(&v), vec![10.0, 20.0, 11.0, 12.0, 21.0]);
        assert_eq!(perm.inverse().apply(&perm.apply(&v)), v.to_vec());
        let split = SplitSpherePoint::new(1, vec![0.6, 0.0], 1, vec![0.8]).unwrap();
        let o = split.to_octant();
        assert_eq!(o.k(), 2);
        assert_eq!(SplitSpherePoint::from_octant(&o, 2, 1, 1).unwrap(), split);
    }

    #[test]
    fn zeta_and_pair_map() {
        let model = NestedCenters::new(2, 1, 1, 0).unwrap();
        let x = oct(1, &[0.6, 0.8]);
        let y = oct(1, &[0.6, -0.8]);
        let (_, z0) = model.zeta(&x, &y, 0.0).unwrap();
        assert_eq!(z0, vec![0.0, -0.0]);
        let (_, z1) = model.zeta(&x, &y, 1.0).unwrap();
        assert_eq!(z1, y.coords().to_vec());
        assert!(model.zeta(&x, &y, -0.5).is_err());
        let image = model.b_map(&x, &y, 0.0).unwrap();
        let (bx, by, bt) = model.b_left_inverse(&image).unwrap();
        assert_eq!(bx, x);
        assert!(max_abs_diff(by.coords(), y.coords()) < 1e-15);
        assert_eq!(bt, 0.0);
    }
}
