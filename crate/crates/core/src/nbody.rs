//! The N-body semilattice on `X = (ℝ^d)^N` and its symmetries.
//!
//! Coordinates are laid out particle by particle: `x_j` occupies the block
//! `(j-1)d .. jd`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{int, rat, LinalgError, QMatrix, Rational, Subspace};
use crate::semilattice::{act, close, Semilattice, SemilatticeError};

pub const DEFAULT_CAP: usize = 24;
/// Orthogonality tolerance for numeric `O(d)` matrices.
pub const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NBodyError {
    #[error("need at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("spatial dimension must be at least 1")]
    ZeroDimension,
    #[error("ambient dimension {ambient} exceeds the cap {cap}")]
    CapExceeded { ambient: usize, cap: usize },
    #[error("not a permutation of 1..={0}")]
    BadPermutation(usize),
    #[error("matrix is not {0}x{0}")]
    BadShape(usize),
    #[error("matrix is not orthogonal (deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("matrix entry is not finite")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Semilattice(#[from] SemilatticeError),
}

pub type Result<T> = std::result::Result<T, NBodyError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NBodySpec {
    #[serde(rename = "N")]
    pub particles: usize,
    pub d: usize,
    #[serde(default = "default_cap", skip_serializing)]
    pub cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

impl NBodySpec {
    pub fn new(particles: usize, d: usize) -> Result<Self> {
        Self::with_cap(particles, d, DEFAULT_CAP)
    }

    pub fn with_cap(particles: usize, d: usize, cap: usize) -> Result<Self> {
        let spec = Self { particles, d, cap };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(NBodyError::TooFewParticles(self.particles));
        }
        if self.d == 0 {
            return Err(NBodyError::ZeroDimension);
        }
        if self.ambient() > self.cap {
            return Err(NBodyError::CapExceeded {
                ambient: self.ambient(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.particles * self.d
    }

    fn unit(&self, particle: usize, axis: usize) -> Vec<Rational> {
        let mut e = vec![int(0); self.ambient()];
        e[particle * self.d + axis] = int(1);
        e
    }
}

/// `Y_1, …, Y_N` (`x_j = 0`) followed by `Y_ij` (`x_i = x_j`, `i < j`) in
/// lexicographic order.
pub fn generators(spec: &NBodySpec) -> Result<Vec<Subspace>> {
    spec.validate()?;
    let n = spec.ambient();
    let mut out = Vec::new();
    for j in 0..spec.particles {
        let equations: Vec<_> = (0..spec.d).map(|a| spec.unit(j, a)).collect();
        out.push(Subspace::from_equations(n, &equations)?);
    }
    for i in 0..spec.particles {
        for j in i + 1..spec.particles {
            let equations: Vec<_> = (0..spec.d)
                .map(|a| {
                    let mut e = spec.unit(i, a);
                    e[j * spec.d + a] = int(-1);
                    e
                })
                .collect();
            out.push(Subspace::from_equations(n, &equations)?);
        }
    }
    Ok(out)
}

pub fn nbody_semilattice(spec: &NBodySpec) -> Result<Semilattice> {
    Ok(close(spec.ambient(), &generators(spec)?)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryKind {
    /// `σ` as the images `σ(1), …, σ(N)`; particle `j` moves to slot `σ(j)`.
    Permutation(Vec<usize>),
    /// An exact `d×d` matrix applied to every particle.
    OrthoDiag(QMatrix),
    /// A numeric `d×d` matrix, checked to be orthogonal and converted exactly.
    OrthoDiagF64(Vec<Vec<f64>>),
}

fn check_orthogonal(g: &[Vec<f64>], d: usize) -> Result<()> {
    if g.len() != d || g.iter().any(|r| r.len() != d) {
        return Err(NBodyError::BadShape(d));
    }
    if g.iter().flatten().any(|x| !x.is_finite()) {
        return Err(NBodyError::NonFinite);
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let s: f64 = (0..d).map(|k| g[k][i] * g[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    if worst > ORTHO_TOL {
        return Err(NBodyError::NotOrthogonal(worst));
    }
    Ok(())
}

fn exact_orthogonal(g: &QMatrix, d: usize) -> Result<()> {
    if g.rows() != d || g.cols() != d {
        return Err(NBodyError::BadShape(d));
    }
    if g.transpose().mul(g)? != QMatrix::identity(d) {
        let floats = g.to_f64_rows();
        let worst = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| {
                let s: f64 = (0..d).map(|k| floats[k][i] * floats[k][j]).sum();
                (s - if i == j { 1.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max);
        return Err(NBodyError::NotOrthogonal(worst));
    }
    Ok(())
}

/// The `Nd×Nd` matrix of a particle permutation or a diagonal rotation.
pub fn symmetry_action(spec: &NBodySpec, kind: &SymmetryKind) -> Result<QMatrix> {
    spec.validate()?;
    let (big_n, d) = (spec.particles, spec.d);
    let mut m = QMatrix::zeros(spec.ambient(), spec.ambient());
    match kind {
        SymmetryKind::Permutation(sigma) => {
            let mut seen = vec![false; big_n];
            for &s in sigma {
                if s == 0 || s > big_n || std::mem::replace(&mut seen[s - 1], true) {
                    return Err(NBodyError::BadPermutation(big_n));
                }
            }
            if sigma.len() != big_n {
                return Err(NBodyError::BadPermutation(big_n));
            }
            for (j, &s) in sigma.iter().enumerate() {
                for a in 0..d {
                    m.set((s - 1) * d + a, j * d + a, int(1));
                }
            }
        }
        SymmetryKind::OrthoDiag(g) => {
            exact_orthogonal(g, d)?;
            fill_blocks(&mut m, big_n, d, |i, j| g.get(i, j).clone());
        }
        SymmetryKind::OrthoDiagF64(g) => {
            check_orthogonal(g, d)?;
            fill_blocks(&mut m, big_n, d, |i, j| {
                Rational::from_float(g[i][j]).expect("finite entries were checked")
            });
        }
    }
    Ok(m)
}

fn fill_blocks(m: &mut QMatrix, big_n: usize, d: usize, entry: impl Fn(usize, usize) -> Rational) {
    for p in 0..big_n {
        for i in 0..d {
            for j in 0..d {
                m.set(p * d + i, p * d + j, entry(i, j));
            }
        }
    }
}

/// `x ↦ x + (τ, …, τ)`: the common translation of all particles by `τ ∈ ℝ^d`.
pub fn common_translation(spec: &NBodySpec, tau: &[Rational]) -> Result<Vec<Rational>> {
    spec.validate()?;
    if tau.len() != spec.d {
        return Err(LinalgError::DimensionMismatch {
            expected: spec.d,
            found: tau.len(),
        }
        .into());
    }
    Ok((0..spec.particles).flat_map(|_| tau.iter().cloned()).collect())
}

/// Whether `act(s, g) = s`.
pub fn is_invariant(s: &Semilattice, g: &QMatrix) -> Result<bool> {
    Ok(act(s, g)? == *s)
}

/// All permutations of `1..=n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i + 1);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The named example semilattices used across the harnesses: a chain
/// `{0} ⊂ L ⊂ P` in `ℚ³`, and the N-body semilattices with `N ≤ 3`, `d ≤ 3`.
/// The `N=2, d=1` case is the three-line antichain.
pub fn builtin_semilattices() -> Vec<(String, Semilattice)> {
    let line = Subspace::span(3, vec![vec![int(1), int(0), int(0)]]).expect("valid line");
    let plane = Subspace::span(3, vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]])
        .expect("valid plane");
    let mut out = vec![(
        "chain".to_string(),
        close(3, &[line, plane]).expect("chain closes"),
    )];
    for big_n in 2..=3 {
        for d in 1..=3 {
            let spec = NBodySpec::new(big_n, d).expect("within cap");
            let name = if big_n == 2 && d == 1 {
                "antichain".to_string()
            } else {
                format!("nbody N={big_n},d={d}")
            };
            out.push((name, nbody_semilattice(&spec).expect("closes")));
        }
    }
    out
}

/// `diag(-1, …, -1)` as an exact `d×d` matrix.
pub fn minus_identity(d: usize) -> QMatrix {
    QMatrix::identity(d).scale(&rat(-1, 1))
}
