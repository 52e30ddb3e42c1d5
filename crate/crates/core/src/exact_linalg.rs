//! Exact rational linear algebra for linear subspaces of `Q^n`.
//!
//! Every [`Subspace`] is stored by the reduced row-echelon form of a basis,
//! so structural equality is subspace equality. Intersections go through
//! annihilators (orthogonal complements) and null spaces; nothing in this
//! module touches floating point except the explicit `*_f64` conversions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambient dimension must be positive")]
    ZeroAmbient,
    #[error("subspace equals the ambient space")]
    FullSpace,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has no exact solution")]
    Inconsistent,
    #[error("invalid rational literal `{0}`")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Parses `"p/q"`, `"p"`, or a plain decimal such as `"-1.25"` / `"3e-2"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || LinalgError::ParseRational(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Bit-exact `"p/q"` rendering (the denominator is always written).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// JSON wrapper: serializes as a `"p/q"` string, accepts strings or JSON numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRational(pub Rational);

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let text = match &value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(D::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_rational(&text).map(JsonRational).map_err(D::Error::custom)
    }
}

pub fn json_vector(v: &[Rational]) -> Vec<JsonRational> {
    v.iter().cloned().map(JsonRational).collect()
}

pub fn from_json_vector(v: Vec<JsonRational>) -> Vec<Rational> {
    v.into_iter().map(|r| r.0).collect()
}

/// Brings `rows` (each of length `ncols`) to reduced row-echelon form in place,
/// dropping zero rows. Returns the pivot column of each remaining row.
pub fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pivot_row) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot_row);
        let inv = rows[r][col].recip();
        for entry in rows[r].iter_mut().skip(col) {
            *entry *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (entry, p) in row.iter_mut().zip(&pivot).skip(col) {
                *entry -= &factor * p;
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{ v : row . v = 0 for every row }`.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut reduced = rows.to_vec();
    let pivots = rref(&mut reduced, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut reduced = rows.to_vec();
    rref(&mut reduced, ncols).len()
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| ints(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| vec_to_f64(self.row(i))).collect()
    }

    /// Floating-point product; panics on a length mismatch, which is a caller bug.
    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| to_f64(a) * x).sum())
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(&self.row_vecs(), self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let pivots = rref(&mut aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        Self::from_rows(n, aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Some `x` with `self * x = b`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let mut aug: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.push(b[i].clone());
                row
            })
            .collect();
        let pivots = rref(&mut aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in aug.iter().zip(&pivots) {
            x[p] = row[self.cols].clone();
        }
        Ok(x)
    }

    /// Some `R` with `R * self = target`.
    pub fn solve_left(&self, target: &QMatrix) -> Result<QMatrix> {
        if target.cols != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: target.cols,
            });
        }
        let at = self.transpose();
        let rows = (0..target.rows)
            .map(|i| at.solve(target.row(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(self.rows, rows)
    }
}

/// A linear subspace of `Q^n`, stored as the RREF of a basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Result<Self> {
        if ambient == 0 {
            return Err(LinalgError::ZeroAmbient);
        }
        Ok(Self {
            ambient,
            basis: Vec::new(),
        })
    }

    pub fn full(ambient: usize) -> Result<Self> {
        Self::span(ambient, QMatrix::identity(ambient).row_vecs())
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        if ambient == 0 {
            return Err(LinalgError::ZeroAmbient);
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient,
                found: v.len(),
            });
        }
        let mut basis = vectors;
        rref(&mut basis, ambient);
        Ok(Self { ambient, basis })
    }

    pub fn span_i64(ambient: usize, vectors: &[&[i64]]) -> Result<Self> {
        Self::span(ambient, vectors.iter().map(|v| ints(v)).collect())
    }

    /// Common zero set of the linear forms in `equations`.
    pub fn from_equations(ambient: usize, equations: &[Vec<Rational>]) -> Result<Self> {
        if ambient == 0 {
            return Err(LinalgError::ZeroAmbient);
        }
        if let Some(e) = equations.iter().find(|e| e.len() != ambient) {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient,
                found: e.len(),
            });
        }
        Self::span(ambient, null_space(equations, ambient))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    fn check_ambient(&self, other: usize) -> Result<()> {
        if self.ambient != other {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: other,
            });
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[Rational]) -> Result<bool> {
        self.check_ambient(v.len())?;
        let mut residual = v.to_vec();
        for row in &self.basis {
            let pivot = row.iter().position(|x| !x.is_zero()).expect("rref rows are nonzero");
            if residual[pivot].is_zero() {
                continue;
            }
            let factor = residual[pivot].clone();
            for (r, b) in residual.iter_mut().zip(row) {
                *r -= &factor * b;
            }
        }
        Ok(is_zero_vec(&residual))
    }

    /// `other ⊂ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other.ambient)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        for v in &other.basis {
            if !self.contains_vector(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Orthogonal complement under the standard inner product, in RREF.
    pub fn orthogonal_complement(&self) -> Subspace {
        let basis = null_space(&self.basis, self.ambient);
        Subspace::span(self.ambient, basis).expect("null space vectors have ambient length")
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        let mut equations = self.orthogonal_complement().basis;
        equations.extend(other.orthogonal_complement().basis);
        Subspace::from_equations(self.ambient, &equations)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, vectors)
    }

    /// Image `g(self)`; `g` must be square of the ambient size.
    pub fn image(&self, g: &QMatrix) -> Result<Subspace> {
        self.check_ambient(g.cols())?;
        let vectors = self
            .basis
            .iter()
            .map(|v| g.mul_vec(v))
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(g.rows(), vectors)
    }

    pub fn basis_matrix(&self) -> QMatrix {
        QMatrix::from_rows(self.ambient, self.basis.clone()).expect("basis rows have ambient length")
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, "}} ⊂ Q^{}", self.ambient)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    basis: Vec<Vec<JsonRational>>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr {
            ambient: self.ambient,
            basis: self.basis.iter().map(|v| json_vector(v)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SubspaceRepr::deserialize(deserializer)?;
        let vectors = repr.basis.into_iter().map(from_json_vector).collect();
        Subspace::span(repr.ambient, vectors).map_err(D::Error::custom)
    }
}

/// The projection `X -> X/Y`, realized on the orthogonal complement of `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    kernel: Subspace,
    matrix: QMatrix,
}

impl QuotientMap {
    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec_f64(v)
    }

    /// The induced map `X/Y -> X/Y'` for `Y ⊂ Y'`: the `R` with `coarser = R * self`.
    pub fn factor_through(&self, coarser: &QuotientMap) -> Result<QMatrix> {
        self.matrix.solve_left(&coarser.matrix)
    }
}

pub fn quotient_map(ambient: usize, kernel: &Subspace) -> Result<QuotientMap> {
    kernel.check_ambient(ambient)?;
    if kernel.is_full() {
        return Err(LinalgError::FullSpace);
    }
    let complement = kernel.orthogonal_complement();
    let matrix = QMatrix::from_rows(ambient, complement.basis)?;
    Ok(QuotientMap {
        kernel: kernel.clone(),
        matrix,
    })
}

/// Positive rescaling to a canonical representative: the entry of largest
/// absolute value becomes `±1`. Zero stays zero.
pub fn positive_normalize(v: &[Rational]) -> Vec<Rational> {
    let scale = v
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    if scale.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &scale).collect()
}
