//! Dense complex linear algebra for small Hermitian operators.
//!
//! Everything here targets dimensions up to 8 or so: matrices are stored as a
//! flat row-major `Vec<Complex64>`, and eigendecompositions use cyclic complex
//! Jacobi rotations, which are deterministic and accurate to a few ulps at this
//! size. Spectral matrix functions (`sqrt`, `inverse sqrt`) are built on top.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for accepting a matrix as Hermitian.
pub const TOL_HERMITIAN: f64 = 1e-12;
/// Default eigenvalue floor below which a pole function refuses to act.
pub const DEFAULT_MIN_EIG: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Components smaller than this are not used to fix an eigenvector's phase.
const PHASE_COMPONENT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "inner product of vectors with different lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / |v|`, or `None` for the zero vector.
pub fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|x| x / n).collect())
}

/// Kronecker product of two vectors, first factor outermost.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from a flat row-major entry list of length `dim²`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "matrix dimension must be at least 1".into(),
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericIntegrity {
                quantity: "matrix entry",
                value: if bad.re.is_finite() { bad.im } else { bad.re },
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::from_entries(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { re(values[i]) } else { ZERO })
    }

    /// `|v><w|`
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of vectors with different lengths");
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let dim = columns.len();
        if let Some(bad) = columns.iter().find(|col| col.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| columns[j][i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[Complex64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(re(factor))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<v|M|w>`
    pub fn sandwich(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        inner(v, &self.apply(w))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, s| self.get(r / m, s / m) * other.get(r % m, s % m))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs entrywise distance; panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparing matrices of different dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-abs distance between the matrix and its conjugate transpose.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.entries.chunks(self.dim) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different dimensions");
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different dimensions");
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "multiplying matrices of different dimensions");
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

/// Sum of a non-empty list of equally sized matrices.
pub fn sum_matrices<'a>(mut items: impl Iterator<Item = &'a SquareMatrix>) -> Option<SquareMatrix> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, m| &acc + m))
}

/// Traces out the second factor of a `dim_a * dim_b` operator.
pub fn partial_trace_b(m: &SquareMatrix, dim_a: usize, dim_b: usize) -> Result<SquareMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    Ok(SquareMatrix::from_fn(dim_a, |i, k| {
        (0..dim_b).map(|j| m.get(i * dim_b + j, k * dim_b + j)).sum()
    }))
}

/// Traces out the first factor of a `dim_a * dim_b` operator.
pub fn partial_trace_a(m: &SquareMatrix, dim_a: usize, dim_b: usize) -> Result<SquareMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    Ok(SquareMatrix::from_fn(dim_b, |j, l| {
        (0..dim_a).map(|i| m.get(i * dim_b + j, i * dim_b + l)).sum()
    }))
}

fn check_bipartite(m: &SquareMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 || m.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: m.dim(),
        });
    }
    Ok(())
}

/// A square matrix that equals its conjugate transpose.
///
/// The constructor accepts matrices within [`TOL_HERMITIAN`] of Hermitian and
/// stores the symmetrized `(M + M†)/2`, so the stored value is exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: SquareMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL_HERMITIAN)
    }

    pub fn with_tolerance(matrix: SquareMatrix, tolerance: f64) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NumericIntegrity {
                quantity: "matrix entry",
                value: f64::NAN,
            });
        }
        let residual = matrix.hermiticity_residual();
        if residual > tolerance {
            return Err(Error::NonHermitianInput { residual, tolerance });
        }
        Ok(Self::symmetrized(&matrix))
    }

    fn symmetrized(m: &SquareMatrix) -> Self {
        let n = m.dim();
        let matrix = SquareMatrix::from_fn(n, |i, j| {
            if i == j {
                re(m.get(i, i).re)
            } else {
                (m.get(i, j) + m.get(j, i).conj()) * 0.5
            }
        });
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: SquareMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: SquareMatrix::zeros(dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            matrix: SquareMatrix::diagonal(values),
        }
    }

    /// `|v><v|`
    pub fn projector(v: &[Complex64]) -> Self {
        Self::symmetrized(&SquareMatrix::outer(v, v))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real part of `Tr(self · other)`; exact for a pair of Hermitian operators.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        self.matrix.check_same_dim(&other.matrix)?;
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix.get(i, j) * other.matrix.get(j, i)).re;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.matrix.check_same_dim(&other.matrix)?;
        Ok(Self::symmetrized(&(&self.matrix + &other.matrix)))
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.matrix.check_same_dim(&other.matrix)?;
        Ok(Self::symmetrized(&(&self.matrix - &other.matrix)))
    }

    pub fn scale(&self, factor: f64) -> HermitianOperator {
        Self {
            matrix: self.matrix.scale_real(factor),
        }
    }

    /// `B · self · B` for Hermitian `B`, which stays Hermitian.
    pub fn conjugate_by(&self, b: &HermitianOperator) -> Result<HermitianOperator> {
        self.matrix.check_same_dim(&b.matrix)?;
        Ok(Self::symmetrized(&(&(&b.matrix * &self.matrix) * &b.matrix)))
    }

    /// `U · self · U†` for an arbitrary square `U`.
    pub fn unitary_conjugate(&self, u: &SquareMatrix) -> Result<HermitianOperator> {
        self.matrix.check_same_dim(u)?;
        Ok(Self::symmetrized(&(&(u * &self.matrix) * &u.adjoint())))
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn eig(&self) -> Spectrum {
        hermitian_eig(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().eigenvalues[0]
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: SquareMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `Σ_k f(λ_k) |v_k><v_k|`
    pub fn rebuild_with(&self, mut f: impl FnMut(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let m = SquareMatrix::from_fn(n, |i, j| {
            (0..n)
                .filter(|&k| weights[k] != 0.0)
                .map(|k| v.get(i, k) * v.get(j, k).conj() * weights[k])
                .sum()
        });
        HermitianOperator::symmetrized(&m)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.rebuild_with(|l| l)
    }

    /// Max-abs deviation of `V†V` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = &self.eigenvectors;
        (&v.adjoint() * v).max_abs_diff(&SquareMatrix::identity(self.dim()))
    }
}

/// Checks Hermiticity of a raw matrix, then diagonalizes it.
pub fn hermitian_eig_checked(m: &SquareMatrix) -> Result<Spectrum> {
    Ok(hermitian_eig(&HermitianOperator::new(m.clone())?))
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is phase-fixed so that its
/// first component with modulus above `1e-10` is real and positive.
pub fn hermitian_eig(h: &HermitianOperator) -> Spectrum {
    let n = h.dim();
    let mut a = h.matrix.entries.clone();
    let mut v = SquareMatrix::identity(n).entries;
    let scale = h.matrix.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].re.total_cmp(&a[y * n + y].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
    let mut columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    for col in &mut columns {
        fix_phase(col);
    }
    let eigenvectors = SquareMatrix::from_fn(n, |i, j| columns[j][i]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating the `(p, q)` entry: `A ← V† A V`, `W ← W V`.
fn rotate(a: &mut [Complex64], w: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cos = 1.0 / (1.0 + t * t).sqrt();
    let sin = t * cos;

    // V restricted to (p, q) = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let vpp = re(cos);
    let vpq = re(sin);
    let vqp = -phase.conj() * sin;
    let vqq = phase.conj() * cos;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * vpp + akq * vqp;
        a[k * n + q] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = vpp.conj() * apk + vqp.conj() * aqk;
        a[q * n + k] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = re(a[p * n + p].re);
    a[q * n + q] = re(a[q * n + q].re);

    for k in 0..n {
        let wkp = w[k * n + p];
        let wkq = w[k * n + q];
        w[k * n + p] = wkp * vpp + wkq * vqp;
        w[k * n + q] = wkp * vpq + wkq * vqq;
    }
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > PHASE_COMPONENT_TOL) {
        let rotation = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rotation;
        }
    }
}

/// Scalar functions with a dedicated treatment of their singular points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFunction {
    Sqrt,
    InverseSqrt,
    Inverse,
}

impl MatrixFunction {
    fn has_pole(self) -> bool {
        matches!(self, MatrixFunction::InverseSqrt | MatrixFunction::Inverse)
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            MatrixFunction::Sqrt => x.max(0.0).sqrt(),
            MatrixFunction::InverseSqrt => 1.0 / x.sqrt(),
            MatrixFunction::Inverse => 1.0 / x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Eigenvalue floor for pole functions (and the negativity allowance for `Sqrt`).
    pub min_eig: f64,
    /// Apply pole functions on the support only, mapping the rest of the spectrum to zero.
    /// This departs from the invertible-source setting and must be requested explicitly.
    pub support_restricted: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            min_eig: DEFAULT_MIN_EIG,
            support_restricted: false,
        }
    }
}

/// `Σ_k f(λ_k) |v_k><v_k|` for one of the supported matrix functions.
pub fn spectral_map(
    h: &HermitianOperator,
    func: MatrixFunction,
    options: &SpectralOptions,
) -> Result<HermitianOperator> {
    let spectrum = hermitian_eig(h);
    spectral_map_from(&spectrum, func, options)
}

/// As [`spectral_map`], reusing an existing decomposition.
pub fn spectral_map_from(
    spectrum: &Spectrum,
    func: MatrixFunction,
    options: &SpectralOptions,
) -> Result<HermitianOperator> {
    let min = spectrum.eigenvalues[0];
    if func.has_pole() {
        if min < options.min_eig && !options.support_restricted {
            return Err(Error::SingularOperator {
                min_eigenvalue: min,
                floor: options.min_eig,
            });
        }
    } else if min < -options.min_eig {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(spectrum.rebuild_with(|l| {
        if func.has_pole() && l < options.min_eig {
            0.0
        } else {
            func.eval(l)
        }
    }))
}

/// Applies an arbitrary real function to the spectrum without any pole handling.
pub fn map_spectrum(h: &HermitianOperator, f: impl FnMut(f64) -> f64) -> HermitianOperator {
    hermitian_eig(h).rebuild_with(f)
}

pub fn sqrt(h: &HermitianOperator) -> Result<HermitianOperator> {
    spectral_map(h, MatrixFunction::Sqrt, &SpectralOptions::default())
}

pub fn inverse_sqrt(h: &HermitianOperator) -> Result<HermitianOperator> {
    spectral_map(h, MatrixFunction::InverseSqrt, &SpectralOptions::default())
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(h: &HermitianOperator, tol: f64) -> bool {
    h.min_eigenvalue() >= -tol
}
