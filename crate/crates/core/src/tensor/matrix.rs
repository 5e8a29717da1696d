use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    /// Build from entries in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape {
                expected: "positive dimensions".into(),
                got: format!("{rows}x{cols}"),
            });
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", entries.len()),
            });
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Square diagonal matrix with the given real diagonal.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.0[(i, j)] = v;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Column-major view of the storage.
    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        self.0.as_mut_slice()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn scale_mut(&mut self, s: f64) {
        for z in self.0.iter_mut() {
            *z *= s;
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: f64) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b * s;
        }
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(self.0.kronecker(&other.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// `M == M*` entrywise within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// All off-diagonal entries are exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let (r, c) = self.shape();
        (0..c).all(|j| (0..r).all(|i| i == j || self.0[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal_entries().into_iter().sum()
    }

    /// Nonzero entries as `(row, col, value)`, column-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        let (r, c) = self.shape();
        let mut out = Vec::new();
        for j in 0..c {
            for i in 0..r {
                let z = self.0[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    out.push((i, j, z));
                }
            }
        }
        out
    }

    /// Real inner product `Re Σ conj(a_ij) b_ij`.
    pub fn real_inner(&self, other: &ComplexMatrix) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
    }

    fn check_same_shape(&self, other: &ComplexMatrix) {
        assert_eq!(self.shape(), other.shape(), "matrix shape mismatch");
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs);
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs);
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product shape mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Dense real order-`(n+1)` tensor with local dimension `d`, entries indexed
/// by `(i_0, …, i_n)` in lexicographic order (`i_0` most significant).
///
/// The type does not enforce nonnegativity; see [`NnTensor::is_nonnegative`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NnTensor {
    n: usize,
    d: usize,
    entries: Vec<f64>,
}

impl NnTensor {
    pub fn new(n: usize, d: usize, entries: Vec<f64>) -> Result<Self> {
        let len = Self::checked_len(n, d)?;
        if entries.len() != len {
            return Err(Error::Shape {
                expected: format!("{len} entries (d^(n+1) with n={n}, d={d})"),
                got: format!("{} entries", entries.len()),
            });
        }
        Ok(NnTensor { n, d, entries })
    }

    pub fn zeros(n: usize, d: usize) -> Result<Self> {
        let len = Self::checked_len(n, d)?;
        Ok(NnTensor { n, d, entries: vec![0.0; len] })
    }

    /// The elementary tensor `e_{idx_0} ⊗ … ⊗ e_{idx_n}`.
    pub fn basis(n: usize, d: usize, idx: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(n, d)?;
        let flat = t.flat_index(idx)?;
        t.entries[flat] = 1.0;
        Ok(t)
    }

    fn checked_len(n: usize, d: usize) -> Result<usize> {
        if d == 0 {
            return Err(Error::Shape { expected: "d >= 1".into(), got: "d = 0".into() });
        }
        d.checked_pow(n as u32 + 1).ok_or(Error::SizeCap {
            what: "tensor entries",
            required: u128::MAX,
            cap: usize::MAX as u128,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.n + 1 || idx.iter().any(|&i| i >= self.d) {
            return Err(Error::Shape {
                expected: format!("{} indices below {}", self.n + 1, self.d),
                got: format!("{idx:?}"),
            });
        }
        Ok(idx.iter().fold(0, |acc, &i| acc * self.d + i))
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.entries[self.flat_index(idx)?])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&x| x >= 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        NnTensor { n: self.n, d: self.d, entries: self.entries.iter().map(|x| x * s).collect() }
    }

    /// Matricization with `i_0` as row index and `(i_1, …, i_n)` as column index.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let rows = self.d;
        let cols = self.entries.len() / self.d;
        ComplexMatrix::from_fn(rows, cols, |i, j| Complex64::new(self.entries[i * cols + j], 0.0))
    }

    /// Inverse of [`NnTensor::to_matrix`]; imaginary parts must vanish.
    pub fn from_matrix(n: usize, d: usize, m: &ComplexMatrix) -> Result<Self> {
        let len = Self::checked_len(n, d)?;
        if m.rows() * m.cols() != len || m.rows() != d {
            return Err(Error::Shape {
                expected: format!("{d}x{}", len / d),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let entries = m.to_row_major();
        if let Some(z) = entries.iter().find(|z| z.im.abs() > 1e-12 * (1.0 + z.re.abs())) {
            return Err(Error::Domain(format!("tensor entries must be real, found {z}")));
        }
        Ok(NnTensor { n, d, entries: entries.iter().map(|z| z.re).collect() })
    }
}
