use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Shorthand for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Shape {
                rows: inner.nrows(),
                cols: inner.ncols(),
                entries: inner.len(),
            });
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Shape {
                rows,
                cols,
                entries: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from separate real and imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        let cols = re.first().map_or(0, Vec::len);
        if im.len() != rows {
            return Err(Error::Shape {
                rows,
                cols,
                entries: im.iter().map(Vec::len).sum(),
            });
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (r, i) in re.iter().zip(im) {
            if r.len() != cols || i.len() != cols {
                return Err(Error::Shape {
                    rows,
                    cols,
                    entries: re.iter().map(Vec::len).sum(),
                });
            }
            entries.extend(r.iter().zip(i).map(|(&a, &b)| c64(a, b)));
        }
        Self::from_row_major(rows, cols, &entries)
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c64(diag[i], 0.0)
            } else {
                Complex64::default()
            }
        }))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn outer(psi: &[Complex64]) -> Self {
        let d = psi.len();
        Self(DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj()))
    }

    /// Computational basis projector `|k⟩⟨k|` in dimension `d`.
    pub fn basis_projector(d: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(d, d);
        m[(k, k)] = c64(1.0, 0.0);
        Self(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let n = self.rows();
        let mut acc = Complex64::default();
        for i in 0..n {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    /// Kronecker product `A ⊗ B`, first factor outermost.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                if i != j {
                    acc += self.0[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Column `k` as a vector.
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.0.column(k).iter().copied().collect()
    }

    /// Real part of `⟨v_k| A |v_k⟩` for every column `v_k` of `basis`.
    pub fn diagonal_in(&self, basis: &Self) -> Vec<f64> {
        (0..basis.cols())
            .map(|k| {
                let v = basis.0.column(k);
                let av = &self.0 * v;
                v.iter().zip(av.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
            })
            .collect()
    }

    /// Real and imaginary parts as row lists.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].re).collect())
            .collect();
        let im = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].im).collect())
            .collect();
        (re, im)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}
