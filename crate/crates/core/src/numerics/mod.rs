//! Dense complex linear algebra used throughout the simulator.
//!
//! Matrices are stored row-major. All Hilbert spaces in this crate are at
//! most a few hundred dimensions, so nothing here tries to be clever about
//! cache blocking.

mod eigen;
mod sparse;

pub use eigen::{hermitian_eigen, kernel_basis, spectral_norm, HermitianEigen};
pub use sparse::SparseMatrix;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("vector must have dimension > 0".into()));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::ShapeMismatch("vector has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self { entries: vec![ZERO; dim] }
    }

    /// Unit vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<C64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&self, factor: C64) -> ComplexVector {
        Self { entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn normalized(&self) -> ComplexVector {
        let n = self.norm();
        self.scale(C64::from(1.0 / n))
    }

    /// `|self><other|`
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| self[i] * other[j].conj())
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.entries[i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("matrix dimensions must be positive".into()));
        }
        if rows * cols != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::ShapeMismatch("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows of real numbers; handy for small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| C64::from(x))).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// `|i><j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut data = vec![ZERO; r * c];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let row = i * other.rows + k;
                    for l in 0..other.cols {
                        data[row * c + j * other.cols + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Self { rows: r, cols: c, data }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data: out })
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::ShapeMismatch(format!(
                "cannot apply {}x{} matrix to vector of dimension {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let out = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// `Tr(self† other)`.
    pub fn frobenius_inner(&self, other: &ComplexMatrix) -> Result<C64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "Frobenius product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Largest entrywise deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Ok(worst)
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Submatrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Column-stacking vectorisation, `vec(A)[i + j*rows] = A[i, j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                v[i + j * self.rows] = self.get(i, j);
            }
        }
        v
    }

    pub fn from_column_stacked(rows: usize, cols: usize, v: &[C64]) -> Result<ComplexMatrix> {
        if v.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries cannot be unstacked into {rows}x{cols}", v.len())));
        }
        Ok(Self::from_fn(rows, cols, |i, j| v[i + j * rows]))
    }

    /// Approximate equality in max-abs norm.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    a.trace()
}

pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.frobenius_inner(b)
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

/// Single-qubit Pauli matrices `[I, X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_vec_unchecked(2, 2, vec![ZERO, ONE, ONE, ZERO]),
        ComplexMatrix::from_vec_unchecked(2, 2, vec![ZERO, -I, I, ZERO]),
        ComplexMatrix::from_vec_unchecked(2, 2, vec![ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Tensor power `a ⊗ a ⊗ ... ⊗ a` with `n >= 1` factors.
pub fn kron_power(a: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    (1..n).fold(a.clone(), |acc, _| acc.kron(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_z() -> ComplexMatrix {
        paulis()[3].clone()
    }

    #[test]
    fn kron_identities_and_shapes() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let zz = kron(&sigma_z(), &sigma_z());
        let expected = ComplexMatrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expected);

        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(3, 3);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
    }

    #[test]
    fn dagger_examples() {
        let ii = ComplexMatrix::identity(2).scale(I);
        assert_eq!(dagger(&ii), ComplexMatrix::identity(2).scale(-I));

        let ket0_bra1 = ComplexMatrix::unit(2, 0, 1);
        assert_eq!(dagger(&ket0_bra1), ComplexMatrix::unit(2, 1, 0));

        let a = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64 + 1.0));
        assert_eq!(dagger(&dagger(&a)), a);
    }

    #[test]
    fn trace_inner_matmul() {
        assert_eq!(trace(&ComplexMatrix::identity(4)).unwrap(), C64::from(4.0));
        let x = paulis()[1].clone();
        assert_eq!(frobenius_inner(&x, &x).unwrap(), C64::from(2.0));
        assert_eq!(matmul(&x, &x).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(trace(&a), Err(Error::NotSquare { .. })));
        assert!(matmul(&a, &a).is_err());
        assert!(frobenius_inner(&a, &ComplexMatrix::zeros(3, 2)).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVector::new(vec![]).is_err());
    }

    #[test]
    fn vectorize_is_column_stacking() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::from((10 * i + j) as f64));
        let v = a.vectorize();
        assert_eq!(v, vec![C64::from(0.0), C64::from(10.0), C64::from(1.0), C64::from(11.0)]);
        assert_eq!(ComplexMatrix::from_column_stacked(2, 2, &v).unwrap(), a);
    }
}
