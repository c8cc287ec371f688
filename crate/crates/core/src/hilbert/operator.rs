//! Dense operators and normalized kets.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::HilbertError;
use crate::tolerance;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest entry modulus of a matrix (the max-entry norm).
pub fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Square complex matrix acting on a finite Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self, HilbertError> {
        if mat.nrows() != mat.ncols() {
            return Err(HilbertError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(HilbertError::Empty);
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        Ok(Operator { mat })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, HilbertError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(HilbertError::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat))
    }

    /// Real row-major entries; handy for literal matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, HilbertError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "identity of dimension zero");
        Operator {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero operator of dimension zero");
        Operator {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        assert!(!entries.is_empty(), "diagonal operator of dimension zero");
        Operator {
            mat: DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
        }
    }

    /// `|ket><bra|` for two vectors of equal length.
    pub fn outer(ket: &DVector<C64>, bra: &DVector<C64>) -> Self {
        Operator {
            mat: ket * bra.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Operator { mat: &self.mat * c }
    }

    /// Kronecker product with `self` as the outer (left) factor.
    pub fn kron(&self, other: &Operator) -> Self {
        Operator {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn max_entry(&self) -> f64 {
        max_entry(&self.mat)
    }

    fn check_dim(&self, other: usize) -> Result<(), HilbertError> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(HilbertError::DimensionMismatch {
                expected: self.dim(),
                found: other,
            })
        }
    }

    pub fn checked_mul(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        self.check_dim(rhs.dim())?;
        Ok(Operator {
            mat: &self.mat * &rhs.mat,
        })
    }

    pub fn checked_add(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        self.check_dim(rhs.dim())?;
        Ok(Operator {
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn checked_sub(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        self.check_dim(rhs.dim())?;
        Ok(Operator {
            mat: &self.mat - &rhs.mat,
        })
    }

    /// `AB - BA`.
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        self.checked_mul(rhs)?.checked_sub(&rhs.checked_mul(self)?)
    }

    /// Max-entry norm of `[self, rhs]`.
    pub fn commutation_defect(&self, rhs: &Operator) -> Result<f64, HilbertError> {
        Ok(self.commutator(rhs)?.max_entry())
    }

    pub fn commutes_with(&self, rhs: &Operator) -> Result<bool, HilbertError> {
        Ok(self.commutation_defect(rhs)? < tolerance::algebraic())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_entry(&(&self.mat - self.mat.adjoint()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < tolerance::algebraic()
    }

    /// Max-entry norm of `U†U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_entry(&(self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(n, n)))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < tolerance::algebraic()
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>, HilbertError> {
        self.check_dim(v.len())?;
        Ok(&self.mat * v)
    }

    pub fn apply_ket(&self, k: &Ket) -> Result<DVector<C64>, HilbertError> {
        self.apply(k.amplitudes())
    }

    /// `<k|self|k>`.
    pub fn expectation(&self, k: &Ket) -> Result<C64, HilbertError> {
        let v = self.apply_ket(k)?;
        Ok(k.amplitudes().dotc(&v))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn mul(self, rhs: &'a Operator) -> Operator {
        self.checked_mul(rhs).expect("operator dimensions differ")
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        self.checked_add(rhs).expect("operator dimensions differ")
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        self.checked_sub(rhs).expect("operator dimensions differ")
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        Operator { mat: -&self.mat }
    }
}

/// Kronecker product, left factor outermost: `|j,k> = |j> ⊗ |k>` has index
/// `j * dim(b) + k`.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
}

impl Ket {
    /// Normalizes `amps`; the zero vector is rejected.
    pub fn new(amps: Vec<C64>) -> Result<Self, HilbertError> {
        Self::from_vector(DVector::from_vec(amps))
    }

    pub fn from_vector(v: DVector<C64>) -> Result<Self, HilbertError> {
        if v.is_empty() {
            return Err(HilbertError::Empty);
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HilbertError::ZeroVector);
        }
        Ok(Ket {
            amps: v / C64::new(norm, 0.0),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self, HilbertError> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Ket { amps: v }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64, HilbertError> {
        if self.dim() != other.dim() {
            return Err(HilbertError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        Ket {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// Same ray, with the first amplitude of modulus above 1e-12 made real
    /// and positive.
    pub fn with_canonical_phase(&self) -> Ket {
        match self.amps.iter().find(|z| z.norm() > 1e-12) {
            Some(first) => {
                let phase = first.conj() / first.norm();
                Ket {
                    amps: &self.amps * phase,
                }
            }
            None => self.clone(),
        }
    }

    /// `|self><self|` as a plain operator.
    pub fn outer(&self) -> Operator {
        Operator::outer(&self.amps, &self.amps)
    }
}
