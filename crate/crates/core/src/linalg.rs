//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::C64;

pub(crate) type CMatrix = DMatrix<C64>;

/// Eigenpairs of a Hermitian matrix. Eigenvalues in ascending order.
pub(crate) struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub(crate) fn hermitian_eigen(m: &CMatrix) -> Eigen {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Eigen { values, vectors }
}

impl Eigen {
    /// `V diag(phi(lambda)) V^*`.
    pub fn map<F: Fn(f64) -> f64>(&self, phi: F) -> Result<CMatrix> {
        let mapped = self.mapped_values(phi)?;
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, s) in mapped.iter().enumerate() {
            for r in 0..n {
                scaled[(r, c)] *= *s;
            }
        }
        Ok(&scaled * self.vectors.adjoint())
    }

    /// `V diag(phi(lambda)) V^* x` without forming the matrix.
    pub fn apply<F: Fn(f64) -> f64>(&self, phi: F, x: &DVector<C64>) -> Result<DVector<C64>> {
        let mapped = self.mapped_values(phi)?;
        let mut y = self.vectors.adjoint() * x;
        for (yi, s) in y.iter_mut().zip(&mapped) {
            *yi *= *s;
        }
        Ok(&self.vectors * y)
    }

    fn mapped_values<F: Fn(f64) -> f64>(&self, phi: F) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&v| {
                let y = phi(v);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::Undefined { at: v })
                }
            })
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Largest absolute eigenvalue of the Hermitian part of `m`.
pub(crate) fn hermitian_spectral_norm(m: &CMatrix) -> f64 {
    let e = hermitian_eigen(m);
    e.min().abs().max(e.max().abs())
}

pub(crate) fn to_vector(s: &Signal) -> DVector<C64> {
    DVector::from_column_slice(s.as_slice())
}

pub(crate) fn to_signal(v: &DVector<C64>) -> Signal {
    Signal::new(v.iter().copied().collect())
}

/// `max |m_ij - conj(m_ji)|`.
pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
