use nalgebra::{DMatrix, DVector};

use super::sparse::{SparseMatrix, C64};
use crate::error::DomainError;

/// Dense density matrix ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a square matrix without checking physicality; see [`Self::validate`].
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self, DomainError> {
        if !matrix.is_square() {
            return Err(DomainError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(DensityMatrix { matrix })
    }

    /// |ψ⟩⟨ψ| for a normalised copy of ψ.
    pub fn pure(psi: &[C64]) -> Self {
        let v = DVector::from_column_slice(psi);
        let v = &v / C64::new(v.norm(), 0.0);
        DensityMatrix {
            matrix: &v * v.adjoint(),
        }
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        DensityMatrix { matrix: m }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        }
    }

    /// Inverse of [`Self::to_vec`]: column-stacked vector to matrix.
    pub fn from_vec(v: &[C64]) -> Result<Self, DomainError> {
        let d = (v.len() as f64).sqrt().round() as usize;
        if d * d != v.len() {
            return Err(DomainError::DimensionMismatch {
                expected: d * d,
                got: v.len(),
            });
        }
        Ok(DensityMatrix {
            matrix: DMatrix::from_column_slice(d, d, v),
        })
    }

    /// Column-stacked vec(ρ); element (i, j) sits at i + d·j.
    pub fn to_vec(&self) -> Vec<C64> {
        self.matrix.as_slice().to_vec()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// (ρ + ρ†)/2 rescaled to unit trace.
    pub fn hermitized_normalized(&self) -> Self {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let tr = h.trace().re;
        DensityMatrix {
            matrix: h / C64::new(tr, 0.0),
        }
    }

    /// (ρ + ρ†)/2 without touching the trace.
    pub fn hermitized_unnormalized(&self) -> Self {
        DensityMatrix {
            matrix: (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// tr(ρ O) for a sparse operator.
    pub fn expectation(&self, op: &SparseMatrix) -> C64 {
        op.iter().map(|(i, j, v)| v * self.matrix[(j, i)]).sum()
    }

    /// Population ⟨k|ρ|k⟩.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    /// ½ Σ |λ_i(ρ - σ)|.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let h = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
        0.5 * h
            .symmetric_eigenvalues()
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    }

    /// Checks the Hermitian, unit-trace and (optionally) positivity invariants.
    pub fn validate(&self, tol: f64, check_positive: bool) -> Result<(), DomainError> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(DomainError::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(DomainError::InvalidParameter {
                name: "trace",
                value: tr.re,
                reason: "density matrix must have unit trace",
            });
        }
        if check_positive {
            let min = self.min_eigenvalue();
            if min < -1e-8 {
                return Err(DomainError::InvalidParameter {
                    name: "min_eigenvalue",
                    value: min,
                    reason: "density matrix must be positive semidefinite",
                });
            }
        }
        Ok(())
    }
}
