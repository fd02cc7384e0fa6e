use num_complex::Complex;

use super::{cr, herm_eig, hermitian_eigenvalues_raw, CMatrix, EigenSystem, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A Hermitian operator (Hamiltonian or observable) in internal energy units.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let tol = T::tol(HERMITIAN_TOL) * T::one().max(matrix.max_abs());
        let err = matrix.hermiticity_error();
        if err > tol {
            return Err(Error::InvalidOperator(format!("operator is not Hermitian (‖M − M†‖ = {err:?})")));
        }
        Ok(Self { matrix })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Ok(Self { matrix: CMatrix::zeros(dim)? })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eig(&self) -> EigenSystem<T> {
        herm_eig(self)
    }

    /// U H U†
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u))
    }

    /// tr(ρ H)
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> T {
        rho.matrix().trace_product(&self.matrix).re
    }
}

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
}

/// Tolerance on trace and spectrum used to accept a density matrix.
pub const STATE_TOL: f64 = 1e-10;

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let tol = T::tol(STATE_TOL);
        if matrix.hermiticity_error() > tol {
            return Err(Error::InvalidOperator("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - cr(T::one())).norm() > tol {
            return Err(Error::InvalidOperator(format!("density matrix has trace {}", tr.re)));
        }
        let min = hermitian_eigenvalues_raw(matrix.dim(), matrix.as_slice())[0];
        if min < -tol {
            return Err(Error::InvalidOperator(format!("density matrix has negative eigenvalue {min}")));
        }
        Ok(Self { matrix })
    }

    /// Normalizes a nonzero positive operator to unit trace.
    pub fn from_unnormalized(matrix: CMatrix<T>) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > T::zero()) {
            return Err(Error::Argument("cannot normalize an operator with non-positive trace".into()));
        }
        Self::new(matrix.scale_real(T::one() / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = CMatrix::identity(dim)?;
        Ok(Self { matrix: m.scale_real(T::one() / T::lit(dim as f64)) })
    }

    /// |ψ⟩⟨ψ| for a normalized ket.
    pub fn pure(ket: &[Complex<T>]) -> Result<Self> {
        Self::new(CMatrix::projector(ket)?)
    }

    /// |i⟩⟨i| in the computational basis.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Argument(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut m = CMatrix::zeros(dim)?;
        m.set(index, index, cr(T::one()));
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues_raw(self.dim(), self.matrix.as_slice())
    }

    pub fn eig(&self) -> EigenSystem<T> {
        herm_eig(&HermitianOperator { matrix: self.matrix.clone() })
    }

    /// ⟨v|ρ|v⟩
    pub fn population(&self, v: &[Complex<T>]) -> T {
        let rv = self.matrix.apply(v);
        v.iter().zip(&rv).fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * *b).re
    }

    /// U ρ U†
    pub fn evolve(&self, u: &CMatrix<T>) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u))
    }

    pub fn distance_max(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }
}
