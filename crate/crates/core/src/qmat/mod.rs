//! Dense complex matrices for one and two qubits.
//!
//! Two-qubit operators use the subsystem order (memory, system): the first
//! tensor factor is the demon's memory, the second the working system.

mod eigen;
mod state;

pub use eigen::{herm_eig, mat_func, EigenSystem};
pub use state::{DensityMatrix, HermitianOperator};

pub(crate) use eigen::hermitian_eigenvalues_raw;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Tolerance used for Hermiticity checks on operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = cr(T::one());
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries. Rejects unsupported dimensions and
    /// non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::Argument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("matrix has non-finite entries".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = cr(d);
        }
        Ok(m)
    }

    /// Rank-one operator |v⟩⟨v|.
    pub fn projector(v: &[Complex<T>]) -> Result<Self> {
        Self::outer(v, v)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Argument("outer product of vectors with different lengths".into()));
        }
        let mut m = Self::zeros(a.len())?;
        let n = m.dim;
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = a[i] * b[j].conj();
            }
        }
        Ok(m)
    }

    pub fn pauli_x() -> Self {
        Self { dim: 2, data: vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)] }
    }

    pub fn pauli_y() -> Self {
        Self { dim: 2, data: vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)] }
    }

    pub fn pauli_z() -> Self {
        Self { dim: 2, data: vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)] }
    }

    /// exp(-i θ/2 σ_axis) for axis ∈ {x, y, z} given as a Pauli matrix.
    pub fn rotation(pauli: &Self, theta: T) -> Self {
        let half = theta / T::lit(2.0);
        let id = Self::identity(2).expect("dim 2");
        &id.scale_real(half.cos()) + &pauli.scale(Complex::new(T::zero(), -half.sin()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(cr(T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn map_entries(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// max |A_ij − B_ij|; `+∞` when dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.dim != other.dim {
            return T::infinity();
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    }

    /// ‖M − M†‖_max
    pub fn hermiticity_error(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_error() <= tol
    }

    /// ‖U†U − 𝟙‖_max
    pub fn unitarity_error(&self) -> T {
        let id = Self::identity(self.dim).expect("valid dim");
        (&self.adjoint() * self).max_abs_diff(&id)
    }

    /// U A U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// A B − B A
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        let n = self.dim;
        let mut acc = cr(T::zero());
        for i in 0..n {
            for k in 0..n {
                acc = acc + self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).fold(cr(T::zero()), |a, b| a + b)).collect()
    }

    /// The 2×2 block of a two-qubit operator addressed by memory indices
    /// `(row, col)`: ⟨row|_mem M |col⟩_mem.
    pub fn memory_block(&self, row: usize, col: usize) -> Result<Self> {
        if self.dim != 4 || row > 1 || col > 1 {
            return Err(Error::Argument("memory block requires a 4x4 matrix and indices in {0,1}".into()));
        }
        let mut out = Self::zeros(2)?;
        for i in 0..2 {
            for j in 0..2 {
                out.set(i, j, self.get(2 * row + i, 2 * col + j));
            }
        }
        Ok(out)
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = &self.data[i * self.dim + j];
                    format!("({:?}, {:?})", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<'a, T: Real> Mul<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut data = vec![cr(T::zero()); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] = data[i * n + j] + a * rhs.data[k * n + j];
                }
            }
        }
        CMatrix { dim: n, data }
    }
}

impl<T: Real> Mul for CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self * &rhs
    }
}

impl<'a, T: Real> Add<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Real> Add for CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self + &rhs
    }
}

impl<'a, T: Real> Sub<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

impl<T: Real> Sub for CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self - &rhs
    }
}

/// Kronecker product A ⊗ B.
pub fn tensor<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.dim * b.dim;
    if n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut out = CMatrix::zeros(n)?;
    let (na, nb) = (a.dim, b.dim);
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            for k in 0..nb {
                for l in 0..nb {
                    out.set(i * nb + k, j * nb + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Tensor factor of a two-qubit operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// First factor: the demon's memory.
    Memory,
    /// Second factor: the working system.
    System,
}

impl TryFrom<usize> for Subsystem {
    type Error = Error;

    fn try_from(id: usize) -> Result<Self> {
        match id {
            0 => Ok(Subsystem::Memory),
            1 => Ok(Subsystem::System),
            other => Err(Error::Argument(format!("subsystem id {other} is not 0 (memory) or 1 (system)"))),
        }
    }
}

/// Reduced operator on `keep`, tracing out the other qubit.
pub fn partial_trace<T: Real>(m: &CMatrix<T>, keep: Subsystem) -> Result<CMatrix<T>> {
    if m.dim != 4 {
        return Err(Error::Argument(format!("partial trace needs a 4x4 operator, got {}x{}", m.dim, m.dim)));
    }
    let mut out = CMatrix::zeros(2)?;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = cr(T::zero());
            for t in 0..2 {
                acc = acc
                    + match keep {
                        Subsystem::Memory => m.get(2 * i + t, 2 * j + t),
                        Subsystem::System => m.get(2 * t + i, 2 * t + j),
                    };
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Trace norm ‖M‖₁: sum of absolute eigenvalues for Hermitian input, sum of
/// singular values otherwise.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    trace_norm_raw(m.dim, &m.data)
}

pub(crate) fn trace_norm_raw<T: Real>(n: usize, data: &[Complex<T>]) -> T {
    let scale = data.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if scale == T::zero() {
        return T::zero();
    }
    let herm_err = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (data[i * n + j] - data[j * n + i].conj()).norm())
        .fold(T::zero(), T::max);
    if herm_err <= T::tol(HERMITIAN_TOL) * (T::one() + scale) {
        hermitian_eigenvalues_raw(n, data).into_iter().map(|x| x.abs()).sum()
    } else {
        // singular values = sqrt(eig(M†M))
        let mut gram = vec![cr(T::zero()); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = cr(T::zero());
                for k in 0..n {
                    acc = acc + data[k * n + i].conj() * data[k * n + j];
                }
                gram[i * n + j] = acc;
            }
        }
        hermitian_eigenvalues_raw(n, &gram).into_iter().map(|x| x.max(T::zero()).sqrt()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_density, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = CMatrix<f64>;

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(matches!(M::zeros(3), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(M::zeros(8), Err(Error::UnsupportedDimension(8))));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let data = vec![c(f64::NAN, 0.), c(0., 0.), c(0., 0.), c(1., 0.)];
        assert!(matches!(M::from_row_major(2, data), Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (M::pauli_x(), M::pauli_y(), M::pauli_z());
        let i = c::<f64>(0., 1.);
        assert!((&x * &y).max_abs_diff(&z.scale(i)) < 1e-15);
        assert!((&x * &x).max_abs_diff(&M::identity(2).unwrap()) < 1e-15);
    }

    #[test]
    fn rotation_matches_closed_form() {
        let theta = 0.7_f64;
        let r = M::rotation(&M::pauli_y(), theta);
        let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let expected = M::from_row_major(2, vec![c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)]).unwrap();
        assert!(r.max_abs_diff(&expected) < 1e-15);
        assert!(r.unitarity_error() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let id2 = M::identity(2).unwrap();
        assert!(tensor(&id2, &id2).unwrap().max_abs_diff(&M::identity(4).unwrap()) < 1e-15);
        let zz = tensor(&M::pauli_z(), &M::pauli_z()).unwrap();
        let expected = M::from_real_diagonal(&[1., -1., -1., 1.]).unwrap();
        assert!(zz.max_abs_diff(&expected) < 1e-15);
        let id4 = M::identity(4).unwrap();
        assert!(matches!(tensor(&id4, &id2), Err(Error::UnsupportedDimension(8))));
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_hermitian::<f64, _>(&mut rng, 2);
            let b = random_hermitian::<f64, _>(&mut rng, 2);
            let lhs = tensor(&a, &b).unwrap().trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a = random_density::<f64, _>(&mut rng, 2);
            let b = random_density::<f64, _>(&mut rng, 2);
            let ab = tensor(a.matrix(), b.matrix()).unwrap();
            let ra = partial_trace(&ab, Subsystem::Memory).unwrap();
            let rb = partial_trace(&ab, Subsystem::System).unwrap();
            assert!(ra.max_abs_diff(a.matrix()) < 1e-12);
            assert!(rb.max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)];
        let bell = M::projector(&phi).unwrap();
        let half = M::identity(2).unwrap().scale_real(0.5);
        for keep in [Subsystem::Memory, Subsystem::System] {
            assert!(partial_trace(&bell, keep).unwrap().max_abs_diff(&half) < 1e-15);
        }
        let mixed = M::identity(4).unwrap().scale_real(0.25);
        assert!(partial_trace(&mixed, Subsystem::Memory).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_argument_errors() {
        assert!(matches!(Subsystem::try_from(2), Err(Error::Argument(_))));
        assert!(matches!(partial_trace(&M::identity(2).unwrap(), Subsystem::Memory), Err(Error::Argument(_))));
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&M::zeros(2).unwrap()), 0.0);
        assert!((trace_norm(&M::pauli_z()) - 2.0).abs() < 1e-14);
        // non-Hermitian: |0⟩⟨1| has one singular value 1
        let e01 = M::from_row_major(2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!((trace_norm(&e01) - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = random_density::<f64, _>(&mut rng, 4);
        assert!(trace_norm(&(r.matrix() - r.matrix())) < 1e-15);
    }

    #[test]
    fn trace_norm_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [2, 4] {
            for _ in 0..300 {
                let a = random_hermitian::<f64, _>(&mut rng, dim);
                let b = random_hermitian::<f64, _>(&mut rng, dim);
                let ab = &a + &b;
                assert!(trace_norm(&ab) <= trace_norm(&a) + trace_norm(&b) + 1e-10);
            }
        }
    }

    #[test]
    fn memory_block_extracts_conditional_operator() {
        let k0 = M::from_real_diagonal(&[1., 0.]).unwrap();
        let m = tensor(&k0, &M::pauli_x()).unwrap();
        assert!(m.memory_block(0, 0).unwrap().max_abs_diff(&M::pauli_x()) < 1e-15);
        assert!(m.memory_block(1, 1).unwrap().max_abs() < 1e-15);
    }
}
