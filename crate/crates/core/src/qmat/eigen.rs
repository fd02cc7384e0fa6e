//! Hermitian eigendecomposition: closed form for 2×2, cyclic complex Jacobi otherwise.

use num_complex::Complex;

use super::{cr, CMatrix, HermitianOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition with ascending eigenvalues and orthonormal eigenvectors.
///
/// Eigenvectors are canonicalized so that results are reproducible: inside a
/// degenerate eigenspace the basis is rebuilt by Gram–Schmidt on the projected
/// standard basis vectors, and every vector is rephased so that its first
/// non-negligible component is real and positive.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    eigenvalues: Vec<T>,
    eigenvectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> EigenSystem<T> {
    /// Validates and wraps a basis with attached eigenvalues.
    pub fn from_basis(eigenvalues: Vec<T>, eigenvectors: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = eigenvectors.len();
        if eigenvalues.len() != n || eigenvectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidBasis("basis must contain `dim` vectors of length `dim`".into()));
        }
        if n != 2 && n != 4 {
            return Err(Error::UnsupportedDimension(n));
        }
        let tol = T::tol(1e-10);
        for i in 0..n {
            for j in 0..n {
                let ip = inner(&eigenvectors[i], &eigenvectors[j]);
                let expected = if i == j { T::one() } else { T::zero() };
                if (ip - cr(expected)).norm() > tol {
                    return Err(Error::InvalidBasis(format!("vectors {i} and {j} are not orthonormal")));
                }
            }
        }
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<Complex<T>>] {
        &self.eigenvectors
    }

    /// Rank-one eigenprojectors |v_i⟩⟨v_i| in eigenvalue order.
    pub fn projectors(&self) -> Vec<CMatrix<T>> {
        self.eigenvectors.iter().map(|v| CMatrix::projector(v).expect("supported dim")).collect()
    }

    /// Σ f(λ_i) |v_i⟩⟨v_i|
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.dim();
        let mut out = CMatrix::zeros(n).expect("supported dim");
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + v[i] * v[j].conj() * w);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.reconstruct_with(|x| x)
    }

    /// ‖V†V − 𝟙‖_max
    pub fn orthonormality_error(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { T::one() } else { T::zero() };
                let d = (inner(&self.eigenvectors[i], &self.eigenvectors[j]) - cr(expected)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(cr(T::zero()), |acc, (x, y)| acc + x.conj() * *y)
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Eigendecomposition of a Hermitian operator.
pub fn herm_eig<T: Real>(m: &HermitianOperator<T>) -> EigenSystem<T> {
    let n = m.dim();
    let (values, vectors) = jacobi_hermitian(n, m.matrix().as_slice());
    EigenSystem { eigenvalues: values, eigenvectors: vectors }
}

/// f(M) = V f(Λ) V† for Hermitian M.
pub fn mat_func<T: Real>(m: &HermitianOperator<T>, f: impl Fn(T) -> T) -> Result<CMatrix<T>> {
    let eig = herm_eig(m);
    for &lambda in eig.eigenvalues() {
        if !f(lambda).is_finite() {
            return Err(Error::Domain(lambda.to_f64_lossy()));
        }
    }
    let out = eig.reconstruct_with(f);
    // remove rounding-level anti-Hermitian residue
    Ok((&out + &out.adjoint()).scale_real(T::lit(0.5)))
}

/// Ascending eigenvalues of a Hermitian matrix of any small size.
pub(crate) fn hermitian_eigenvalues_raw<T: Real>(n: usize, data: &[Complex<T>]) -> Vec<T> {
    if n == 2 {
        let (values, _) = eig2(data);
        return values;
    }
    let (values, _) = jacobi_core(n, data, false);
    let mut values = values;
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    values
}

/// Full decomposition with canonical eigenvectors (columns returned as vectors).
pub(crate) fn jacobi_hermitian<T: Real>(n: usize, data: &[Complex<T>]) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let (values, vectors) = if n == 2 {
        eig2(data)
    } else {
        let (values, v) = jacobi_core(n, data, true);
        let columns: Vec<Vec<Complex<T>>> = (0..n).map(|j| (0..n).map(|i| v[i * n + j]).collect()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
        (order.iter().map(|&i| values[i]).collect(), order.iter().map(|&i| columns[i].clone()).collect())
    };
    canonicalize(values, vectors, data)
}

/// Closed-form 2×2 Hermitian eigensolver.
fn eig2<T: Real>(a: &[Complex<T>]) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let (p, d) = (a[0].re, a[3].re);
    let b = a[1];
    let two = T::lit(2.0);
    let mean = (p + d) / two;
    let half_gap = (p - d) / two;
    let r = (half_gap * half_gap + b.norm_sqr()).sqrt();
    let values = vec![mean - r, mean + r];
    let zero = cr(T::zero());
    let one = cr(T::one());
    let scale = p.abs().max(d.abs()).max(b.norm()).max(T::min_positive_value());
    if b.norm() <= T::epsilon() * scale {
        let vectors =
            if p <= d { vec![vec![one, zero], vec![zero, one]] } else { vec![vec![zero, one], vec![one, zero]] };
        return (values, vectors);
    }
    let vectors = values
        .iter()
        .map(|&lambda| {
            let v1 = [b, cr(lambda - p)];
            let v2 = [cr(lambda - d), b.conj()];
            let v = if norm(&v1) >= norm(&v2) { v1 } else { v2 };
            let nv = norm(&v);
            vec![v[0] / nv, v[1] / nv]
        })
        .collect();
    (values, vectors)
}

/// Cyclic complex Jacobi. Returns diagonal (unsorted) and, when requested, the
/// accumulated unitary in row-major order.
fn jacobi_core<T: Real>(n: usize, data: &[Complex<T>], want_vectors: bool) -> (Vec<T>, Vec<Complex<T>>) {
    let mut a = data.to_vec();
    // enforce exact Hermiticity of the working copy
    for i in 0..n {
        a[i * n + i] = cr(a[i * n + i].re);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * T::lit(0.5);
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = vec![cr(T::zero()); n * n];
    if want_vectors {
        for i in 0..n {
            v[i * n + i] = cr(T::one());
        }
    }
    let frob = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if frob == T::zero() {
        return (vec![T::zero(); n], v);
    }
    let target = T::epsilon() * frob;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let ag = g.norm();
                if ag <= T::min_positive_value() {
                    continue;
                }
                let e = g / ag;
                let theta = (a[q * n + q].re - a[p * n + p].re) / (T::lit(2.0) * ag);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let cth = T::one() / (t * t + T::one()).sqrt();
                let s = t * cth;
                let jpq = e * s; // J[p][q]
                let jqp = -(e.conj() * s); // J[q][p]
                                           // A ← A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * cth + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * cth;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * cth + aqk * jqp.conj();
                    a[q * n + k] = apk * jpq.conj() + aqk * cth;
                }
                a[p * n + q] = cr(T::zero());
                a[q * n + p] = cr(T::zero());
                a[p * n + p] = cr(a[p * n + p].re);
                a[q * n + q] = cr(a[q * n + q].re);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * cth + vkq * jqp;
                        v[k * n + q] = vkp * jpq + vkq * cth;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i].re).collect(), v)
}

/// Deterministic eigenvector gauge: rebuild degenerate eigenspaces from the
/// projected standard basis, then make the leading component real positive.
fn canonicalize<T: Real>(
    values: Vec<T>,
    mut vectors: Vec<Vec<Complex<T>>>,
    data: &[Complex<T>],
) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let n = values.len();
    let scale = data.iter().map(|z| z.norm()).fold(T::one(), T::max);
    let degeneracy_tol = T::tol(1e-10) * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[end - 1]).abs() <= degeneracy_tol {
            end += 1;
        }
        if end - start > 1 {
            let cluster = &vectors[start..end];
            let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(end - start);
            for i in 0..n {
                if basis.len() == end - start {
                    break;
                }
                // P e_i
                let mut w: Vec<Complex<T>> = vec![cr(T::zero()); n];
                for u in cluster {
                    let coeff = u[i].conj();
                    for (wk, uk) in w.iter_mut().zip(u) {
                        *wk = *wk + *uk * coeff;
                    }
                }
                for b in &basis {
                    let proj = inner(b, &w);
                    for (wk, bk) in w.iter_mut().zip(b) {
                        *wk = *wk - *bk * proj;
                    }
                }
                let nw = norm(&w);
                if nw > T::lit(1e-6).max(T::epsilon().sqrt()) {
                    basis.push(w.into_iter().map(|z| z / nw).collect());
                }
            }
            if basis.len() == end - start {
                vectors.splice(start..end, basis);
            }
        }
        start = end;
    }
    let phase_tol = T::tol(1e-12);
    for v in vectors.iter_mut() {
        if let Some(lead) = v.iter().copied().find(|z| z.norm() > phase_tol) {
            let phase = lead.conj() / lead.norm();
            for z in v.iter_mut() {
                *z = *z * phase;
            }
        }
    }
    (values, vectors)
}
