//! Seeded random operators for property tests and the `verify` command.

use num_complex::Complex;
use rand::Rng;

use crate::qmat::{CMatrix, DensityMatrix};
use crate::scalar::Real;

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random_range(-1.0..1.0))
}

/// Matrix with independent entries whose real and imaginary parts are U(−1, 1).
pub fn random_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let data = (0..dim * dim).map(|_| Complex::new(uniform(rng), uniform(rng))).collect();
    CMatrix::from_row_major(dim, data).expect("supported dim")
}

/// Hermitian matrix with U(−1, 1) entries above the diagonal and a real diagonal.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(dim).expect("supported dim");
    for i in 0..dim {
        m.set(i, i, Complex::new(uniform(rng), T::zero()));
        for j in (i + 1)..dim {
            let z = Complex::new(uniform(rng), uniform(rng));
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

/// Full-rank (almost surely) mixed state G G† / tr(G G†).
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix<T> {
    let g: CMatrix<T> = random_matrix(rng, dim);
    let m = &g * &g.adjoint();
    let m = (&m + &m.adjoint()).scale_real(T::lit(0.5));
    DensityMatrix::from_unnormalized(m).expect("positive trace")
}

/// Random pure state.
pub fn random_pure<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix<T> {
    let v: Vec<Complex<T>> = (0..dim).map(|_| Complex::new(uniform(rng), uniform(rng))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let v: Vec<Complex<T>> = v.into_iter().map(|z| z / n).collect();
    DensityMatrix::pure(&v).expect("normalized ket")
}

/// Unitary from Gram–Schmidt orthonormalization of random columns.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    loop {
        let g: CMatrix<T> = random_matrix(rng, dim);
        let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
        let mut ok = true;
        for j in 0..dim {
            let mut v: Vec<Complex<T>> = (0..dim).map(|i| g.get(i, j)).collect();
            for u in &cols {
                let proj = u.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * *y);
                for (vk, uk) in v.iter_mut().zip(u) {
                    *vk = *vk - *uk * proj;
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if n < T::lit(1e-6) {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        if ok {
            let mut u = CMatrix::zeros(dim).expect("supported dim");
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    u.set(i, j, *z);
                }
            }
            return u;
        }
    }
}

/// Random probability vector of the given length.
pub fn random_distribution<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    let w: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| T::lit(x / total)).collect()
}
