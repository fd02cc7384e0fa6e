//! Process (χ) matrices in the operator basis Ξ = (𝟙, iσx, iσy, iσz) per qubit.
//!
//! Rows index the left operator Ξ_s and columns the right operator Ξ_l† in
//! Λ(ρ) = Σ_{s,l} χ_{s,l} Ξ_s ρ Ξ_l†. The trace distance between two χ matrices
//! is unchanged by a global transpose, so the row/column choice does not affect δ.

use std::fmt::Write as _;

use num_complex::Complex;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::qmat::{c, cr, tensor, trace_norm_raw, CMatrix, HERMITIAN_TOL};
use crate::scalar::Real;

/// Tolerance on the trace-preservation constraint Σ χ_{sl} Ξ_l†Ξ_s = 𝟙.
pub const CHI_TP_TOL: f64 = 1e-8;

/// Single-qubit operator basis (𝟙, iσx, iσy, iσz).
pub fn xi_basis_qubit<T: Real>() -> [CMatrix<T>; 4] {
    let i = c::<T>(0.0, 1.0);
    [
        CMatrix::identity(2).expect("dim 2"),
        CMatrix::pauli_x().scale(i),
        CMatrix::pauli_y().scale(i),
        CMatrix::pauli_z().scale(i),
    ]
}

/// Ξ basis for one or two qubits; for two qubits element 4s + t is Ξ_s ⊗ Ξ_t
/// with the memory first.
pub fn xi_basis<T: Real>(qubits: usize) -> Result<Vec<CMatrix<T>>> {
    let single = xi_basis_qubit::<T>();
    match qubits {
        1 => Ok(single.to_vec()),
        2 => {
            let mut out = Vec::with_capacity(16);
            for a in &single {
                for b in &single {
                    out.push(tensor(a, b)?);
                }
            }
            Ok(out)
        }
        other => Err(Error::Argument(format!("χ matrices support 1 or 2 qubits, got {other}"))),
    }
}

/// Process matrix of a one- or two-qubit map.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix<T> {
    qubits: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ChiMatrix<T> {
    /// Linear-inversion tomography of an arbitrary linear map on operators of
    /// dimension 2 (one qubit) or 4 (two qubits):
    /// χ_{sl} = d⁻² Σ_{ij} ⟨i| Ξ_s† Λ(|i⟩⟨j|) Ξ_l |j⟩.
    pub fn from_linear_map(dim: usize, map: impl Fn(&CMatrix<T>) -> Result<CMatrix<T>>) -> Result<Self> {
        let qubits = match dim {
            2 => 1,
            4 => 2,
            other => return Err(Error::UnsupportedDimension(other)),
        };
        let basis = xi_basis::<T>(qubits)?;
        let n = basis.len();
        let mut images = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut e = CMatrix::zeros(dim)?;
                e.set(i, j, cr(T::one()));
                images.push(map(&e)?);
            }
        }
        let adjoints: Vec<CMatrix<T>> = basis.iter().map(CMatrix::adjoint).collect();
        let norm = T::one() / T::lit((dim * dim) as f64);
        let mut data = vec![cr(T::zero()); n * n];
        for s in 0..n {
            let left: Vec<CMatrix<T>> = images.iter().map(|img| &adjoints[s] * img).collect();
            for l in 0..n {
                let mut acc = cr(T::zero());
                for i in 0..dim {
                    for j in 0..dim {
                        // (Ξ_s† Λ(E_ij) Ξ_l)_{ij}
                        let row = &left[i * dim + j];
                        let mut entry = cr(T::zero());
                        for k in 0..dim {
                            entry = entry + row.get(i, k) * basis[l].get(k, j);
                        }
                        acc = acc + entry;
                    }
                }
                data[s * n + l] = acc * norm;
            }
        }
        let chi = Self { qubits, data };
        chi.validate()?;
        Ok(chi)
    }

    /// Wraps raw entries (row-major, side 4 or 16) after validation.
    pub fn from_entries(side: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let qubits = match side {
            4 => 1,
            16 => 2,
            other => return Err(Error::Argument(format!("χ side must be 4 or 16, got {other}"))),
        };
        if data.len() != side * side {
            return Err(Error::Argument("χ entry count does not match its side".into()));
        }
        let chi = Self { qubits, data };
        chi.validate()?;
        Ok(chi)
    }

    fn validate(&self) -> Result<()> {
        let scale = T::one().max(self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max));
        if self.hermiticity_error() > T::tol(HERMITIAN_TOL) * T::lit(100.0) * scale {
            return Err(Error::InvalidOperator("χ matrix is not Hermitian".into()));
        }
        let tp = self.trace_preservation_error()?;
        if tp > T::tol(CHI_TP_TOL) {
            return Err(Error::InvalidOperator(format!("χ matrix violates trace preservation by {tp:?}")));
        }
        Ok(())
    }

    /// Number of basis operators (4 or 16).
    pub fn side(&self) -> usize {
        if self.qubits == 1 {
            4
        } else {
            16
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Hilbert-space dimension the represented map acts on.
    pub fn hilbert_dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn get(&self, s: usize, l: usize) -> Complex<T> {
        self.data[s * self.side() + l]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn max_imag(&self) -> T {
        self.data.iter().map(|z| z.im.abs()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.qubits != other.qubits {
            return T::infinity();
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    }

    pub fn hermiticity_error(&self) -> T {
        let n = self.side();
        let mut worst = T::zero();
        for s in 0..n {
            for l in 0..n {
                worst = worst.max((self.data[s * n + l] - self.data[l * n + s].conj()).norm());
            }
        }
        worst
    }

    /// ‖Σ χ_{sl} Ξ_l†Ξ_s − 𝟙‖_max
    pub fn trace_preservation_error(&self) -> Result<T> {
        let basis = xi_basis::<T>(self.qubits)?;
        let d = self.hilbert_dim();
        let n = self.side();
        let mut acc = CMatrix::zeros(d)?;
        for s in 0..n {
            for l in 0..n {
                let z = self.data[s * n + l];
                if z.norm() == T::zero() {
                    continue;
                }
                acc = &acc + &(&basis[l].adjoint() * &basis[s]).scale(z);
            }
        }
        Ok(acc.max_abs_diff(&CMatrix::identity(d)?))
    }

    /// Σ χ_{sl} Ξ_s X Ξ_l†
    pub fn apply_operator(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        let d = self.hilbert_dim();
        if x.dim() != d {
            return Err(Error::Argument(format!("χ acts on dim {d}, operator has dim {}", x.dim())));
        }
        let basis = xi_basis::<T>(self.qubits)?;
        let n = self.side();
        let mut acc = CMatrix::zeros(d)?;
        for s in 0..n {
            let left = &basis[s] * x;
            for l in 0..n {
                let z = self.data[s * n + l];
                if z.norm() == T::zero() {
                    continue;
                }
                acc = &acc + &(&left * &basis[l].adjoint()).scale(z);
            }
        }
        Ok(acc)
    }

    /// Plain-text form: `dim=<side>` then one row per line of space-separated
    /// `re,im` pairs.
    pub fn to_text(&self) -> String {
        let n = self.side();
        let mut out = format!("dim={n}\n");
        for s in 0..n {
            let row: Vec<String> = (0..n)
                .map(|l| {
                    let z = self.data[s * n + l];
                    format!("{},{}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Argument("empty χ file".into()))?;
        let side: usize = header
            .trim()
            .strip_prefix("dim=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Argument(format!("bad χ header `{header}`")))?;
        let mut data = Vec::with_capacity(side * side);
        for line in lines {
            for pair in line.split_whitespace() {
                let (re, im) = pair.split_once(',').ok_or_else(|| Error::Argument(format!("bad χ entry `{pair}`")))?;
                let parse =
                    |s: &str| s.parse::<f64>().map(T::lit).map_err(|_| Error::Argument(format!("bad number `{s}`")));
                data.push(Complex::new(parse(re)?, parse(im)?));
            }
        }
        Self::from_entries(side, data)
    }
}

/// χ matrix of a Kraus channel on one or two qubits.
pub fn channel_to_chi<T: Real>(ch: &KrausChannel<T>) -> Result<ChiMatrix<T>> {
    ChiMatrix::from_linear_map(ch.dim(), |x| ch.apply_operator(x))
}

/// Process trace distance δ = ½ ‖χ_a − χ_b‖₁.
pub fn process_distance<T: Real>(a: &ChiMatrix<T>, b: &ChiMatrix<T>) -> Result<T> {
    if a.qubits != b.qubits {
        return Err(Error::Argument(format!("cannot compare χ matrices of {} and {} qubits", a.qubits, b.qubits)));
    }
    let diff: Vec<Complex<T>> = a.data.iter().zip(&b.data).map(|(x, y)| *x - *y).collect();
    Ok(trace_norm_raw(a.side(), &diff) / T::lit(2.0))
}
