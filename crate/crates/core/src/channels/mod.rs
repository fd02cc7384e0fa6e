//! Quantum channels in Kraus form, projective instruments and process matrices.

mod chi;
mod instrument;

pub use chi::{channel_to_chi, process_distance, ChiMatrix};
pub use instrument::{measure_nonselective, projective_instrument, MeasurementInstrument, Outcome, BRANCH_PRUNE};

use crate::error::{Error, Result};
use crate::qmat::{cr, tensor, CMatrix, DensityMatrix, EigenSystem};
use crate::scalar::Real;

/// Tolerance on Σ Γ†Γ = 𝟙 and Σ ΓΓ† = 𝟙.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map Σ_j Γ_j ρ Γ_j†.
#[derive(Clone, Debug)]
pub struct KrausChannel<T> {
    kraus_ops: Vec<CMatrix<T>>,
    label: String,
    unital: bool,
}

impl<T: Real> KrausChannel<T> {
    /// Builds a channel, rejecting Kraus sets that are empty, mixed-dimension or
    /// not trace preserving. Unitality is detected, not required.
    pub fn new(kraus_ops: Vec<CMatrix<T>>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let dim = match kraus_ops.first() {
            Some(k) => k.dim(),
            None => return Err(Error::Argument(format!("channel `{label}` has no Kraus operators"))),
        };
        if kraus_ops.iter().any(|k| k.dim() != dim) {
            return Err(Error::Argument(format!("channel `{label}` mixes Kraus operator dimensions")));
        }
        let id = CMatrix::identity(dim)?;
        let tp_err = gram_sum(&kraus_ops, true).max_abs_diff(&id);
        if tp_err > T::tol(CHANNEL_TOL) {
            return Err(Error::InvalidOperator(format!(
                "channel `{label}` is not trace preserving (‖ΣΓ†Γ − 𝟙‖ = {tp_err:?})"
            )));
        }
        let unital = gram_sum(&kraus_ops, false).max_abs_diff(&id) <= T::tol(CHANNEL_TOL);
        Ok(Self { kraus_ops, label, unital })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMatrix::identity(dim)?], "identity")
    }

    /// Single-Kraus channel ρ ↦ U ρ U†.
    pub fn unitary(u: &CMatrix<T>) -> Result<Self> {
        let err = u.unitarity_error();
        if err > T::tol(CHANNEL_TOL) {
            return Err(Error::InvalidOperator(format!("operator is not unitary (‖U†U − 𝟙‖ = {err:?})")));
        }
        Self::new(vec![u.clone()], "unitary")
    }

    /// Full dephasing in an orthonormal basis: Kraus set {|v_i⟩⟨v_i|}.
    pub fn dephasing(basis: &EigenSystem<T>) -> Result<Self> {
        let checked = EigenSystem::from_basis(basis.eigenvalues().to_vec(), basis.eigenvectors().to_vec())?;
        Self::new(checked.projectors(), "dephasing")
    }

    /// Single-qubit depolarizing map ρ ↦ (1 − q)ρ + q 𝟙/2.
    pub fn depolarizing(q: T) -> Result<Self> {
        if !(q >= T::zero() && q <= T::lit(4.0 / 3.0)) {
            return Err(Error::Argument(format!("depolarizing strength {q:?} outside [0, 4/3]")));
        }
        let id = CMatrix::identity(2)?;
        let quarter = (q / T::lit(4.0)).sqrt();
        let mut ops = vec![id.scale_real((T::one() - T::lit(3.0) * q / T::lit(4.0)).sqrt())];
        if q > T::zero() {
            ops.extend(
                [CMatrix::pauli_x(), CMatrix::pauli_y(), CMatrix::pauli_z()].iter().map(|p| p.scale_real(quarter)),
            );
        }
        Self::new(ops, "depolarizing")
    }

    /// Depolarizing noise of strength `q` applied independently to every qubit.
    pub fn depolarizing_each(q: T, dim: usize) -> Result<Self> {
        let single = Self::depolarizing(q)?;
        match dim {
            2 => Ok(single),
            4 => Self::tensor(&single, &single),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    /// Product channel A ⊗ B on two qubits.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        let mut ops = Vec::with_capacity(a.kraus_ops.len() * b.kraus_ops.len());
        for ka in &a.kraus_ops {
            for kb in &b.kraus_ops {
                ops.push(tensor(ka, kb)?);
            }
        }
        Self::new(ops, format!("{} ⊗ {}", a.label, b.label))
    }

    pub fn kraus_ops(&self) -> &[CMatrix<T>] {
        &self.kraus_ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].dim()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// ‖Σ Γ Γ† − 𝟙‖_max
    pub fn unitality_error(&self) -> T {
        gram_sum(&self.kraus_ops, false).max_abs_diff(&CMatrix::identity(self.dim()).expect("valid dim"))
    }

    /// ‖Σ Γ†Γ − 𝟙‖_max
    pub fn trace_preservation_error(&self) -> T {
        gram_sum(&self.kraus_ops, true).max_abs_diff(&CMatrix::identity(self.dim()).expect("valid dim"))
    }

    /// Linear action on an arbitrary operator.
    pub fn apply_operator(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        if x.dim() != self.dim() {
            return Err(Error::Argument(format!(
                "channel `{}` acts on dim {}, operator has dim {}",
                self.label,
                self.dim(),
                x.dim()
            )));
        }
        let mut out = CMatrix::zeros(x.dim())?;
        for k in &self.kraus_ops {
            out = &out + &x.conjugate_by(k);
        }
        Ok(out)
    }

    /// Σ_j Γ_j ρ Γ_j†
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let out = self.apply_operator(rho.matrix())?;
        DensityMatrix::new((&out + &out.adjoint()).scale_real(T::lit(0.5)))
    }

    /// outer ∘ inner, with Kraus set {A_i B_j}.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::Argument(format!(
                "cannot compose `{}` (dim {}) after `{}` (dim {})",
                outer.label,
                outer.dim(),
                inner.label,
                inner.dim()
            )));
        }
        let mut ops = Vec::with_capacity(outer.kraus_ops.len() * inner.kraus_ops.len());
        for a in &outer.kraus_ops {
            for b in &inner.kraus_ops {
                let ab = a * b;
                if ab.max_abs() > T::zero() {
                    ops.push(ab);
                }
            }
        }
        if ops.is_empty() {
            ops.push(CMatrix::zeros(outer.dim())?);
        }
        Self::new(ops, format!("{} ∘ {}", outer.label, inner.label))
    }
}

/// Σ K†K (`adjoint_first`) or Σ KK†.
fn gram_sum<T: Real>(ops: &[CMatrix<T>], adjoint_first: bool) -> CMatrix<T> {
    let dim = ops[0].dim();
    let mut acc = CMatrix::zeros(dim).expect("valid dim");
    for k in ops {
        let kd = k.adjoint();
        let term = if adjoint_first { &kd * k } else { k * &kd };
        acc = &acc + &term;
    }
    acc
}

/// Convenience wrapper matching the functional style of the other modules.
pub fn apply_channel<T: Real>(ch: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    ch.apply(rho)
}

pub fn unitary_channel<T: Real>(u: &CMatrix<T>) -> Result<KrausChannel<T>> {
    KrausChannel::unitary(u)
}

pub fn dephasing_channel<T: Real>(basis: &EigenSystem<T>) -> Result<KrausChannel<T>> {
    KrausChannel::dephasing(basis)
}

pub fn compose<T: Real>(outer: &KrausChannel<T>, inner: &KrausChannel<T>) -> Result<KrausChannel<T>> {
    KrausChannel::compose(outer, inner)
}

/// Trace-preserving but non-unital amplitude-damping map with decay probability
/// `gamma`, relaxing toward |1⟩ (the ground state of σz as used for H₀).
pub fn amplitude_damping<T: Real>(gamma: T) -> Result<KrausChannel<T>> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::Argument(format!("damping probability {gamma:?} outside [0, 1]")));
    }
    let mut k0 = CMatrix::zeros(2)?;
    k0.set(0, 0, cr((T::one() - gamma).sqrt()));
    k0.set(1, 1, cr(T::one()));
    let mut k1 = CMatrix::zeros(2)?;
    k1.set(1, 0, cr(gamma.sqrt()));
    KrausChannel::new(vec![k0, k1], "amplitude damping")
}
