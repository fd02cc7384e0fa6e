//! Coherent two-qubit realization of the measurement and feedback.
//!
//! The memory starts in |0⟩ and is flipped conditionally on the σx outcome of the
//! system (C = 𝟙 ⊗ M₀ + σx ⊗ M₁), then dephased in its computational basis.
//! The controlled feedback W = Σ_k |φ_k⟩⟨φ_k| ⊗ V_k reads the memory in the basis
//! |φ_k⟩ = e^{−iφσx/2}|k⟩, which realizes p(k|l) = |⟨φ_k|l⟩|². Optional noise is
//! single-qubit depolarizing on both qubits after C and after W.

use crate::channels::{projective_instrument, ChiMatrix, KrausChannel};
use crate::error::Result;
use crate::qmat::{partial_trace, tensor, CMatrix, DensityMatrix, Subsystem, C};
use crate::scalar::Real;

use super::{build_hamiltonians, feedback_unitaries, ProtocolConfig};

/// Readout kets |φ₀⟩, |φ₁⟩ of the memory.
pub fn readout_basis<T: Real>(phi: T) -> [Vec<C<T>>; 2] {
    let r = CMatrix::rotation(&CMatrix::pauli_x(), phi);
    [vec![r.get(0, 0), r.get(1, 0)], vec![r.get(0, 1), r.get(1, 1)]]
}

fn noise<T: Real>(q: T, dim: usize) -> Result<Option<KrausChannel<T>>> {
    if q > T::zero() {
        Ok(Some(KrausChannel::depolarizing_each(q, dim)?))
    } else {
        Ok(None)
    }
}

/// p(k|l) from the memory statistics, indexed `[k][l]`.
pub fn readout_error_matrix<T: Real>(cfg: &ProtocolConfig<T>) -> Result<Vec<Vec<T>>> {
    let kets = readout_basis(cfg.phi());
    let mem_noise = noise(cfg.noise_q(), 2)?;
    let mut table = vec![vec![T::zero(); 2]; 2];
    for l in 0..2 {
        let mut mem = DensityMatrix::basis_state(2, l)?;
        if let Some(ch) = &mem_noise {
            mem = ch.apply(&mem)?;
        }
        for (k, ket) in kets.iter().enumerate() {
            table[k][l] = mem.population(ket);
        }
    }
    Ok(table)
}

/// F_k = dephase_{H_τ2} ∘ [noise] ∘ V_k ∘ [noise], in laboratory frame.
pub fn feedback_channels<T: Real>(cfg: &ProtocolConfig<T>) -> Result<Vec<KrausChannel<T>>> {
    let (_, _, h_tau2) = build_hamiltonians(cfg)?;
    let dephase = KrausChannel::dephasing(&h_tau2.eig())?;
    let v = feedback_unitaries(cfg)?;
    let sys_noise = noise(cfg.noise_q(), 2)?;
    (0..2)
        .map(|k| {
            let mut f = KrausChannel::unitary(&v.lab(k))?;
            if let Some(ch) = &sys_noise {
                f = KrausChannel::compose(ch, &KrausChannel::compose(&f, ch)?)?;
            }
            Ok(KrausChannel::compose(&dephase, &f)?.with_label(format!("F{k}")))
        })
        .collect()
}

/// C = 𝟙 ⊗ M₀ + σx ⊗ M₁
pub fn coupling_unitary<T: Real>(cfg: &ProtocolConfig<T>) -> Result<CMatrix<T>> {
    let (_, h_tau1, _) = build_hamiltonians(cfg)?;
    let inst = projective_instrument(&h_tau1)?;
    let m = inst.projectors();
    Ok(&tensor(&CMatrix::identity(2)?, &m[0])? + &tensor(&CMatrix::pauli_x(), &m[1])?)
}

/// W = Σ_k |φ_k⟩⟨φ_k| ⊗ V_k
pub fn controlled_feedback<T: Real>(cfg: &ProtocolConfig<T>) -> Result<CMatrix<T>> {
    let v = feedback_unitaries(cfg)?;
    let kets = readout_basis(cfg.phi());
    let mut w = CMatrix::zeros(4)?;
    for (k, ket) in kets.iter().enumerate() {
        w = &w + &tensor(&CMatrix::projector(ket)?, &v.lab(k))?;
    }
    Ok(w)
}

/// The whole protocol after preparation, as a map on system operators.
#[derive(Clone, Debug)]
pub struct ProtocolCircuit<T> {
    coupling: CMatrix<T>,
    feedback: CMatrix<T>,
    memory_dephasing: KrausChannel<T>,
    final_dephasing: KrausChannel<T>,
    noise: Option<KrausChannel<T>>,
}

impl<T: Real> ProtocolCircuit<T> {
    pub fn new(cfg: &ProtocolConfig<T>) -> Result<Self> {
        let (_, _, h_tau2) = build_hamiltonians(cfg)?;
        let id = CMatrix::identity(2)?;
        let mem_proj = [DensityMatrix::basis_state(2, 0)?, DensityMatrix::basis_state(2, 1)?]
            .iter()
            .map(|p| tensor(p.matrix(), &id))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coupling: coupling_unitary(cfg)?,
            feedback: controlled_feedback(cfg)?,
            memory_dephasing: KrausChannel::new(mem_proj, "memory dephasing")?,
            final_dephasing: KrausChannel::dephasing(&h_tau2.eig())?,
            noise: noise(cfg.noise_q(), 4)?,
        })
    }

    /// Joint memory ⊗ system operator just before the memory is discarded.
    pub fn joint_output(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        let mut j = tensor(DensityMatrix::basis_state(2, 0)?.matrix(), x)?.conjugate_by(&self.coupling);
        if let Some(ch) = &self.noise {
            j = ch.apply_operator(&j)?;
        }
        j = self.memory_dephasing.apply_operator(&j)?.conjugate_by(&self.feedback);
        if let Some(ch) = &self.noise {
            j = ch.apply_operator(&j)?;
        }
        Ok(j)
    }

    pub fn apply_operator(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        let sys = partial_trace(&self.joint_output(x)?, Subsystem::System)?;
        self.final_dephasing.apply_operator(&sys)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let out = self.apply_operator(rho.matrix())?;
        DensityMatrix::new((&out + &out.adjoint()).scale_real(T::lit(0.5)))
    }
}

/// χ of the full protocol channel on the working qubit.
pub fn protocol_chi<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ChiMatrix<T>> {
    let circuit = ProtocolCircuit::new(cfg)?;
    ChiMatrix::from_linear_map(2, |x| circuit.apply_operator(x))
}

/// χ of the nonselective σx measurement on the working qubit.
pub fn measurement_chi<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ChiMatrix<T>> {
    let (_, h_tau1, _) = build_hamiltonians(cfg)?;
    let ch = projective_instrument(&h_tau1)?.as_channel()?;
    ChiMatrix::from_linear_map(2, |x| ch.apply_operator(x))
}

/// χ of the two-qubit controlled-feedback gate W.
pub fn controlled_feedback_chi<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ChiMatrix<T>> {
    let ch = KrausChannel::unitary(&controlled_feedback(cfg)?)?;
    ChiMatrix::from_linear_map(4, |x| ch.apply_operator(x))
}
