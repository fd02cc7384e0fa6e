//! Alternative protocols used to probe the fluctuation relation: random unital
//! feedback on a four-level system, feedback without a memory, and a deliberately
//! non-unital feedback.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{amplitude_damping, projective_instrument, KrausChannel};
use crate::error::Result;
use crate::qmat::{CMatrix, HermitianOperator};
use crate::sampling::{random_distribution, random_hermitian, random_unitary};
use crate::scalar::Real;

use super::{build_hamiltonians, feedback_unitaries, run_protocol, ProtocolConfig, ProtocolEnsemble, ProtocolParts};

/// Random two-qubit (dim 4) protocol with unital feedback: random H₀, quench
/// unitary, four-outcome projective measurement, 2 or 3 feedback labels with a
/// random error matrix, mixed-unitary F_k and random final Hamiltonians.
pub fn random_unital_protocol<T: Real>(seed: u64) -> Result<ProtocolEnsemble<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 4;
    let beta = T::lit(rng.random_range(0.2..3.0));
    let h0 = HermitianOperator::new(random_hermitian(&mut rng, dim))?;
    let quench = random_unitary(&mut rng, dim);
    let instrument = projective_instrument(&HermitianOperator::new(random_hermitian(&mut rng, dim))?)?;
    let n_k = rng.random_range(2..=3);
    let n_l = instrument.len();

    let mut error_matrix = vec![vec![T::zero(); n_l]; n_k];
    for l in 0..n_l {
        for (k, p) in random_distribution::<T, _>(&mut rng, n_k).into_iter().enumerate() {
            error_matrix[k][l] = p;
        }
    }
    let mut feedback = Vec::with_capacity(n_k);
    let mut final_hamiltonians = Vec::with_capacity(n_k);
    for k in 0..n_k {
        let weights = random_distribution::<T, _>(&mut rng, 3);
        let ops = weights.iter().map(|&w| random_unitary::<T, _>(&mut rng, dim).scale_real(w.sqrt())).collect();
        feedback.push(KrausChannel::new(ops, format!("mixed-unitary F{k}"))?);
        final_hamiltonians.push(HermitianOperator::new(random_hermitian(&mut rng, dim))?);
    }
    ProtocolEnsemble::assemble(ProtocolParts {
        beta,
        h0,
        quench,
        instrument,
        error_matrix,
        feedback,
        final_hamiltonians,
    })
}

/// Same preparation and measurement, but a single feedback F = dephase ∘ V₀ is
/// applied regardless of the outcome, so p(k|l) = p(k) = 1.
pub fn no_feedback_protocol<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ProtocolEnsemble<T>> {
    let (h0, h_tau1, h_tau2) = build_hamiltonians(cfg)?;
    let dephase = KrausChannel::dephasing(&h_tau2.eig())?;
    let f = KrausChannel::compose(&dephase, &KrausChannel::unitary(&feedback_unitaries(cfg)?.lab(0))?)?;
    let instrument = projective_instrument(&h_tau1)?;
    let error_matrix = vec![vec![T::one(); instrument.len()]];
    ProtocolEnsemble::assemble(ProtocolParts {
        beta: cfg.beta_internal(),
        h0,
        quench: CMatrix::identity(2)?,
        instrument,
        error_matrix,
        feedback: vec![f],
        final_hamiltonians: vec![h_tau2],
    })
}

/// Default protocol with amplitude damping of strength `damping` toward the ground
/// state of H_τ2 appended to each feedback channel, which breaks unitality for any
/// `damping > 0`.
pub fn non_unital_protocol<T: Real>(cfg: &ProtocolConfig<T>, damping: T) -> Result<ProtocolEnsemble<T>> {
    let base = run_protocol(cfg)?;
    // damping toward |1⟩, carried onto the σx eigenbasis (|1⟩ ↦ ground of ½σx)
    let b = feedback_unitaries(cfg)?.frame_change().clone();
    let relax = KrausChannel::new(
        amplitude_damping(damping)?.kraus_ops().iter().map(|k| k.conjugate_by(&b)).collect(),
        "relaxation",
    )?;
    let mut parts = base.parts().clone();
    parts.feedback = parts
        .feedback
        .iter()
        .map(|f| Ok(KrausChannel::compose(&relax, f)?.with_label(format!("damped {}", f.label()))))
        .collect::<Result<_>>()?;
    ProtocolEnsemble::assemble(parts)
}
