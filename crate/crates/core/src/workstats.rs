//! Two-point-measurement work statistics with feedback.
//!
//! A history (n, l, k, j, m) starts in the H₀ eigenstate n, yields measurement
//! outcome l, feedback label k, Kraus branch j of F_k, and ends in the H_τ2^(k)
//! eigenstate m. Its probability is
//! p(k|l) tr(Π_m Γ_j M_l U Π_n ρ₀ Π_n U† M_l Γ_j†) and its work ε_m^(k) − ε_n.

use std::io::Write;

use crate::error::{Error, Result};
use crate::protocol::ProtocolEnsemble;
use crate::qmat::CMatrix;
use crate::scalar::Real;
use crate::thermo::JointDistribution;

/// Work values closer than this are merged into one atom.
pub const WORK_MERGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkPath<T> {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub j: usize,
    pub m: usize,
    /// p(m, j, k, l, n) = p(k|l) · `history_prob`
    pub prob: T,
    /// p(m, j, l, n), the probability of the history given that F_k is applied.
    pub history_prob: T,
    pub work: T,
}

/// Enumerates every history. Fails with [`Error::ProtocolViolation`] if some
/// feedback channel is not unital, since the fluctuation relation assumes it.
pub fn enumerate_paths<T: Real>(ens: &ProtocolEnsemble<T>) -> Result<Vec<WorkPath<T>>> {
    if let Some((k, f)) = ens.feedback().iter().enumerate().find(|(_, f)| !f.is_unital()) {
        return Err(Error::ProtocolViolation(format!(
            "feedback channel {k} (`{}`) is not unital: ‖ΣΓΓ† − 𝟙‖ = {:?}",
            f.label(),
            f.unitality_error()
        )));
    }
    enumerate_paths_unchecked(ens)
}

/// [`enumerate_paths`] without the unitality check.
pub fn enumerate_paths_unchecked<T: Real>(ens: &ProtocolEnsemble<T>) -> Result<Vec<WorkPath<T>>> {
    let initial = ens.h0().eig();
    let rho0 = ens.initial_state();
    let finals: Vec<_> = (0..ens.feedback().len()).map(|k| ens.final_hamiltonian(k).eig()).collect();
    let projectors: Vec<Vec<CMatrix<T>>> = finals.iter().map(|e| e.projectors()).collect();
    let mut paths = Vec::new();
    for (n, (e_n, v_n)) in initial.eigenvalues().iter().zip(initial.eigenvectors()).enumerate() {
        let p_n = rho0.population(v_n);
        // U Π_n ρ₀ Π_n U† = p_n U|n⟩⟨n|U†
        let evolved = CMatrix::projector(&ens.quench().apply(v_n))?.scale_real(p_n);
        for (l, m_l) in ens.instrument().projectors().iter().enumerate() {
            let measured = evolved.conjugate_by(m_l);
            for (k, f) in ens.feedback().iter().enumerate() {
                let p_kl = ens.error_matrix()[k][l];
                let fin = &finals[k];
                for (j, gamma) in f.kraus_ops().iter().enumerate() {
                    let out = measured.conjugate_by(gamma);
                    for (m, e_m) in fin.eigenvalues().iter().enumerate() {
                        let weight = projectors[k][m].trace_product(&out).re.max(T::zero());
                        paths.push(WorkPath {
                            n,
                            l,
                            k,
                            j,
                            m,
                            prob: p_kl * weight,
                            history_prob: weight,
                            work: *e_m - *e_n,
                        });
                    }
                }
            }
        }
    }
    Ok(paths)
}

/// Work distribution as merged atoms (work, probability), ascending in work.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkDistribution<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> WorkDistribution<T> {
    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn total_probability(&self) -> T {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn mean(&self) -> T {
        self.atoms.iter().map(|&(w, p)| w * p).sum()
    }

    /// CSV with columns `work_internal,work_peV,probability`; `energy_unit_pev`
    /// is the size of the internal energy unit.
    pub fn write_csv<W: Write>(&self, out: W, energy_unit_pev: T) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["work_internal", "work_peV", "probability"])?;
        for &(w, p) in &self.atoms {
            wtr.write_record([w.to_string(), (w * energy_unit_pev).to_string(), p.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Merges path work values within 1e-10; atoms of zero total probability are dropped.
pub fn work_distribution<T: Real>(paths: &[WorkPath<T>]) -> WorkDistribution<T> {
    let mut sorted: Vec<(T, T)> = paths.iter().map(|p| (p.work, p.prob)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite work values"));
    let tol = T::tol(WORK_MERGE_TOL);
    let mut atoms: Vec<(T, T)> = Vec::new();
    let mut anchor = T::zero();
    for (w, p) in sorted {
        match atoms.last_mut() {
            Some(last) if w - anchor <= tol => last.1 = last.1 + p,
            _ => {
                anchor = w;
                atoms.push((w, p));
            }
        }
    }
    atoms.retain(|a| a.1 > T::zero());
    WorkDistribution { atoms }
}

/// ⟨W⟩ = Σ p W
pub fn average_work<T: Real>(paths: &[WorkPath<T>]) -> T {
    paths.iter().map(|p| p.prob * p.work).sum()
}

/// ⟨Σ⟩ = β⟨W⟩ − Σ_k p(k) βΔF^(k), with `beta_delta_f[k]` = βΔF^(k).
pub fn entropy_production<T: Real>(paths: &[WorkPath<T>], beta_delta_f: &[T], beta: T) -> T {
    paths.iter().map(|p| p.prob * (beta * p.work - beta_delta_f[p.k])).sum()
}

/// ⟨e^{−β(W − ΔF^(k)) − I^(k,l)}⟩ with I^(k,l) = ln p(k|l)/p(k) taken from the
/// exact joint distribution.
///
/// Each history contributes p(k|l) p(m,j,l,n) e^{−I^(k,l)} = p(k) p(m,j,l,n), so
/// histories excluded by an error-free readout (p(k|l) = 0) enter through this
/// limit rather than being dropped; dropping them would break the identity at
/// φ = 0 and φ = π.
pub fn fluctuation_functional<T: Real>(
    paths: &[WorkPath<T>],
    joint: &JointDistribution<T>,
    beta_delta_f: &[T],
    beta: T,
) -> Result<T> {
    let p_k = joint.marginal_k();
    let mut acc = T::zero();
    for path in paths {
        if path.history_prob == T::zero() {
            continue;
        }
        if p_k[path.k] == T::zero() {
            return Err(Error::DegenerateMarginal(path.k));
        }
        acc = acc + p_k[path.k] * path.history_prob * (-(beta * path.work - beta_delta_f[path.k])).exp();
    }
    Ok(acc)
}

/// ⟨Σ⟩ ≥ −⟨I⟩ within 1e-9.
pub fn jensen_bound_check<T: Real>(sigma: T, mutual_info: T) -> bool {
    sigma >= -mutual_info - T::tol(1e-9)
}
