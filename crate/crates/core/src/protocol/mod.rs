//! The feedback protocol on the working qubit: thermal preparation in H₀, sudden
//! quench to H_τ1, nonselective σx measurement recorded in a memory qubit read out
//! in a basis rotated by the mismatch angle φ, feedback unitary V_k, and final
//! dephasing in the eigenbasis of H_τ2.
//!
//! Energies are in units of ħω₁. Two-qubit operators are ordered memory ⊗ system.

pub mod calibration;
pub mod circuit;
pub mod variants;

use crate::channels::{measure_nonselective, projective_instrument, KrausChannel, MeasurementInstrument};
use crate::error::{Error, Result};
use crate::qmat::{CMatrix, DensityMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::thermo::{
    gibbs_state, information_gain, kl_divergence, mutual_information, scaled_free_energy_change, von_neumann_entropy,
    GibbsSpec, JointDistribution,
};
use crate::units;
use crate::workstats;

/// Tolerance for the identities a [`TradeoffReport`] must satisfy.
pub const REPORT_TOL: f64 = 1e-9;

pub const DEFAULT_OMEGA0_KHZ: f64 = 2.0;
pub const DEFAULT_OMEGA1_KHZ: f64 = 3.0;

/// How the initial temperature is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature<T> {
    /// k_BT in peV.
    KtPev(T),
    /// Dimensionless βħω₁; zero means infinite temperature.
    BetaInternal(T),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig<T> {
    temperature: Temperature<T>,
    phi: T,
    omega0_khz: T,
    omega1_khz: T,
    noise_q: T,
}

impl<T: Real> ProtocolConfig<T> {
    /// Default frequencies (2 kHz → 3 kHz), no noise.
    pub fn new(kt_pev: T, phi: T) -> Result<Self> {
        Self::with_temperature(Temperature::KtPev(kt_pev), phi)
    }

    pub fn from_beta_internal(beta_internal: T, phi: T) -> Result<Self> {
        Self::with_temperature(Temperature::BetaInternal(beta_internal), phi)
    }

    pub fn with_temperature(temperature: Temperature<T>, phi: T) -> Result<Self> {
        let cfg = Self {
            temperature,
            phi,
            omega0_khz: T::lit(DEFAULT_OMEGA0_KHZ),
            omega1_khz: T::lit(DEFAULT_OMEGA1_KHZ),
            noise_q: T::zero(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_frequencies(mut self, omega0_khz: T, omega1_khz: T) -> Result<Self> {
        self.omega0_khz = omega0_khz;
        self.omega1_khz = omega1_khz;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise(mut self, noise_q: T) -> Result<Self> {
        self.noise_q = noise_q;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        match self.temperature {
            Temperature::KtPev(kt) if !(kt.is_finite() && kt > T::zero()) => {
                return Err(Error::Argument(format!("k_BT must be positive and finite, got {kt:?}")))
            }
            Temperature::BetaInternal(b) if !(b.is_finite() && b >= T::zero()) => {
                return Err(Error::Argument(format!("βħω₁ must be finite and non-negative, got {b:?}")))
            }
            _ => {}
        }
        if !(self.phi >= T::zero() && self.phi <= T::PI()) {
            return Err(Error::Argument(format!("mismatch angle {:?} outside [0, π]", self.phi)));
        }
        for (name, w) in [("ω₀", self.omega0_khz), ("ω₁", self.omega1_khz)] {
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::Argument(format!("{name} must be positive and finite, got {w:?}")));
            }
        }
        if !(self.noise_q >= T::zero() && self.noise_q < T::one()) {
            return Err(Error::Argument(format!("noise strength {:?} outside [0, 1)", self.noise_q)));
        }
        Ok(())
    }

    pub fn temperature(&self) -> Temperature<T> {
        self.temperature
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn omega0_khz(&self) -> T {
        self.omega0_khz
    }

    pub fn omega1_khz(&self) -> T {
        self.omega1_khz
    }

    pub fn noise_q(&self) -> T {
        self.noise_q
    }

    /// βħω₁
    pub fn beta_internal(&self) -> T {
        match self.temperature {
            Temperature::BetaInternal(b) => b,
            Temperature::KtPev(kt) => units::hbar_omega_pev(self.omega1_khz) / kt,
        }
    }

    /// k_BT in peV (infinite at β = 0).
    pub fn kt_pev(&self) -> T {
        match self.temperature {
            Temperature::KtPev(kt) => kt,
            Temperature::BetaInternal(b) => units::kt_from_beta_internal(b, self.omega1_khz),
        }
    }

    /// ω₀/ω₁, the splitting of H₀ in internal units.
    pub fn omega_ratio(&self) -> T {
        self.omega0_khz / self.omega1_khz
    }

    /// ħω₁ in peV, the internal energy unit.
    pub fn energy_unit_pev(&self) -> T {
        units::hbar_omega_pev(self.omega1_khz)
    }

    /// p(0|1) = p(1|0) = sin²(φ/2) of the noiseless readout.
    pub fn error_probability(&self) -> T {
        let s = (self.phi / T::lit(2.0)).sin();
        s * s
    }
}

/// (H₀, H_τ1, H_τ2) = (½(ω₀/ω₁)σz, ½σx, ½σx).
pub fn build_hamiltonians<T: Real>(
    cfg: &ProtocolConfig<T>,
) -> Result<(HermitianOperator<T>, HermitianOperator<T>, HermitianOperator<T>)> {
    let half = T::lit(0.5);
    let h0 = HermitianOperator::new(CMatrix::pauli_z().scale_real(half * cfg.omega_ratio()))?;
    let h1 = HermitianOperator::new(CMatrix::pauli_x().scale_real(half))?;
    Ok((h0, h1.clone(), h1))
}

/// State right after the quench: the Gibbs state of H₀, unchanged.
pub fn sudden_quench_state<T: Real>(cfg: &ProtocolConfig<T>) -> Result<DensityMatrix<T>> {
    let (h0, _, _) = build_hamiltonians(cfg)?;
    gibbs_state(&GibbsSpec::new(h0, cfg.beta_internal())?)
}

/// γ = 2 arccos[(1 + e^{−x})^{−1/2}] for x = βħω₁, so that cos²(γ/2) is the Gibbs
/// ground-state population of a two-level system with splitting ħω₁.
pub fn feedback_gamma<T: Real>(beta_h_omega1: T) -> Result<T> {
    if beta_h_omega1.is_nan() || beta_h_omega1 < T::zero() {
        return Err(Error::Argument(format!("βħω₁ must be non-negative, got {beta_h_omega1:?}")));
    }
    let c = (T::one() + (-beta_h_omega1).exp()).sqrt().recip();
    Ok(T::lit(2.0) * c.min(T::one()).acos())
}

/// Feedback unitaries in the measurement frame together with the frame change.
///
/// In the frame, V₀ = e^{−iπσy/4} e^{−iγσx/2} and V₁ = V₀σx. The frame is reached
/// from the laboratory by B† with B = e^{−iπσy/4}, which sends the σx eigenstates
/// onto the σz basis; the laboratory operators are therefore V_k B†. Acting on the
/// outcome-k eigenstate of σx, V_k B† rotates by γ about an axis orthogonal to the
/// σx eigenaxis, leaving the ground population of ½σx equal to cos²(γ/2).
#[derive(Clone, Debug)]
pub struct FeedbackUnitaries<T> {
    frame_ops: [CMatrix<T>; 2],
    frame_change: CMatrix<T>,
}

impl<T: Real> FeedbackUnitaries<T> {
    pub fn v0(&self) -> &CMatrix<T> {
        &self.frame_ops[0]
    }

    pub fn v1(&self) -> &CMatrix<T> {
        &self.frame_ops[1]
    }

    /// B = e^{−iπσy/4}
    pub fn frame_change(&self) -> &CMatrix<T> {
        &self.frame_change
    }

    /// Laboratory-frame operator V_k B† applied after outcome k.
    pub fn lab(&self, k: usize) -> CMatrix<T> {
        &self.frame_ops[k] * &self.frame_change.adjoint()
    }
}

pub fn feedback_unitaries<T: Real>(cfg: &ProtocolConfig<T>) -> Result<FeedbackUnitaries<T>> {
    let gamma = feedback_gamma(cfg.beta_internal())?;
    let b = CMatrix::rotation(&CMatrix::pauli_y(), T::FRAC_PI_2());
    let v0 = &b * &CMatrix::rotation(&CMatrix::pauli_x(), gamma);
    let v1 = &v0 * &CMatrix::pauli_x();
    Ok(FeedbackUnitaries { frame_ops: [v0, v1], frame_change: b })
}

/// Ingredients of a general measurement-and-feedback protocol.
#[derive(Clone, Debug)]
pub struct ProtocolParts<T> {
    /// βħω₁
    pub beta: T,
    pub h0: HermitianOperator<T>,
    /// Unitary applied at the quench (the identity for a sudden quench).
    pub quench: CMatrix<T>,
    pub instrument: MeasurementInstrument<T>,
    /// p(k|l), indexed `[k][l]`.
    pub error_matrix: Vec<Vec<T>>,
    /// F_k in Kraus form.
    pub feedback: Vec<KrausChannel<T>>,
    /// H_τ2^(k)
    pub final_hamiltonians: Vec<HermitianOperator<T>>,
}

/// One (k, l) history of the protocol.
#[derive(Clone, Debug)]
pub struct Branch<T> {
    pub l: usize,
    pub k: usize,
    pub joint_prob: T,
    pub post_meas_state: DensityMatrix<T>,
    pub final_state: DensityMatrix<T>,
}

/// A fully evaluated protocol: its ingredients plus every branch state.
#[derive(Clone, Debug)]
pub struct ProtocolEnsemble<T> {
    parts: ProtocolParts<T>,
    initial_state: DensityMatrix<T>,
    post_quench_state: DensityMatrix<T>,
    outcome_probs: Vec<T>,
    branches: Vec<Branch<T>>,
    joint: JointDistribution<T>,
    references: Vec<DensityMatrix<T>>,
    beta_delta_f: Vec<T>,
}

impl<T: Real> ProtocolEnsemble<T> {
    /// Validates the ingredients and evaluates all branches classically:
    /// ρ_τ2^(k,l) = F_k(ρ_τ1^(l)) with weight p(k|l) p(l).
    pub fn assemble(parts: ProtocolParts<T>) -> Result<Self> {
        let dim = parts.h0.dim();
        let n_k = parts.feedback.len();
        let n_l = parts.instrument.len();
        if n_k == 0 || parts.final_hamiltonians.len() != n_k || parts.error_matrix.len() != n_k {
            return Err(Error::Argument(
                "feedback channels, final Hamiltonians and error-matrix rows must agree in number".into(),
            ));
        }
        if parts.quench.dim() != dim
            || parts.instrument.dim() != dim
            || parts.feedback.iter().any(|f| f.dim() != dim)
            || parts.final_hamiltonians.iter().any(|h| h.dim() != dim)
        {
            return Err(Error::Argument("protocol ingredients act on different dimensions".into()));
        }
        if parts.quench.unitarity_error() > T::tol(1e-10) {
            return Err(Error::InvalidOperator("quench operator is not unitary".into()));
        }
        for l in 0..n_l {
            let mut col = T::zero();
            for row in &parts.error_matrix {
                if row.len() != n_l {
                    return Err(Error::Argument("error matrix needs one column per measurement outcome".into()));
                }
                if !(row[l] >= T::zero()) {
                    return Err(Error::Argument("error matrix has a negative entry".into()));
                }
                col = col + row[l];
            }
            if (col - T::one()).abs() > T::tol(1e-12) {
                return Err(Error::Argument(format!("p(k|l = {l}) sums to {col:?}")));
            }
        }

        let initial_state = gibbs_state(&GibbsSpec::new(parts.h0.clone(), parts.beta)?)?;
        let post_quench_state = initial_state.evolve(&parts.quench)?;
        let outcomes = measure_nonselective(&parts.instrument, &post_quench_state)?;
        let mut outcome_probs = vec![T::zero(); n_l];
        let mut table = vec![vec![T::zero(); n_l]; n_k];
        let mut branches = Vec::with_capacity(outcomes.len() * n_k);
        for outcome in &outcomes {
            outcome_probs[outcome.index] = outcome.probability;
            for (k, f) in parts.feedback.iter().enumerate() {
                let joint_prob = parts.error_matrix[k][outcome.index] * outcome.probability;
                table[k][outcome.index] = joint_prob;
                branches.push(Branch {
                    l: outcome.index,
                    k,
                    joint_prob,
                    post_meas_state: outcome.state.clone(),
                    final_state: f.apply(&outcome.state)?,
                });
            }
        }
        // pruned outcomes carry < 1e-14 of weight; renormalize so the table is exact
        let total: T = table.iter().flatten().copied().sum();
        for row in &mut table {
            for p in row.iter_mut() {
                *p = *p / total;
            }
        }
        for b in &mut branches {
            b.joint_prob = table[b.k][b.l];
        }
        let joint = JointDistribution::new(table)?;

        let start = GibbsSpec::new(parts.h0.clone(), parts.beta)?;
        let mut references = Vec::with_capacity(n_k);
        let mut beta_delta_f = Vec::with_capacity(n_k);
        for h in &parts.final_hamiltonians {
            let spec = GibbsSpec::new(h.clone(), parts.beta)?;
            references.push(gibbs_state(&spec)?);
            beta_delta_f.push(scaled_free_energy_change(&start, &spec)?);
        }

        Ok(Self { parts, initial_state, post_quench_state, outcome_probs, branches, joint, references, beta_delta_f })
    }

    pub fn parts(&self) -> &ProtocolParts<T> {
        &self.parts
    }

    pub fn beta(&self) -> T {
        self.parts.beta
    }

    pub fn dim(&self) -> usize {
        self.parts.h0.dim()
    }

    pub fn h0(&self) -> &HermitianOperator<T> {
        &self.parts.h0
    }

    pub fn quench(&self) -> &CMatrix<T> {
        &self.parts.quench
    }

    pub fn instrument(&self) -> &MeasurementInstrument<T> {
        &self.parts.instrument
    }

    /// p(k|l), indexed `[k][l]`.
    pub fn error_matrix(&self) -> &[Vec<T>] {
        &self.parts.error_matrix
    }

    pub fn feedback(&self) -> &[KrausChannel<T>] {
        &self.parts.feedback
    }

    pub fn final_hamiltonian(&self, k: usize) -> &HermitianOperator<T> {
        &self.parts.final_hamiltonians[k]
    }

    /// ρ₀^eq, the Gibbs state of H₀.
    pub fn initial_state(&self) -> &DensityMatrix<T> {
        &self.initial_state
    }

    /// ρ_τ1 before the measurement.
    pub fn post_quench_state(&self) -> &DensityMatrix<T> {
        &self.post_quench_state
    }

    /// p(l)
    pub fn outcome_probabilities(&self) -> &[T] {
        &self.outcome_probs
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn joint(&self) -> &JointDistribution<T> {
        &self.joint
    }

    /// ρ_τ2^(k,eq), the Gibbs state of H_τ2^(k).
    pub fn reference_state(&self, k: usize) -> &DensityMatrix<T> {
        &self.references[k]
    }

    /// βΔF^(k) for every feedback label.
    pub fn beta_delta_f(&self) -> &[T] {
        &self.beta_delta_f
    }

    /// Σ_{k,l} p(k,l) ρ_τ2^(k,l)
    pub fn average_final_state(&self) -> Result<DensityMatrix<T>> {
        let mut acc = CMatrix::zeros(self.dim())?;
        for b in &self.branches {
            acc = &acc + &b.final_state.matrix().scale_real(b.joint_prob);
        }
        DensityMatrix::new(acc)
    }
}

/// Runs the default two-level protocol for `cfg`.
///
/// The error matrix p(k|l) comes from the memory readout (see [`circuit`]), and
/// F_k = dephase_{H_τ2} ∘ V_k, with single-qubit depolarizing noise before and
/// after V_k when `noise_q > 0`.
pub fn run_protocol<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ProtocolEnsemble<T>> {
    let (h0, h_tau1, h_tau2) = build_hamiltonians(cfg)?;
    ProtocolEnsemble::assemble(ProtocolParts {
        beta: cfg.beta_internal(),
        h0,
        quench: CMatrix::identity(2)?,
        instrument: projective_instrument(&h_tau1)?,
        error_matrix: circuit::readout_error_matrix(cfg)?,
        feedback: circuit::feedback_channels(cfg)?,
        final_hamiltonians: vec![h_tau2.clone(), h_tau2],
    })
}

/// Terms of the entropy-production decomposition ⟨Σ⟩ = −I_gain + ⟨S_KL⟩ + ⟨ΔS⟩_F,
/// all in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffReport<T> {
    /// ⟨Σ⟩ = β⟨W − ΔF^(k)⟩ from two-point work statistics.
    pub sigma: T,
    pub i_gain: T,
    pub avg_kl: T,
    pub delta_s_f: T,
    pub mutual_info: T,
    /// ⟨e^{−β(W − ΔF^(k)) − I^(k,l)}⟩
    pub fluct_avg: T,
}

impl<T: Real> TradeoffReport<T> {
    /// ⟨Σ⟩ − (−I_gain + ⟨S_KL⟩ + ⟨ΔS⟩_F)
    pub fn decomposition_residual(&self) -> T {
        self.sigma - (-self.i_gain + self.avg_kl + self.delta_s_f)
    }

    pub fn is_finite(&self) -> bool {
        [self.sigma, self.i_gain, self.avg_kl, self.delta_s_f, self.mutual_info, self.fluct_avg]
            .iter()
            .all(|x| x.is_finite())
    }

    /// Checks the decomposition identity and the lower bounds −⟨I⟩ and −I_gain on ⟨Σ⟩.
    pub fn check(&self) -> Result<()> {
        let tol = T::tol(REPORT_TOL);
        let residual = self.decomposition_residual();
        if residual.abs() > tol {
            return Err(Error::Invariant(format!("entropy-production decomposition off by {residual:?}")));
        }
        if self.sigma < -self.mutual_info - tol {
            return Err(Error::Invariant(format!("⟨Σ⟩ = {:?} below −⟨I⟩ = {:?}", self.sigma, -self.mutual_info)));
        }
        if self.sigma < -self.i_gain - tol {
            return Err(Error::Invariant(format!("⟨Σ⟩ = {:?} below −I_gain = {:?}", self.sigma, -self.i_gain)));
        }
        Ok(())
    }
}

/// Evaluates every term of the entropy-production decomposition. ⟨Σ⟩ is
/// computed from the enumerated work paths, independently of the entropic terms.
pub fn tradeoff_report<T: Real>(ens: &ProtocolEnsemble<T>) -> Result<TradeoffReport<T>> {
    let outcomes: Vec<(T, &DensityMatrix<T>)> = {
        let mut seen = vec![false; ens.instrument().len()];
        ens.branches()
            .iter()
            .filter(|b| !std::mem::replace(&mut seen[b.l], true))
            .map(|b| (ens.outcome_probabilities()[b.l], &b.post_meas_state))
            .collect()
    };
    let i_gain = information_gain(ens.post_quench_state(), outcomes);

    let mut avg_kl = T::zero();
    let mut delta_s_f = T::zero();
    for b in ens.branches() {
        if b.joint_prob == T::zero() {
            continue;
        }
        avg_kl = avg_kl + b.joint_prob * kl_divergence(&b.final_state, ens.reference_state(b.k))?;
        delta_s_f =
            delta_s_f + b.joint_prob * (von_neumann_entropy(&b.final_state) - von_neumann_entropy(&b.post_meas_state));
    }

    let paths = workstats::enumerate_paths_unchecked(ens)?;
    let sigma = workstats::entropy_production(&paths, ens.beta_delta_f(), ens.beta());
    let fluct_avg = workstats::fluctuation_functional(&paths, ens.joint(), ens.beta_delta_f(), ens.beta())?;

    Ok(TradeoffReport { sigma, i_gain, avg_kl, delta_s_f, mutual_info: mutual_information(ens.joint()), fluct_avg })
}

/// I_gain > ⟨S_KL⟩ + ⟨ΔS⟩_F, i.e. the protocol rectifies entropy (⟨Σ⟩ < 0).
/// Differences within 1e-9 of zero count as equality.
pub fn demon_condition<T: Real>(report: &TradeoffReport<T>) -> bool {
    report.i_gain - (report.avg_kl + report.delta_s_f) > T::tol(REPORT_TOL)
}

#[cfg(test)]
mod tests;
