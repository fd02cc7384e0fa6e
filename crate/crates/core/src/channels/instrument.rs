use super::{KrausChannel, CHANNEL_TOL};
use crate::error::{Error, Result};
use crate::qmat::{CMatrix, DensityMatrix, HermitianOperator};
use crate::scalar::Real;

/// Outcomes with probability below this are dropped from branch lists.
pub const BRANCH_PRUNE: f64 = 1e-14;

/// Complete set of orthogonal projectors {M_l}.
#[derive(Clone, Debug)]
pub struct MeasurementInstrument<T> {
    projectors: Vec<CMatrix<T>>,
    outcome_values: Vec<T>,
}

impl<T: Real> MeasurementInstrument<T> {
    pub fn new(projectors: Vec<CMatrix<T>>, outcome_values: Vec<T>) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != outcome_values.len() {
            return Err(Error::Argument("instrument needs one outcome value per projector".into()));
        }
        let dim = projectors[0].dim();
        if projectors.iter().any(|p| p.dim() != dim) {
            return Err(Error::Argument("instrument projectors differ in dimension".into()));
        }
        let tol = T::tol(CHANNEL_TOL);
        let mut sum = CMatrix::zeros(dim)?;
        for (i, p) in projectors.iter().enumerate() {
            if p.hermiticity_error() > tol || (p * p).max_abs_diff(p) > tol {
                return Err(Error::InvalidOperator(format!("element {i} is not a Hermitian projector")));
            }
            for q in &projectors[i + 1..] {
                if (p * q).max_abs() > tol {
                    return Err(Error::InvalidOperator("instrument projectors are not mutually orthogonal".into()));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&CMatrix::identity(dim)?) > tol {
            return Err(Error::InvalidOperator("instrument projectors do not sum to the identity".into()));
        }
        Ok(Self { projectors, outcome_values })
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    /// Eigenvalue attached to each outcome label, ascending.
    pub fn outcome_values(&self) -> &[T] {
        &self.outcome_values
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// p(l) = tr(M_l ρ) for every outcome.
    pub fn probabilities(&self, rho: &DensityMatrix<T>) -> Vec<T> {
        self.projectors.iter().map(|p| p.trace_product(rho.matrix()).re.max(T::zero())).collect()
    }

    /// The nonselective measurement as a channel (dephasing in the measured basis).
    pub fn as_channel(&self) -> Result<KrausChannel<T>> {
        KrausChannel::new(self.projectors.clone(), "nonselective measurement")
    }
}

/// Eigenprojectors of an observable, one per distinct eigenvalue, ascending.
pub fn projective_instrument<T: Real>(obs: &HermitianOperator<T>) -> Result<MeasurementInstrument<T>> {
    let eig = obs.eig();
    let tol = T::tol(1e-10) * T::one().max(obs.matrix().max_abs());
    let mut projectors: Vec<CMatrix<T>> = Vec::new();
    let mut values: Vec<T> = Vec::new();
    for (lambda, v) in eig.eigenvalues().iter().zip(eig.eigenvectors()) {
        let p = CMatrix::projector(v)?;
        match values.last() {
            Some(&last) if (*lambda - last).abs() <= tol => {
                let merged = &projectors.pop().expect("non-empty") + &p;
                projectors.push(merged);
            }
            _ => {
                projectors.push(p);
                values.push(*lambda);
            }
        }
    }
    MeasurementInstrument::new(projectors, values)
}

/// One realized measurement outcome.
#[derive(Clone, Debug)]
pub struct Outcome<T> {
    pub index: usize,
    pub probability: T,
    pub state: DensityMatrix<T>,
}

/// Outcome branches (p(l), M_l ρ M_l / p(l)); outcomes with p(l) < 1e-14 are dropped.
pub fn measure_nonselective<T: Real>(
    inst: &MeasurementInstrument<T>,
    rho: &DensityMatrix<T>,
) -> Result<Vec<Outcome<T>>> {
    if inst.dim() != rho.dim() {
        return Err(Error::Argument(format!("instrument acts on dim {}, state has dim {}", inst.dim(), rho.dim())));
    }
    let mut out = Vec::with_capacity(inst.len());
    for (index, p) in inst.projectors.iter().enumerate() {
        let unnormalized = rho.matrix().conjugate_by(p);
        let probability = unnormalized.trace().re;
        if probability < T::lit(BRANCH_PRUNE) {
            continue;
        }
        let state = DensityMatrix::new(unnormalized.scale_real(T::one() / probability))?;
        out.push(Outcome { index, probability, state });
    }
    Ok(out)
}
