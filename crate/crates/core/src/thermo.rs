//! Thermodynamic and information functionals. All entropies are in nats.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qmat::{mat_func, CMatrix, DensityMatrix, HermitianOperator};
use crate::sampling::random_matrix;
use crate::scalar::Real;

/// Eigenvalues of a reference state below this are treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Floor applied to eigenvalues inside logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

fn log_floor<T: Real>() -> T {
    T::lit(LOG_FLOOR).max(T::min_positive_value())
}

/// A Hamiltonian together with an inverse temperature (in units of the
/// internal energy scale).
#[derive(Clone, Debug)]
pub struct GibbsSpec<T> {
    hamiltonian: HermitianOperator<T>,
    beta: T,
}

impl<T: Real> GibbsSpec<T> {
    /// `beta = 0` (infinite temperature) is accepted so the maximally mixed
    /// limit can be evaluated exactly.
    pub fn new(hamiltonian: HermitianOperator<T>, beta: T) -> Result<Self> {
        if !(beta.is_finite() && beta >= T::zero()) {
            return Err(Error::Argument(format!("inverse temperature must be finite and non-negative, got {beta:?}")));
        }
        Ok(Self { hamiltonian, beta })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator<T> {
        &self.hamiltonian
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

/// Z = tr e^{−βH}
pub fn partition_function<T: Real>(spec: &GibbsSpec<T>) -> T {
    spec.hamiltonian.eig().eigenvalues().iter().map(|&e| (-spec.beta * e).exp()).sum()
}

/// e^{−βH} / Z, evaluated with the ground energy shifted to zero.
pub fn gibbs_state<T: Real>(spec: &GibbsSpec<T>) -> Result<DensityMatrix<T>> {
    let eig = spec.hamiltonian.eig();
    let ground = eig.eigenvalues()[0];
    let z: T = eig.eigenvalues().iter().map(|&e| (-spec.beta * (e - ground)).exp()).sum();
    let m = mat_func(&spec.hamiltonian, |e| (-spec.beta * (e - ground)).exp() / z)?;
    DensityMatrix::new(m)
}

/// β ΔF = −ln(Z₁/Z₀), well defined down to β = 0.
pub fn scaled_free_energy_change<T: Real>(spec0: &GibbsSpec<T>, spec1: &GibbsSpec<T>) -> Result<T> {
    if spec0.beta != spec1.beta {
        return Err(Error::Argument(format!(
            "free-energy change needs equal β, got {:?} and {:?}",
            spec0.beta, spec1.beta
        )));
    }
    Ok(-(partition_function(spec1) / partition_function(spec0)).ln())
}

/// ΔF = −β⁻¹ ln(Z₁/Z₀)
pub fn free_energy_change<T: Real>(spec0: &GibbsSpec<T>, spec1: &GibbsSpec<T>) -> Result<T> {
    let scaled = scaled_free_energy_change(spec0, spec1)?;
    if spec0.beta == T::zero() {
        return Err(Error::Argument("free-energy change is undefined at β = 0".into()));
    }
    Ok(scaled / spec0.beta)
}

/// U(ρ) = tr(ρ H)
pub fn internal_energy<T: Real>(rho: &DensityMatrix<T>, h: &HermitianOperator<T>) -> T {
    h.expectation(rho)
}

fn entropy_of_spectrum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().filter(|&p| p > T::zero()).map(|p| -p * p.max(log_floor()).ln()).sum()
}

/// S(ρ) = −tr ρ ln ρ with 0 ln 0 = 0.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    entropy_of_spectrum(rho.eigenvalues())
}

/// −Σ p ln p for a probability vector.
pub fn shannon_entropy<T: Real>(p: &[T]) -> Result<T> {
    if let Some(bad) = p.iter().find(|&&x| x < T::zero() || !x.is_finite()) {
        return Err(Error::Argument(format!("probability entry {bad:?} is negative or non-finite")));
    }
    let total: T = p.iter().copied().sum();
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::Argument(format!("probabilities sum to {total:?}, not 1")));
    }
    Ok(entropy_of_spectrum(p.iter().copied()))
}

/// Binary Shannon entropy H(p, 1 − p).
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_of_spectrum([p, T::one() - p])
}

/// S(ρ‖σ) = tr ρ(ln ρ − ln σ). Returns [`Error::InfiniteDivergence`] when ρ has
/// weight outside the support of σ.
pub fn kl_divergence<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Argument("relative entropy of states with different dimensions".into()));
    }
    let support_tol = T::tol(SUPPORT_TOL);
    let eig = sigma.eig();
    let mut cross = T::zero();
    for (&mu, v) in eig.eigenvalues().iter().zip(eig.eigenvectors()) {
        let weight = rho.population(v);
        if mu < support_tol {
            if weight > support_tol {
                return Err(Error::InfiniteDivergence);
            }
            continue;
        }
        cross = cross + weight * mu.max(log_floor()).ln();
    }
    let value = -von_neumann_entropy(rho) - cross;
    // rounding can leave a tiny negative residue for ρ ≈ σ
    Ok(if value < T::zero() && value > -T::tol(1e-12) { T::zero() } else { value })
}

/// Average entropy reduction S(ρ) − Σ_l p(l) S(ρ⁽ˡ⁾).
pub fn information_gain<'a, T: Real>(
    pre: &DensityMatrix<T>,
    branches: impl IntoIterator<Item = (T, &'a DensityMatrix<T>)>,
) -> T {
    let post: T = branches.into_iter().map(|(p, rho)| p * von_neumann_entropy(rho)).sum();
    von_neumann_entropy(pre) - post
}

/// Joint distribution p(k, l) over feedback label k (rows) and measurement
/// outcome l (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    rows: usize,
    cols: usize,
    p: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    pub fn new(p_kl: Vec<Vec<T>>) -> Result<Self> {
        let rows = p_kl.len();
        let cols = p_kl.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || p_kl.iter().any(|r| r.len() != cols) {
            return Err(Error::Argument("joint distribution must be a non-empty rectangular table".into()));
        }
        let p: Vec<T> = p_kl.into_iter().flatten().collect();
        if p.iter().any(|&x| x < T::zero() || !x.is_finite()) {
            return Err(Error::Argument("joint distribution has negative or non-finite entries".into()));
        }
        let total: T = p.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::Argument(format!("joint distribution sums to {total:?}")));
        }
        Ok(Self { rows, cols, p })
    }

    pub fn get(&self, k: usize, l: usize) -> T {
        self.p[k * self.cols + l]
    }

    pub fn feedback_labels(&self) -> usize {
        self.rows
    }

    pub fn outcomes(&self) -> usize {
        self.cols
    }

    /// p(k)
    pub fn marginal_k(&self) -> Vec<T> {
        (0..self.rows).map(|k| (0..self.cols).map(|l| self.get(k, l)).sum()).collect()
    }

    /// p(l)
    pub fn marginal_l(&self) -> Vec<T> {
        (0..self.cols).map(|l| (0..self.rows).map(|k| self.get(k, l)).sum()).collect()
    }
}

/// ⟨I⟩ = Σ p(k,l) ln[p(k,l) / (p(k) p(l))]
pub fn mutual_information<T: Real>(d: &JointDistribution<T>) -> T {
    let pk = d.marginal_k();
    let pl = d.marginal_l();
    let mut acc = T::zero();
    for k in 0..d.rows {
        for l in 0..d.cols {
            let pkl = d.get(k, l);
            if pkl > T::zero() {
                acc = acc + pkl * (pkl / (pk[k] * pl[l])).ln();
            }
        }
    }
    acc.max(T::zero())
}

/// Random measurement operators {M_l} with Σ M_l†M_l = 𝟙, built as
/// M_l = A_l G^{−1/2} with G = Σ A_l†A_l for random A_l.
pub fn random_povm<T: Real>(dim: usize, n_outcomes: usize, seed: u64) -> Result<Vec<CMatrix<T>>> {
    if n_outcomes == 0 {
        return Err(Error::Argument("a POVM needs at least one outcome".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<CMatrix<T>> = (0..n_outcomes).map(|_| random_matrix(&mut rng, dim)).collect();
    let mut gram = CMatrix::zeros(dim)?;
    for a in &raw {
        gram = &gram + &(&a.adjoint() * a);
    }
    let gram = (&gram + &gram.adjoint()).scale_real(T::lit(0.5));
    let inv_sqrt = mat_func(&HermitianOperator::new(gram)?, |x| T::one() / x.sqrt())?;
    Ok(raw.iter().map(|a| a * &inv_sqrt).collect())
}

/// ‖Σ M†M − 𝟙‖_max
pub fn povm_completeness_error<T: Real>(ops: &[CMatrix<T>]) -> T {
    let dim = ops[0].dim();
    let mut acc = CMatrix::zeros(dim).expect("valid dim");
    for m in ops {
        acc = &acc + &(&m.adjoint() * m);
    }
    acc.max_abs_diff(&CMatrix::identity(dim).expect("valid dim"))
}

/// Post-measurement branches (p(l), M_l ρ M_l† / p(l)) of a generalized measurement.
pub fn povm_branches<T: Real>(ops: &[CMatrix<T>], rho: &DensityMatrix<T>) -> Result<Vec<(T, DensityMatrix<T>)>> {
    let mut out = Vec::with_capacity(ops.len());
    for m in ops {
        let un = rho.matrix().conjugate_by(m);
        let p = un.trace().re;
        if p < T::lit(crate::channels::BRANCH_PRUNE) {
            continue;
        }
        let un = (&un + &un.adjoint()).scale_real(T::lit(0.5));
        out.push((p, DensityMatrix::new(un.scale_real(T::one() / p))?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{measure_nonselective, projective_instrument};
    use crate::sampling::{random_density, random_hermitian, random_pure, random_unitary};
    use proptest::prelude::*;

    type M = CMatrix<f64>;

    fn two_level(gap: f64, pauli: M) -> HermitianOperator<f64> {
        HermitianOperator::new(pauli.scale_real(gap / 2.0)).unwrap()
    }

    /// S of a two-level Gibbs state with x = β·gap, written independently of the
    /// eigensolver.
    fn gibbs_entropy_closed_form(x: f64) -> f64 {
        (2.0 * (x / 2.0).cosh()).ln() - (x / 2.0) * (x / 2.0).tanh()
    }

    #[test]
    fn partition_function_examples() {
        let zero = GibbsSpec::new(HermitianOperator::<f64>::zero(2).unwrap(), 0.7).unwrap();
        assert!((partition_function(&zero) - 2.0).abs() < 1e-15);
        for (beta, omega) in [(0.3, 1.0), (2.0, 1.5), (7.0, 0.2)] {
            let spec = GibbsSpec::new(two_level(omega, M::pauli_z()), beta).unwrap();
            let expected = 2.0 * (beta * omega / 2.0).cosh();
            assert!((partition_function(&spec) - expected).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..50 {
            let h = random_hermitian::<f64, _>(&mut rng, 4);
            let u = random_unitary::<f64, _>(&mut rng, 4);
            let a = GibbsSpec::new(HermitianOperator::new(h.clone()).unwrap(), 1.3).unwrap();
            let b = GibbsSpec::new(HermitianOperator::new(h.conjugate_by(&u)).unwrap(), 1.3).unwrap();
            assert!((partition_function(&a) - partition_function(&b)).abs() < 1e-10);
        }
    }

    #[test]
    fn gibbs_state_limits() {
        let h = two_level(1.0, M::pauli_z());
        let cold = gibbs_state(&GibbsSpec::new(h.clone(), 50.0).unwrap()).unwrap();
        assert!(cold.matrix().get(1, 1).re >= 1.0 - 1e-10);
        let hot = gibbs_state(&GibbsSpec::new(h.clone(), 0.0).unwrap()).unwrap();
        assert!(hot.distance_max(&DensityMatrix::maximally_mixed(2).unwrap()) <= 1e-12);
        let mid = gibbs_state(&GibbsSpec::new(h.clone(), 1.7).unwrap()).unwrap();
        assert!(mid.matrix().commutator(h.matrix()).max_abs() <= 1e-10);
        assert!(GibbsSpec::new(h, -1.0).is_err());
    }

    #[test]
    fn free_energy_examples() {
        let h = two_level(1.0, M::pauli_x());
        let a = GibbsSpec::new(h.clone(), 2.0).unwrap();
        assert_eq!(free_energy_change(&a, &a).unwrap(), 0.0);
        let b = GibbsSpec::new(h.clone(), 3.0).unwrap();
        assert!(matches!(free_energy_change(&a, &b), Err(Error::Argument(_))));

        let beta = 1e-6;
        let h0 = GibbsSpec::new(two_level(2.0 / 3.0, M::pauli_z()), beta).unwrap();
        let h1 = GibbsSpec::new(two_level(1.0, M::pauli_x()), beta).unwrap();
        assert!(free_energy_change(&h0, &h1).unwrap().abs() <= 1e-5);

        for beta in [0.1, 1.0, 3.7] {
            let (w0, w1) = (2.0 / 3.0, 1.0);
            let h0 = GibbsSpec::new(two_level(w0, M::pauli_z()), beta).unwrap();
            let h1 = GibbsSpec::new(two_level(w1, M::pauli_x()), beta).unwrap();
            let expected = -((beta * w1 / 2.0).cosh() / (beta * w0 / 2.0).cosh()).ln() / beta;
            assert!((free_energy_change(&h0, &h1).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        assert!(von_neumann_entropy(&random_pure::<f64, _>(&mut rng, 4)).abs() < 1e-10);
        let half = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&half) - 2f64.ln()).abs() < 1e-15);
        for x in [0.1, 1.0, 3.18, 10.0] {
            let g = gibbs_state(&GibbsSpec::new(two_level(1.0, M::pauli_x()), x).unwrap()).unwrap();
            assert!((von_neumann_entropy(&g) - gibbs_entropy_closed_form(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let direct = -(0.96f64 * 0.96f64.ln() + 0.04 * 0.04f64.ln());
        let h = shannon_entropy(&[0.96, 0.04]).unwrap();
        assert!((h - direct).abs() < 1e-15);
        assert!((h - 0.1679).abs() < 5e-5);
        assert!(matches!(shannon_entropy(&[1.2, -0.2]), Err(Error::Argument(_))));
    }

    #[test]
    fn kl_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let rho = random_density::<f64, _>(&mut rng, 4);
            assert!(kl_divergence(&rho, &rho).unwrap().abs() < 1e-10);
        }
        let h = two_level(1.0, M::pauli_x());
        for x in [0.2, 1.0, 4.0] {
            let spec = GibbsSpec::new(h.clone(), x).unwrap();
            let g = gibbs_state(&spec).unwrap();
            let half = DensityMatrix::maximally_mixed(2).unwrap();
            // β[U − F] − S with U = 0, F = −β⁻¹ ln Z, S = ln 2
            let via_identity = (2.0 * (x / 2.0).cosh()).ln() - 2f64.ln();
            assert!((kl_divergence(&half, &g).unwrap() - via_identity).abs() < 1e-12);
            let excited = DensityMatrix::pure(&h.eig().eigenvectors()[1]).unwrap();
            let d = kl_divergence(&excited, &g).unwrap();
            assert!(d.is_finite() && d > 0.0);
        }
    }

    #[test]
    fn kl_signals_support_violation() {
        let zero = DensityMatrix::<f64>::basis_state(2, 0).unwrap();
        let one = DensityMatrix::<f64>::basis_state(2, 1).unwrap();
        assert!(matches!(kl_divergence(&zero, &one), Err(Error::InfiniteDivergence)));
        // support contained: finite
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((kl_divergence(&one, &half).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn kl_free_energy_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for i in 0..1000 {
            let dim = if i % 2 == 0 { 2 } else { 4 };
            let h = HermitianOperator::new(random_hermitian::<f64, _>(&mut rng, dim)).unwrap();
            let beta = 0.1 + 3.0 * (i as f64 / 1000.0);
            let spec = GibbsSpec::new(h.clone(), beta).unwrap();
            let rho = random_density(&mut rng, dim);
            let eq = gibbs_state(&spec).unwrap();
            let f = -partition_function(&spec).ln() / beta;
            let rhs = beta * (internal_energy(&rho, &h) - f) - von_neumann_entropy(&rho);
            assert!((kl_divergence(&rho, &eq).unwrap() - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn information_gain_examples() {
        let h0 = two_level(2.0 / 3.0, M::pauli_z());
        let inst = projective_instrument(&two_level(1.0, M::pauli_x())).unwrap();
        for beta in [0.0, 0.5, 4.77] {
            let rho = gibbs_state(&GibbsSpec::new(h0.clone(), beta).unwrap()).unwrap();
            let branches = measure_nonselective(&inst, &rho).unwrap();
            let gain = information_gain(&rho, branches.iter().map(|b| (b.probability, &b.state)));
            let pops = [rho.matrix().get(0, 0).re, rho.matrix().get(1, 1).re];
            assert!((gain - shannon_entropy(&pops).unwrap()).abs() < 1e-12);
            if beta == 0.0 {
                assert!((gain - 2f64.ln()).abs() < 1e-12);
            }
        }
        let eigenstate = DensityMatrix::<f64>::basis_state(2, 0).unwrap();
        let z_inst = projective_instrument(&two_level(1.0, M::pauli_z())).unwrap();
        let branches = measure_nonselective(&z_inst, &eigenstate).unwrap();
        let gain = information_gain(&eigenstate, branches.iter().map(|b| (b.probability, &b.state)));
        assert!(gain.abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let corr = JointDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!((mutual_information(&corr) - 2f64.ln()).abs() < 1e-15);
        let prod = JointDistribution::<f64>::new(vec![vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        assert!(mutual_information(&prod).abs() < 1e-15);
        for phi in [0.1f64, 0.7, 1.5, 2.9] {
            let s = (phi / 2.0).sin().powi(2);
            let d =
                JointDistribution::new(vec![vec![0.5 * (1.0 - s), 0.5 * s], vec![0.5 * s, 0.5 * (1.0 - s)]]).unwrap();
            let expected = 2f64.ln() - binary_entropy(s);
            assert!((mutual_information(&d) - expected).abs() < 1e-12);
        }
        assert!(JointDistribution::new(vec![vec![0.5, 0.6]]).is_err());
    }

    #[test]
    fn povm_construction() {
        for seed in 0..1000u64 {
            let dim = if seed % 2 == 0 { 2 } else { 4 };
            let ops = random_povm::<f64>(dim, 1 + (seed as usize % 4), seed).unwrap();
            assert!(povm_completeness_error(&ops) <= 1e-10);
        }
        let single = random_povm::<f64>(2, 1, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let rho = random_density::<f64, _>(&mut rng, 2);
        let branches = povm_branches(&single, &rho).unwrap();
        let gain = information_gain(&rho, branches.iter().map(|(p, s)| (*p, s)));
        assert!(gain.abs() < 1e-10);
        assert!(random_povm::<f64>(2, 0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn povm_information_gain_is_non_negative(seed in any::<u64>(), outcomes in 1usize..6, two_qubit in any::<bool>()) {
            let dim = if two_qubit { 4 } else { 2 };
            let ops = random_povm::<f64>(dim, outcomes, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let rho = random_density::<f64, _>(&mut rng, dim);
            let branches = povm_branches(&ops, &rho).unwrap();
            let gain = information_gain(&rho, branches.iter().map(|(p, s)| (*p, s)));
            prop_assert!(gain >= -1e-10);
        }

        #[test]
        fn mutual_information_is_bounded_by_marginal_entropies(w in proptest::collection::vec(0.0f64..1.0, 4)) {
            let total: f64 = w.iter().sum::<f64>() + 1e-9;
            let p: Vec<f64> = w.iter().map(|x| (x + 1e-9 / 4.0) / total).collect();
            let d = JointDistribution::new(vec![vec![p[0], p[1]], vec![p[2], p[3]]]).unwrap();
            let mi = mutual_information(&d);
            let hk = shannon_entropy(&d.marginal_k()).unwrap();
            let hl = shannon_entropy(&d.marginal_l()).unwrap();
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= hk.min(hl) + 1e-12);
        }
    }
}
