use super::calibration::reference_temperatures;
use super::circuit::{readout_error_matrix, ProtocolCircuit};
use super::*;
use crate::channels::KrausChannel;
use crate::thermo::binary_entropy;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};

type M = CMatrix<f64>;

/// Entropy of a two-level Gibbs state at x = β·splitting.
fn s_gibbs(x: f64) -> f64 {
    (2.0 * (x / 2.0).cosh()).ln() - (x / 2.0) * (x / 2.0).tanh()
}

fn cfg(kt: f64, phi: f64) -> ProtocolConfig<f64> {
    ProtocolConfig::new(kt, phi).unwrap()
}

fn beta_cfg(beta: f64, phi: f64) -> ProtocolConfig<f64> {
    ProtocolConfig::from_beta_internal(beta, phi).unwrap()
}

/// σx eigenkets (|−x⟩, |+x⟩), built by hand.
fn x_kets() -> [Vec<crate::qmat::C<f64>>; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [vec![crate::qmat::c(h, 0.0), crate::qmat::c(-h, 0.0)], vec![crate::qmat::c(h, 0.0), crate::qmat::c(h, 0.0)]]
}

fn x_gibbs(beta: f64) -> DensityMatrix<f64> {
    let (_, _, h2) = build_hamiltonians(&beta_cfg(beta, 0.0)).unwrap();
    gibbs_state(&GibbsSpec::new(h2, beta).unwrap()).unwrap()
}

#[test]
fn config_validation() {
    assert!(ProtocolConfig::new(0.0, 0.0).is_err());
    assert!(ProtocolConfig::new(f64::NAN, 0.0).is_err());
    assert!(ProtocolConfig::new(2.6, -0.1).is_err());
    assert!(ProtocolConfig::new(2.6, 3.2).is_err());
    assert!(ProtocolConfig::from_beta_internal(-1.0, 0.0).is_err());
    assert!(cfg(2.6, 0.0).with_frequencies(0.0, 3.0).is_err());
    assert!(cfg(2.6, 0.0).with_noise(1.0).is_err());
    let c = cfg(2.6, PI);
    assert_eq!(c.omega0_khz(), 2.0);
    assert_eq!(c.omega1_khz(), 3.0);
    assert_eq!(c.noise_q(), 0.0);
    assert!((c.beta_internal() - 12.407003088 / 2.6).abs() < 1e-8);
    assert!((beta_cfg(c.beta_internal(), 0.0).kt_pev() - 2.6).abs() < 1e-12);
    assert!(beta_cfg(0.0, 0.0).kt_pev().is_infinite());
}

#[test]
fn hamiltonian_scales() {
    let c = cfg(2.6, 0.0);
    let (h0, h1, h2) = build_hamiltonians(&c).unwrap();
    let gap = |h: &HermitianOperator<f64>| {
        let e = h.eig();
        e.eigenvalues()[1] - e.eigenvalues()[0]
    };
    assert!((gap(&h1) - 1.0).abs() < 1e-14);
    assert!((gap(&h1) * c.energy_unit_pev() - 12.41).abs() < 0.005);
    assert!((gap(&h0) * c.energy_unit_pev() - 8.27).abs() < 0.005);
    assert!((gap(&h1) / gap(&h0) - 1.5).abs() < 1e-14);
    assert!(h1.matrix().max_abs_diff(h2.matrix()) == 0.0);
    assert!(h0.matrix().max_abs_diff(&M::pauli_z().scale_real(1.0 / 3.0)) < 1e-15);
}

#[test]
fn quench_leaves_state_unchanged() {
    let hot = sudden_quench_state(&beta_cfg(0.0, 0.0)).unwrap();
    assert!(hot.distance_max(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-12);
    for kt in reference_temperatures() {
        let c = cfg(kt, 0.0);
        let rho = sudden_quench_state(&c).unwrap();
        for ket in x_kets() {
            assert!((rho.population(&ket) - 0.5).abs() < 1e-12);
        }
        // Gibbs state of ½(ω₀/ω₁)σz by hand; the excited level is |0⟩
        let x0 = c.beta_internal() * c.omega_ratio();
        let excited = 1.0 / (1.0 + x0.exp());
        assert!((rho.matrix().get(0, 0).re - excited).abs() < 1e-12);
        assert!((von_neumann_entropy(&rho) - s_gibbs(x0)).abs() < 1e-12);
    }
}

#[test]
fn gamma_limits_and_gibbs_identity() {
    assert!(feedback_gamma(1e3f64).unwrap().abs() < 1e-12);
    assert!(feedback_gamma(f64::INFINITY).unwrap().abs() < 1e-12);
    assert!((feedback_gamma(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!(feedback_gamma(-0.1).is_err());
    for i in 0..200 {
        let x = 0.05 * i as f64;
        let g = feedback_gamma(x).unwrap();
        assert!(g > 0.0 || x > 30.0);
        assert!(g <= PI / 2.0 + 1e-15);
        assert!(((g / 2.0).cos().powi(2) - 1.0 / (1.0 + (-x).exp())).abs() < 1e-14);
    }
    // with the minus sign the arccos argument (1 − e^{−x})^{−1/2} exceeds 1 for every x > 0
    for x in [0.1f64, 1.0, 10.0] {
        assert!((1.0 - (-x).exp()).powf(-0.5) > 1.0);
    }
}

#[test]
fn feedback_operator_structure() {
    for beta in [0.0, 0.3, 1.0, 4.77] {
        let v = feedback_unitaries(&beta_cfg(beta, 0.0)).unwrap();
        assert!(v.v1().max_abs_diff(&(v.v0() * &M::pauli_x())) < 1e-12);
        assert!(v.v0().unitarity_error() < 1e-12);
        // the frame change sends |+x⟩ to |0⟩ and |−x⟩ to |1⟩ up to phase
        let b_dag = v.frame_change().adjoint();
        let [minus, plus] = x_kets();
        assert!((DensityMatrix::pure(&b_dag.apply(&plus)).unwrap().matrix().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!((DensityMatrix::pure(&b_dag.apply(&minus)).unwrap().matrix().get(1, 1).re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn feedback_thermalizes_each_branch_at_zero_mismatch() {
    for i in 0..=40 {
        let beta = 0.25 * i as f64;
        let c = beta_cfg(beta, 0.0);
        let v = feedback_unitaries(&c).unwrap();
        let (_, _, h2) = build_hamiltonians(&c).unwrap();
        let dephase = KrausChannel::dephasing(&h2.eig()).unwrap();
        let target = x_gibbs(beta);
        for (k, ket) in x_kets().iter().enumerate() {
            let branch = DensityMatrix::pure(ket).unwrap();
            let f = KrausChannel::compose(&dephase, &KrausChannel::unitary(&v.lab(k)).unwrap()).unwrap();
            let out = f.apply(&branch).unwrap();
            assert!(out.distance_max(&target) < 1e-10, "β = {beta}, k = {k}");
            assert!(kl_divergence(&out, &target).unwrap() <= 1e-10);
            if beta == 0.0 {
                assert!(out.distance_max(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-12);
            }
        }
    }
}

#[test]
fn final_dephasing_costs_no_energy() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(77);
    let c = cfg(4.2, 0.6);
    let (_, _, h2) = build_hamiltonians(&c).unwrap();
    let dephase = KrausChannel::dephasing(&h2.eig()).unwrap();
    assert!(dephase.is_unital());
    for _ in 0..100 {
        let rho = crate::sampling::random_density::<f64, _>(&mut rng, 2);
        let after = dephase.apply(&rho).unwrap();
        assert!((h2.expectation(&rho) - h2.expectation(&after)).abs() < 1e-10);
    }
}

#[test]
fn joint_statistics_of_the_memory() {
    let zero = run_protocol(&cfg(2.6, 0.0)).unwrap();
    let j = zero.joint();
    assert!((j.get(0, 0) - 0.5).abs() < 1e-12 && (j.get(1, 1) - 0.5).abs() < 1e-12);
    assert!(j.get(0, 1).abs() < 1e-12 && j.get(1, 0).abs() < 1e-12);

    let flipped = run_protocol(&cfg(2.6, PI)).unwrap();
    let j = flipped.joint();
    assert!((j.get(0, 1) - 0.5).abs() < 1e-12 && (j.get(1, 0) - 0.5).abs() < 1e-12);

    for i in 0..=16 {
        let phi = PI * i as f64 / 16.0;
        let c = cfg(5.9, phi);
        let ens = run_protocol(&c).unwrap();
        let s = (phi / 2.0).sin().powi(2);
        let em = ens.error_matrix();
        assert!((em[0][1] - s).abs() < 1e-12 && (em[1][0] - s).abs() < 1e-12);
        assert!((c.error_probability() - s).abs() < 1e-15);
        for p in ens.joint().marginal_k().into_iter().chain(ens.joint().marginal_l()) {
            assert!((p - 0.5).abs() < 1e-12);
        }
        let total: f64 = ens.branches().iter().map(|b| b.joint_prob).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn noisy_readout_statistics() {
    let q = 0.2;
    let c = cfg(3.4, 0.9).with_noise(q).unwrap();
    let em = readout_error_matrix(&c).unwrap();
    let s = (0.45f64).sin().powi(2);
    assert!((em[0][1] - ((1.0 - q) * s + q / 2.0)).abs() < 1e-12);
    assert!((em[0][0] - ((1.0 - q) * (1.0 - s) + q / 2.0)).abs() < 1e-12);
}

#[test]
fn coherent_circuit_matches_branch_assembly() {
    for &q in &[0.0, 0.05] {
        for kt in [2.6, 7.0, 13.8] {
            for i in 0..=8 {
                let c = cfg(kt, PI * i as f64 / 8.0).with_noise(q).unwrap();
                let ens = run_protocol(&c).unwrap();
                let circuit = ProtocolCircuit::new(&c).unwrap();
                let coherent = circuit.apply(ens.post_quench_state()).unwrap();
                let assembled = ens.average_final_state().unwrap();
                assert!(coherent.distance_max(&assembled) < 1e-12, "q = {q}, kT = {kt}, i = {i}");
            }
        }
    }
}

#[test]
fn zero_mismatch_closed_forms() {
    for kt in reference_temperatures() {
        let c = cfg(kt, 0.0);
        let x1 = c.beta_internal();
        let x0 = x1 * c.omega_ratio();
        let r = tradeoff_report(&run_protocol(&c).unwrap()).unwrap();
        assert!((r.sigma - (s_gibbs(x1) - s_gibbs(x0))).abs() < 1e-9, "kT = {kt}");
        assert!(r.sigma < 0.0);
        assert!((r.i_gain - s_gibbs(x0)).abs() < 1e-10);
        assert!((r.delta_s_f - s_gibbs(x1)).abs() < 1e-10);
        assert!(r.avg_kl.abs() <= 1e-10);
        assert!((r.mutual_info - LN_2).abs() < 1e-12);
        // information gain equals the Shannon entropy of the H₀ populations
        let p_e = 1.0 / (1.0 + x0.exp());
        assert!((r.i_gain - binary_entropy(p_e)).abs() < 1e-12);
        assert!(demon_condition(&r));
        r.check().unwrap();
    }
}

#[test]
fn infinite_temperature_limit() {
    for phi in [0.0, PI / 4.0, PI / 2.0, PI] {
        let r = tradeoff_report(&run_protocol(&beta_cfg(0.0, phi)).unwrap()).unwrap();
        assert!(r.sigma.abs() < 1e-12);
        assert!((r.i_gain - LN_2).abs() < 1e-12);
        assert!((r.delta_s_f - LN_2).abs() < 1e-12);
        assert!(r.avg_kl.abs() < 1e-12);
        assert!(!demon_condition(&r));
    }
    let r = tradeoff_report(&run_protocol(&beta_cfg(1e-6, PI / 2.0)).unwrap()).unwrap();
    assert!(!demon_condition(&r));
}

#[test]
fn information_gain_ignores_the_mismatch() {
    for kt in [2.6, 4.9, 10.7] {
        let base = tradeoff_report(&run_protocol(&cfg(kt, 0.0)).unwrap()).unwrap().i_gain;
        for i in 1..=20 {
            let r = tradeoff_report(&run_protocol(&cfg(kt, PI * i as f64 / 20.0)).unwrap()).unwrap();
            assert!((r.i_gain - base).abs() <= 1e-10);
        }
    }
}

#[test]
fn mutual_information_follows_readout_error() {
    for i in 1..=24 {
        let phi = PI * i as f64 / 24.0;
        let r = tradeoff_report(&run_protocol(&cfg(3.4, phi)).unwrap()).unwrap();
        let expected = LN_2 - binary_entropy((phi / 2.0).sin().powi(2));
        assert!((r.mutual_info - expected).abs() < 1e-10);
    }
}

/// 20 × 20 grid in (kT, φ) used by several identities below.
fn grid() -> Vec<ProtocolConfig<f64>> {
    let mut out = Vec::new();
    for a in 0..20 {
        let kt = 1.0 + 19.0 * a as f64 / 19.0;
        for b in 0..20 {
            out.push(cfg(kt, PI * b as f64 / 19.0));
        }
    }
    out
}

#[test]
fn report_identities_on_grid() {
    for c in grid() {
        let r = tradeoff_report(&run_protocol(&c).unwrap()).unwrap();
        assert!(r.decomposition_residual().abs() <= 1e-9, "{c:?}");
        assert!(r.sigma + r.mutual_info >= -1e-9);
        assert!(r.sigma + r.i_gain >= -1e-9);
        assert!((r.fluct_avg - 1.0).abs() <= 1e-10);
        r.check().unwrap();
        assert_eq!(demon_condition(&r), r.sigma < -1e-9, "{c:?}: {r:?}");
    }
}

#[test]
fn information_gain_below_mutual_information_at_zero_mismatch() {
    for i in 0..=40 {
        let beta = 0.1 * i as f64;
        let r = tradeoff_report(&run_protocol(&beta_cfg(beta, 0.0)).unwrap()).unwrap();
        assert!(r.i_gain <= r.mutual_info + 1e-12);
    }
    let hot = tradeoff_report(&run_protocol(&beta_cfg(1e-4, 0.0)).unwrap()).unwrap();
    assert!(hot.mutual_info - hot.i_gain <= 1e-6);
}

#[test]
fn information_gain_can_exceed_mutual_information_with_mismatch() {
    // at φ = π/2 the readout is uncorrelated (⟨I⟩ = 0) while I_gain stays positive
    let r = tradeoff_report(&run_protocol(&cfg(2.6, PI / 2.0)).unwrap()).unwrap();
    assert!(r.mutual_info.abs() < 1e-12);
    assert!(r.i_gain > 0.1);
}

#[test]
fn noisy_protocol_keeps_the_identities() {
    for q in [0.01, 0.05, 0.3] {
        for phi in [0.0, PI / 3.0] {
            let ens = run_protocol(&cfg(4.2, phi).with_noise(q).unwrap()).unwrap();
            assert!(ens.feedback().iter().all(KrausChannel::is_unital));
            let r = tradeoff_report(&ens).unwrap();
            r.check().unwrap();
            assert!((r.fluct_avg - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn report_check_rejects_inconsistent_values() {
    let good = tradeoff_report(&run_protocol(&cfg(2.6, 0.0)).unwrap()).unwrap();
    let mut bad = good;
    bad.sigma += 1e-6;
    assert!(matches!(bad.check(), Err(Error::Invariant(_))));
    let below =
        TradeoffReport { sigma: -1.0, i_gain: 0.5, avg_kl: 0.0, delta_s_f: -0.5, mutual_info: 0.5, fluct_avg: 1.0 };
    assert!(below.check().is_err());
}

#[test]
fn random_unital_protocols_are_consistent() {
    for seed in 0..20 {
        let ens = variants::random_unital_protocol::<f64>(seed).unwrap();
        let r = tradeoff_report(&ens).unwrap();
        assert!(r.decomposition_residual().abs() < 1e-9);
        assert!((r.fluct_avg - 1.0).abs() < 1e-9);
        assert!(r.sigma + r.mutual_info >= -1e-9);
    }
}

#[test]
fn single_precision_run() {
    let ens = run_protocol(&ProtocolConfig::<f32>::new(2.6, 0.0).unwrap()).unwrap();
    let r = tradeoff_report(&ens).unwrap();
    assert!(r.sigma < 0.0);
    assert!((r.fluct_avg - 1.0).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_hold_for_arbitrary_settings(beta in 0.0f64..8.0, phi in 0.0f64..PI, w0 in 0.5f64..5.0, w1 in 0.5f64..5.0) {
        let c = beta_cfg(beta, phi).with_frequencies(w0, w1).unwrap();
        let r = tradeoff_report(&run_protocol(&c).unwrap()).unwrap();
        prop_assert!(r.decomposition_residual().abs() <= 1e-9);
        prop_assert!((r.fluct_avg - 1.0).abs() <= 1e-10);
        prop_assert!(r.sigma + r.mutual_info >= -1e-9);
        prop_assert!(r.sigma + r.i_gain >= -1e-9);
    }
}
