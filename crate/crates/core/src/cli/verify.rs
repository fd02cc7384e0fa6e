use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{channel_to_chi, process_distance, KrausChannel};
use crate::error::{Error, Result};
use crate::protocol::calibration::{kt_from_populations, REFERENCE_TABLE};
use crate::protocol::circuit::{measurement_chi, protocol_chi};
use crate::protocol::variants::{non_unital_protocol, random_unital_protocol};
use crate::protocol::{run_protocol, tradeoff_report, ProtocolConfig, ProtocolEnsemble};
use crate::qmat::{herm_eig, HermitianOperator};
use crate::sampling::{random_density, random_hermitian, random_unitary};
use crate::thermo::{
    gibbs_state, information_gain, internal_energy, kl_divergence, partition_function, povm_branches, random_povm,
    von_neumann_entropy, GibbsSpec,
};
use crate::workstats::{enumerate_paths, fluctuation_functional};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces the feedback in the fluctuation suite by a non-unital channel.
    pub inject_non_unital: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    /// First failure, if any.
    pub failure: Option<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failure.is_none())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            match &s.failure {
                None => writeln!(f, "[ok]   {:<12} {:>5} checks  {:.2}s", s.name, s.checks, s.seconds)?,
                Some(msg) => writeln!(f, "[FAIL] {:<12} {msg}", s.name)?,
            }
        }
        let failed = self.suites.iter().filter(|s| s.failure.is_some()).count();
        writeln!(f, "{} suites, {failed} failed", self.suites.len())
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

fn run_suite(name: &'static str, body: impl FnOnce() -> Result<usize>) -> SuiteResult {
    let start = Instant::now();
    let (checks, failure) = match body() {
        Ok(n) => (n, None),
        Err(e) => (0, Some(e.to_string())),
    };
    SuiteResult { name, checks, failure, seconds: start.elapsed().as_secs_f64() }
}

fn grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for row in REFERENCE_TABLE {
        for i in 0..9 {
            out.push((row.kt_pev, PI * i as f64 / 8.0));
        }
    }
    out
}

fn linear_algebra(seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..200 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        let h = HermitianOperator::new(random_hermitian::<f64, _>(&mut rng, dim))?;
        let eig = herm_eig(&h);
        let err = eig.reconstruct().max_abs_diff(h.matrix());
        ensure(err <= 1e-10, || format!("eigen reconstruction error {err:e}"))?;
        ensure(eig.orthonormality_error() <= 1e-10, || "eigenvectors not orthonormal".into())?;
    }
    Ok(200)
}

fn channels(seed: u64, cfg: &ProtocolConfig<f64>) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..100 {
        let ops = (0..3).map(|_| random_unitary::<f64, _>(&mut rng, 2).scale_real((1.0f64 / 3.0).sqrt())).collect();
        let ch = KrausChannel::new(ops, "mixed unitary")?;
        let chi = channel_to_chi(&ch)?;
        ensure(chi.max_imag() <= 1e-10, || format!("unital χ has imaginary part {:e}", chi.max_imag()))?;
        let rho = random_density::<f64, _>(&mut rng, 2);
        let diff = chi.apply_operator(rho.matrix())?.max_abs_diff(ch.apply(&rho)?.matrix());
        ensure(diff <= 1e-9, || format!("χ reconstruction error {diff:e}"))?;
    }
    let m = measurement_chi(cfg)?;
    for s in 0..4 {
        for l in 0..4 {
            let want = if s == l && s < 2 { 0.5 } else { 0.0 };
            let got = m.get(s, l);
            ensure((got.re - want).abs() <= 1e-12 && got.im.abs() <= 1e-12, || {
                format!("measurement χ[{s}][{l}] = {got}")
            })?;
        }
    }
    Ok(101)
}

fn thermodynamics(seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    for i in 0..200 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        let h = HermitianOperator::new(random_hermitian::<f64, _>(&mut rng, dim))?;
        let beta = 0.1 + 0.01 * i as f64;
        let spec = GibbsSpec::new(h.clone(), beta)?;
        let rho = random_density::<f64, _>(&mut rng, dim);
        let f = -partition_function(&spec).ln() / beta;
        let rhs = beta * (internal_energy(&rho, &h) - f) - von_neumann_entropy(&rho);
        let lhs = kl_divergence(&rho, &gibbs_state(&spec)?)?;
        ensure((lhs - rhs).abs() <= 1e-10, || format!("relative-entropy identity off by {:e}", lhs - rhs))?;
        let ops = random_povm::<f64>(dim, 1 + i % 4, seed.wrapping_add(i as u64))?;
        let branches = povm_branches(&ops, &rho)?;
        let gain = information_gain(&rho, branches.iter().map(|(p, s)| (*p, s)));
        ensure(gain >= -1e-10, || format!("negative information gain {gain:e}"))?;
    }
    Ok(400)
}

fn protocol_grid() -> Result<usize> {
    let mut n = 0;
    for (kt, phi) in grid() {
        let cfg = ProtocolConfig::new(kt, phi)?;
        let r = tradeoff_report(&run_protocol(&cfg)?)?;
        r.check().map_err(|e| Error::Invariant(format!("kT = {kt}, φ = {phi}: {e}")))?;
        if phi == 0.0 {
            ensure(r.sigma < 0.0 && r.avg_kl <= 1e-10, || format!("no rectification at kT = {kt}"))?;
        }
        n += 1;
    }
    Ok(n)
}

fn fluctuation(seed: u64, inject_non_unital: bool) -> Result<usize> {
    let check = |ens: &ProtocolEnsemble<f64>, what: &str| -> Result<()> {
        let paths = enumerate_paths(ens)?;
        let f = fluctuation_functional(&paths, ens.joint(), ens.beta_delta_f(), ens.beta())?;
        ensure((f - 1.0).abs() <= 1e-9, || format!("{what}: fluctuation functional = {f}"))
    };
    let mut n = 0;
    for (kt, phi) in grid() {
        let cfg = ProtocolConfig::new(kt, phi)?;
        let ens = if inject_non_unital { non_unital_protocol(&cfg, 0.3)? } else { run_protocol(&cfg)? };
        check(&ens, &format!("kT = {kt}, φ = {phi}"))?;
        n += 1;
    }
    for i in 0..100 {
        let s = seed.wrapping_mul(1000).wrapping_add(i);
        check(&random_unital_protocol(s)?, &format!("random protocol {s}"))?;
        n += 1;
    }
    Ok(n)
}

fn tomography(kt: f64) -> Result<usize> {
    let reference = protocol_chi(&ProtocolConfig::new(kt, 0.0)?)?;
    let mut last = -1.0;
    for i in 0..9 {
        let phi = PI / 2.0 * i as f64 / 8.0;
        let d = process_distance(&protocol_chi(&ProtocolConfig::new(kt, phi)?)?, &reference)?;
        if i == 0 {
            ensure(d.abs() <= 1e-12, || format!("δ(0) = {d}"))?;
        }
        ensure(d >= last - 1e-12, || format!("δ decreases at φ = {phi}"))?;
        last = d;
    }
    Ok(9)
}

fn calibration() -> Result<usize> {
    for row in REFERENCE_TABLE {
        let kt = kt_from_populations(row.ground_population, 1.0 - row.ground_population, 2.0)?;
        ensure((kt - row.kt_pev).abs() <= row.kt_uncertainty_pev, || {
            format!(
                "populations {} give kT = {kt}, expected {} ± {}",
                row.ground_population, row.kt_pev, row.kt_uncertainty_pev
            )
        })?;
    }
    Ok(REFERENCE_TABLE.len())
}

/// Runs every invariant suite. Suites are independent; a failing suite does not
/// stop the others.
pub fn cmd_verify(opts: &VerifyOptions) -> VerifyReport {
    let base = ProtocolConfig::new(REFERENCE_TABLE[0].kt_pev, 0.0).expect("reference configuration is valid");
    let suites = vec![
        run_suite("qmat", || linear_algebra(opts.seed)),
        run_suite("channels", || channels(opts.seed, &base)),
        run_suite("thermo", || thermodynamics(opts.seed)),
        run_suite("protocol", protocol_grid),
        run_suite("workstats", || fluctuation(opts.seed, opts.inject_non_unital)),
        run_suite("tomography", || tomography(REFERENCE_TABLE[0].kt_pev)),
        run_suite("calibration", calibration),
    ];
    VerifyReport { suites }
}
