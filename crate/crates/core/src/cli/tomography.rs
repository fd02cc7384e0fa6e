use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use crate::channels::{process_distance, ChiMatrix};
use crate::error::{Error, Result};
use crate::protocol::circuit::{controlled_feedback_chi, measurement_chi, protocol_chi};
use crate::protocol::ProtocolConfig;

/// Temperature used for tomography when none is given: the coldest reference row.
pub const DEFAULT_TOMOGRAPHY_KT_PEV: f64 = 2.6;

/// Number of φ samples on [0, π/2] written to `delta_curve.csv`.
pub const CURVE_POINTS: usize = 9;

#[derive(Clone, Debug, PartialEq)]
pub struct TomographySummary {
    /// δ between the ideal protocol at φ and the ideal protocol at φ = 0.
    pub delta_ideal: f64,
    /// δ between the noisy protocol at φ and the ideal protocol at φ = 0.
    pub delta_noisy: Option<f64>,
    /// (φ, δ_ideal, δ_noisy) on [0, π/2].
    pub curve: Vec<(f64, f64, Option<f64>)>,
}

fn write_chi(dir: &Path, name: &str, chi: &ChiMatrix<f64>) -> Result<()> {
    fs::write(dir.join(name), chi.to_text())?;
    Ok(())
}

/// Writes χ matrices of the measurement, of the full protocol (ideal, φ = 0
/// reference, and noisy when `noise_q > 0`) and of the controlled feedback gate,
/// together with δ(φ) and a δ curve over [0, π/2].
pub fn cmd_tomography(phi: f64, noise_q: f64, kt_pev: f64, out_dir: &Path) -> Result<TomographySummary> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Argument(format!("mismatch angle {phi} outside [0, π]")));
    }
    let ideal = ProtocolConfig::new(kt_pev, phi)?;
    let noisy = (noise_q > 0.0).then(|| ideal.with_noise(noise_q)).transpose()?;
    let reference = protocol_chi(&ProtocolConfig::new(kt_pev, 0.0)?)?;

    fs::create_dir_all(out_dir)?;
    write_chi(out_dir, "chi_measurement.txt", &measurement_chi(&ideal)?)?;
    let chi = protocol_chi(&ideal)?;
    write_chi(out_dir, "chi_protocol.txt", &chi)?;
    write_chi(out_dir, "chi_protocol_ideal_phi0.txt", &reference)?;
    write_chi(out_dir, "chi_feedback_joint.txt", &controlled_feedback_chi(&ideal)?)?;
    let delta_ideal = process_distance(&chi, &reference)?;
    let delta_noisy = match &noisy {
        Some(cfg) => {
            let chi_noisy = protocol_chi(cfg)?;
            write_chi(out_dir, "chi_protocol_noisy.txt", &chi_noisy)?;
            Some(process_distance(&chi_noisy, &reference)?)
        }
        None => None,
    };

    let mut curve = Vec::with_capacity(CURVE_POINTS);
    for i in 0..CURVE_POINTS {
        let p = PI / 2.0 * i as f64 / (CURVE_POINTS - 1) as f64;
        let cfg = ProtocolConfig::new(kt_pev, p)?;
        let d = process_distance(&protocol_chi(&cfg)?, &reference)?;
        let dn = if noise_q > 0.0 {
            Some(process_distance(&protocol_chi(&cfg.with_noise(noise_q)?)?, &reference)?)
        } else {
            None
        };
        curve.push((p, d, dn));
    }

    let mut summary = format!("phi_rad={phi}\nkT_peV={kt_pev}\ndelta_ideal={delta_ideal}\n");
    if let Some(d) = delta_noisy {
        summary.push_str(&format!("noise_q={noise_q}\ndelta_noisy={d}\n"));
    }
    fs::write(out_dir.join("delta.txt"), summary)?;

    let mut wtr = csv::Writer::from_path(out_dir.join("delta_curve.csv"))?;
    if noise_q > 0.0 {
        wtr.write_record(["phi_rad", "delta_ideal", "delta_noisy"])?;
    } else {
        wtr.write_record(["phi_rad", "delta_ideal"])?;
    }
    for (p, d, dn) in &curve {
        let mut rec = vec![p.to_string(), d.to_string()];
        if let Some(x) = dn {
            rec.push(x.to_string());
        }
        wtr.write_record(rec)?;
    }
    wtr.flush()?;

    Ok(TomographySummary { delta_ideal, delta_noisy, curve })
}
