use std::f64::consts::PI;
use std::fs::File;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::calibration::reference_temperatures;
use crate::protocol::{
    demon_condition, run_protocol, tradeoff_report, ProtocolConfig, Temperature, DEFAULT_OMEGA0_KHZ, DEFAULT_OMEGA1_KHZ,
};

pub const CSV_HEADER: [&str; 10] = [
    "kT_peV",
    "phi_rad",
    "p01",
    "sigma_nats",
    "i_gain_nats",
    "avg_kl_nats",
    "delta_s_f_nats",
    "mutual_info_nats",
    "fluct_avg",
    "demon",
];

/// Rows whose fluctuation functional strays further than this from 1 are refused.
pub const FLUCT_WRITE_TOL: f64 = 1e-9;

/// How the temperature values of a grid are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemperatureAxis {
    KtPev,
    BetaInternal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub axis: TemperatureAxis,
    pub temperatures: Vec<f64>,
    pub phis: Vec<f64>,
    pub omega0_khz: f64,
    pub omega1_khz: f64,
    pub noise_q: f64,
}

fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    (0..steps).map(|i| min + (max - min) * i as f64 / (steps - 1) as f64).collect()
}

fn axis(name: &str, range: (Option<f64>, Option<f64>, Option<usize>)) -> Result<Option<Vec<f64>>> {
    match range {
        (None, None, None) => Ok(None),
        (Some(min), Some(max), Some(steps)) => {
            if steps == 0 {
                return Err(Error::Argument(format!("{name}-steps must be at least 1")));
            }
            if !(min.is_finite() && max.is_finite() && min <= max) {
                return Err(Error::Argument(format!("{name} range [{min}, {max}] is not ordered")));
            }
            Ok(Some(linspace(min, max, steps)))
        }
        _ => Err(Error::Argument(format!("{name}-min, {name}-max and {name}-steps must be given together"))),
    }
}

impl SweepGrid {
    /// Builds a grid from optional (min, max, steps) triples. A missing kT triple
    /// selects the nine reference temperatures; a missing φ triple selects
    /// {0, π/8, π/4, 3π/8, π/2}.
    pub fn from_ranges(
        kt: (Option<f64>, Option<f64>, Option<usize>),
        phi: (Option<f64>, Option<f64>, Option<usize>),
        beta_internal: bool,
    ) -> Result<Self> {
        let axis_kind = if beta_internal { TemperatureAxis::BetaInternal } else { TemperatureAxis::KtPev };
        let temperatures = match axis("kt", kt)? {
            Some(v) => v,
            None if beta_internal => {
                return Err(Error::Argument("--beta-internal needs explicit --kt-min/--kt-max/--kt-steps".into()))
            }
            None => reference_temperatures(),
        };
        match axis_kind {
            TemperatureAxis::KtPev if temperatures[0] <= 0.0 => {
                return Err(Error::Argument("kt-min must be positive".into()))
            }
            TemperatureAxis::BetaInternal if temperatures[0] < 0.0 => {
                return Err(Error::Argument("βħω₁ must be non-negative".into()))
            }
            _ => {}
        }
        let phis = axis("phi", phi)?.unwrap_or_else(|| (0..5).map(|i| PI * i as f64 / 8.0).collect());
        if phis[0] < 0.0 || phis[phis.len() - 1] > PI {
            return Err(Error::Argument("phi range must lie within [0, π]".into()));
        }
        Ok(Self {
            axis: axis_kind,
            temperatures,
            phis,
            omega0_khz: DEFAULT_OMEGA0_KHZ,
            omega1_khz: DEFAULT_OMEGA1_KHZ,
            noise_q: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.temperatures.len() * self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Configurations in output order: temperature outer, φ inner.
    pub fn configs(&self) -> Result<Vec<ProtocolConfig<f64>>> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.temperatures {
            let temperature = match self.axis {
                TemperatureAxis::KtPev => Temperature::KtPev(t),
                TemperatureAxis::BetaInternal => Temperature::BetaInternal(t),
            };
            for &phi in &self.phis {
                out.push(
                    ProtocolConfig::with_temperature(temperature, phi)?
                        .with_frequencies(self.omega0_khz, self.omega1_khz)?
                        .with_noise(self.noise_q)?,
                );
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub kt_pev: f64,
    pub phi: f64,
    pub p01: f64,
    pub sigma: f64,
    pub i_gain: f64,
    pub avg_kl: f64,
    pub delta_s_f: f64,
    pub mutual_info: f64,
    pub fluct_avg: f64,
    pub demon: bool,
}

impl SweepRow {
    pub fn evaluate(cfg: &ProtocolConfig<f64>) -> Result<Self> {
        let ens = run_protocol(cfg)?;
        let r = tradeoff_report(&ens)?;
        Ok(Self {
            kt_pev: cfg.kt_pev(),
            phi: cfg.phi(),
            p01: ens.error_matrix()[0][1],
            sigma: r.sigma,
            i_gain: r.i_gain,
            avg_kl: r.avg_kl,
            delta_s_f: r.delta_s_f,
            mutual_info: r.mutual_info,
            fluct_avg: r.fluct_avg,
            demon: demon_condition(&r),
        })
    }

    fn record(&self) -> [String; 10] {
        [
            self.kt_pev.to_string(),
            self.phi.to_string(),
            self.p01.to_string(),
            self.sigma.to_string(),
            self.i_gain.to_string(),
            self.avg_kl.to_string(),
            self.delta_s_f.to_string(),
            self.mutual_info.to_string(),
            self.fluct_avg.to_string(),
            u8::from(self.demon).to_string(),
        ]
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn compute_rows(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.configs()?.par_iter().map(SweepRow::evaluate).collect()
}

/// Writes the sweep CSV and returns the number of rows.
pub fn cmd_sweep(grid: &SweepGrid, out: &Path) -> Result<usize> {
    let rows = compute_rows(grid)?;
    if let Some(bad) = rows.iter().find(|r| (r.fluct_avg - 1.0).abs() > FLUCT_WRITE_TOL) {
        return Err(Error::Invariant(format!(
            "fluctuation functional {} at kT = {} peV, φ = {}",
            bad.fluct_avg, bad.kt_pev, bad.phi
        )));
    }
    let mut wtr = csv::Writer::from_writer(File::create(out)?);
    wtr.write_record(CSV_HEADER)?;
    for row in &rows {
        wtr.write_record(row.record())?;
    }
    wtr.flush()?;
    Ok(rows.len())
}
