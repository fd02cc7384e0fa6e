//! Conversions between laboratory units (kHz, peV) and the internal energy unit.
//!
//! Internally every energy is measured in units of ħω₁, the level splitting of
//! the post-quench Hamiltonian, so an inverse temperature is the dimensionless
//! number βħω₁.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Planck constant in eV·s (CODATA 2018, exact).
pub const PLANCK_EV_S: f64 = 4.135667696e-15;

/// Energy ħω of a mode at ω/2π = 1 kHz, in peV.
pub const PEV_PER_KHZ: f64 = PLANCK_EV_S * 1e3 * 1e12;

/// ħω in peV for a frequency ω/2π given in kHz.
pub fn hbar_omega_pev<T: Real>(freq_khz: T) -> T {
    T::lit(PEV_PER_KHZ) * freq_khz
}

/// βħω₁ from a temperature k_BT in peV.
pub fn beta_internal_from_kt<T: Real>(kt_pev: T, omega1_khz: T) -> Result<T> {
    if !(kt_pev.is_finite() && kt_pev > T::zero()) {
        return Err(Error::Argument(format!("k_BT must be positive and finite, got {kt_pev:?}")));
    }
    Ok(hbar_omega_pev(omega1_khz) / kt_pev)
}

/// k_BT in peV from βħω₁; infinite at β = 0.
pub fn kt_from_beta_internal<T: Real>(beta_internal: T, omega1_khz: T) -> T {
    hbar_omega_pev(omega1_khz) / beta_internal
}
