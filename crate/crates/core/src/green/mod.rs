//! Dyadic Green's tensor, diffraction orders and the lattice sums behind the
//! collective mode `η(k) = Δ_k − iΓ_k/2`.
//!
//! `Γ_k` always comes from the finite sum over propagating orders. `Δ_k` is
//! the real part of a conditionally convergent real-space sum; the default
//! route evaluates it by Ewald summation, and a damped real-space sum is
//! available as a slow cross-check.

mod dyadic;
mod ewald;
mod realspace;
mod reciprocal;

use core::f64::consts::PI;

use num_complex::Complex64;

pub use dyadic::{free_green, DyadicTensor};
pub use realspace::{damped_lattice_sum, delta_k_realspace, gamma_k_realspace, DampedSum, MIN_CUTOFF};
pub use reciprocal::{decay_rate, gamma_k, reciprocal_orders, DecayRate, OrderTerm, PROXIMITY};

use crate::table::Flags;
use crate::units::{BlochVector, SystemConfig};
use crate::{Error, Result};

/// Default relative tolerance of the shift, in units of `max(|Δ_k|, Γ_e)`.
pub const DEFAULT_SHIFT_TOLERANCE: f64 = 1e-3;

/// How `Δ_k` is summed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AccelParams {
    /// Ewald splitting. The error estimate is the change of the result when
    /// the splitting parameter grows by 20 %.
    Ewald { tolerance: f64 },
    /// Gaussian-damped real-space sum, Richardson-extrapolated in the damping
    /// radius over `{R/4, R/2, R}`.
    RealSpace { cutoff: f64, tolerance: f64 },
}

impl Default for AccelParams {
    fn default() -> Self {
        AccelParams::Ewald {
            tolerance: DEFAULT_SHIFT_TOLERANCE,
        }
    }
}

/// Cooperative shift with its error estimate, both in `Γ_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftEstimate {
    pub value: f64,
    pub error: f64,
}

/// The full projected lattice sum `Σ_{n≠0} ℘·G(r_n)·℘ e^{−ik·r_n}`, by Ewald
/// summation with the default splitting.
pub fn lattice_sum(k_par: &BlochVector, config: &SystemConfig) -> Result<Complex64> {
    ewald::lattice_sum(k_par, config, ewald::default_split(config.lattice_constant())).map(|s| s.value)
}

/// `Δ_k = −(3π/k′) Re Σ_{n≠0} ℘·G(r_n)·℘ e^{−ik·r_n}`.
pub fn delta_k(k_par: &BlochVector, config: &SystemConfig, accel: AccelParams) -> Result<ShiftEstimate> {
    if !k_par.is_finite() {
        return Err(Error::OutOfRange {
            what: "k_par",
            value: k_par.norm(),
            expected: "finite Bloch vector",
        });
    }
    let scale = 3.0 * PI / config.k_probe();
    match accel {
        AccelParams::Ewald { tolerance } => {
            let e = ewald::default_split(config.lattice_constant());
            let a = ewald::lattice_sum(k_par, config, e)?;
            let b = ewald::lattice_sum(k_par, config, 1.2 * e)?;
            let value = -scale * a.value.re;
            let error = scale * (a.value.re - b.value.re).abs();
            if error > tolerance * value.abs().max(1.0) {
                return Err(Error::NoConvergence {
                    residual: error,
                    tolerance,
                });
            }
            Ok(ShiftEstimate { value, error })
        }
        AccelParams::RealSpace { cutoff, tolerance } => {
            let (value, error) = delta_k_realspace(k_par, config, cutoff, tolerance)?;
            Ok(ShiftEstimate { value, error })
        }
    }
}

/// The collective mode at one Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModePoint {
    pub k: BlochVector,
    /// Cooperative shift `Δ_k`.
    pub delta: f64,
    /// Collective decay rate `Γ_k`.
    pub gamma: f64,
    /// `Δ_k − iΓ_k/2`.
    pub eta: Complex64,
    pub shift_error: f64,
    pub propagating: usize,
    pub light_cone: bool,
    pub proximity: bool,
}

impl ModePoint {
    pub fn from_parts(k: BlochVector, delta: f64, gamma: f64) -> Self {
        Self {
            k,
            delta,
            gamma,
            eta: Complex64::new(delta, -gamma / 2.0),
            shift_error: 0.0,
            propagating: 0,
            light_cone: k.inside_light_cone(),
            proximity: false,
        }
    }

    pub fn flags(&self) -> Flags {
        let mut f = Flags::NONE;
        if self.proximity {
            f |= Flags::ANOMALY_PROXIMITY;
        }
        if self.propagating > 1 {
            f |= Flags::NONSPECULAR;
        }
        f
    }
}

/// `η(k)` with the default Ewald shift.
pub fn eta(k_par: &BlochVector, config: &SystemConfig) -> Result<ModePoint> {
    eta_with(k_par, config, AccelParams::default())
}

pub fn eta_with(k_par: &BlochVector, config: &SystemConfig, accel: AccelParams) -> Result<ModePoint> {
    let rate = decay_rate(k_par, config)?;
    let shift = delta_k(k_par, config, accel)?;
    Ok(ModePoint {
        k: *k_par,
        delta: shift.value,
        gamma: rate.gamma,
        eta: Complex64::new(shift.value, -rate.gamma / 2.0),
        shift_error: shift.error,
        propagating: rate.propagating,
        light_cone: k_par.inside_light_cone(),
        proximity: rate.proximity,
    })
}
