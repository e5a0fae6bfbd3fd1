use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::units::{BlochVector, Dipole, SystemConfig};
use crate::{Error, Result};

/// Relative window `|k′² − |p|²| < PROXIMITY·k′²` that marks a Rayleigh anomaly.
pub const PROXIMITY: f64 = 1e-9;

/// One diffraction order of the square lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderTerm {
    pub m: (i32, i32),
    /// Outgoing in-plane wavevector `p_m = k_∥ − q_m`.
    pub p: [f64; 2],
    /// `sqrt(k′² − |p_m|²)`: real positive when propagating, otherwise
    /// positive imaginary.
    pub kappa: Complex64,
    pub propagating: bool,
    /// Polarization factor `1 − ((℘_∥·p)² + ℘_z²κ²)/k′²`.
    pub f: f64,
    /// Order sits within the anomaly window.
    pub proximity: bool,
}

/// `N = |℘_∥|²|p|² − (℘_∥·p)² + ℘_z²|p|² ≥ 0`, which satisfies
/// `f_m k′² = N + |℘_∥|²κ_m²`. An order on its threshold diverges unless `N`
/// vanishes.
pub(crate) fn anomaly_numerator(p: [f64; 2], dipole: &Dipole) -> f64 {
    let pv = dipole.vector();
    let par2 = pv[0] * pv[0] + pv[1] * pv[1];
    let p2 = p[0] * p[0] + p[1] * p[1];
    let dot = pv[0] * p[0] + pv[1] * p[1];
    (par2 * p2 - dot * dot).max(0.0) + pv[2] * pv[2] * p2
}

/// `N` below this fraction of `k′²` counts as vanishing.
pub(crate) fn numerator_vanishes(n: f64, k: f64) -> bool {
    n <= PROXIMITY * k * k
}

/// `f_m/κ_m` for an open order, written as `N/(k′²κ) + |℘_∥|²κ/k′²`.
/// Inside the anomaly window the first term is either dropped (`N → 0`,
/// the finite limit) or reported as a divergence.
fn rate_term(t: &OrderTerm, k: f64, dipole: &Dipole) -> Result<f64> {
    let pv = dipole.vector();
    let par2 = pv[0] * pv[0] + pv[1] * pv[1];
    let n = anomaly_numerator(t.p, dipole);
    let kappa = t.kappa.re;
    if t.proximity {
        if !numerator_vanishes(n, k) {
            return Err(Error::AnomalyDivergence { mx: t.m.0, my: t.m.1 });
        }
        return Ok(par2 * kappa / (k * k));
    }
    Ok(n / (k * k * kappa) + par2 * kappa / (k * k))
}

fn classify(m: (i32, i32), k_par: &BlochVector, config: &SystemConfig) -> OrderTerm {
    let k = config.k_probe();
    let g = 2.0 * PI / config.lattice_constant();
    let p = [k_par.kx - g * m.0 as f64, k_par.ky - g * m.1 as f64];
    let p2 = p[0] * p[0] + p[1] * p[1];
    let diff = k * k - p2;
    let kappa = if diff >= 0.0 {
        Complex64::new(diff.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-diff).sqrt())
    };
    let pv = config.dipole().vector();
    let dot = pv[0] * p[0] + pv[1] * p[1];
    OrderTerm {
        m,
        p,
        kappa,
        propagating: p2 < k * k,
        f: 1.0 - (dot * dot + pv[2] * pv[2] * diff) / (k * k),
        proximity: diff.abs() < PROXIMITY * k * k,
    }
}

/// All orders with `|m_x|, |m_y| ≤ max_order`, sorted by `m_x² + m_y²` and
/// then lexicographically.
pub fn reciprocal_orders(k_par: &BlochVector, config: &SystemConfig, max_order: u32) -> Vec<OrderTerm> {
    let n = max_order as i32;
    let mut ms: Vec<(i32, i32)> = (-n..=n).flat_map(|a| (-n..=n).map(move |b| (a, b))).collect();
    ms.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
    ms.into_iter().map(|m| classify(m, k_par, config)).collect()
}

/// Orders that propagate or sit on their threshold. Anything else is
/// evanescent and never contributes to the decay rate.
pub(crate) fn open_orders(k_par: &BlochVector, config: &SystemConfig) -> Vec<OrderTerm> {
    let k = config.k_probe();
    let g = 2.0 * PI / config.lattice_constant();
    let span = |c: f64| {
        let lo = ((c - k) / g).floor() as i32 - 1;
        let hi = ((c + k) / g).ceil() as i32 + 1;
        lo..=hi
    };
    let mut out = Vec::new();
    for a in span(k_par.kx) {
        for b in span(k_par.ky) {
            let t = classify((a, b), k_par, config);
            if t.propagating || t.proximity {
                out.push(t);
            }
        }
    }
    out.sort_by_key(|t| (t.m.0 * t.m.0 + t.m.1 * t.m.1, t.m.0, t.m.1));
    out
}

/// Collective decay rate with its order bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRate {
    pub gamma: f64,
    pub propagating: usize,
    pub proximity: bool,
}

/// `Γ_k = (3π/(k′d²)) Σ_prop f_m/κ_m`. The sum already contains the
/// single-atom rate: the `i/2` self-term of the full reciprocal sum cancels
/// the free-space `−iΓ_e/2` exactly, so no separate `Γ_e` appears.
pub fn decay_rate(k_par: &BlochVector, config: &SystemConfig) -> Result<DecayRate> {
    if !k_par.is_finite() {
        return Err(Error::OutOfRange {
            what: "k_par",
            value: k_par.norm(),
            expected: "finite Bloch vector",
        });
    }
    let k = config.k_probe();
    let d = config.lattice_constant();
    let dipole = config.dipole();
    let mut sum = 0.0;
    let mut count = 0;
    let mut proximity = false;
    for t in open_orders(k_par, config) {
        proximity |= t.proximity;
        if t.propagating {
            count += 1;
        }
        sum += rate_term(&t, k, &dipole)?;
    }
    Ok(DecayRate {
        gamma: 3.0 * PI / (k * d * d) * sum,
        propagating: count,
        proximity,
    })
}

/// Exact collective decay rate `Γ_k` in units of `Γ_e`.
pub fn gamma_k(k_par: &BlochVector, config: &SystemConfig) -> Result<f64> {
    decay_rate(k_par, config).map(|r| r.gamma)
}
