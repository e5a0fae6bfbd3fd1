//! Ewald splitting of the projected lattice sum
//! `S(k) = Σ_{n≠0} ℘·G(r_n)·℘ e^{−ik·r_n}`.
//!
//! The scalar kernel `e^{ikr}/(4πr)` is split with the parameter `E` into a
//! short-range spatial part (erfc-screened) and a spectral part over
//! reciprocal vectors; the dyadic part is `∇∇/k′²` acting on both. With
//! `u = ik′/(2E)` the spatial kernel is `h(R)/(8πR)`,
//! `h = e^{ikR} erfc(RE + u) + e^{−ikR} erfc(RE − u)`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::reciprocal::{anomaly_numerator, numerator_vanishes, PROXIMITY};
use crate::special::{erf, erfc};
use crate::units::{BlochVector, SystemConfig};
use crate::{Error, Result};

/// Screening arguments beyond this contribute below `e^{−49}`.
const REACH: f64 = 7.0;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Result of one Ewald evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct EwaldSum {
    pub value: Complex64,
    pub proximity: bool,
}

/// Default splitting parameter, which balances both halves for a square cell.
pub(crate) fn default_split(d: f64) -> f64 {
    SQRT_PI / d
}

pub(crate) fn lattice_sum(k_par: &BlochVector, config: &SystemConfig, split: f64) -> Result<EwaldSum> {
    let k = config.k_probe();
    let d = config.lattice_constant();
    let pv = config.dipole().vector();
    let e = split;
    let u = Complex64::new(0.0, k / (2.0 * e));
    let eu = (-u * u).exp();
    let k2 = k * k;

    // spatial part
    let mut spatial = Complex64::new(0.0, 0.0);
    let n_sp = (REACH / (e * d)).ceil() as i32 + 1;
    for a in -n_sp..=n_sp {
        for b in -n_sp..=n_sp {
            if a == 0 && b == 0 {
                continue;
            }
            let (x, y) = (a as f64 * d, b as f64 * d);
            let r = x.hypot(y);
            if r * e > REACH {
                continue;
            }
            let (s, co) = (k * r).sin_cos();
            let eikr = Complex64::new(co, s);
            let big_a = eikr * erfc(c(r * e) + u);
            let big_b = eikr.conj() * erfc(c(r * e) - u);
            let h = big_a + big_b;
            let gauss = eu * (-r * r * e * e).exp();
            let h1 = Complex64::new(0.0, k) * (big_a - big_b) - gauss * (4.0 * e / SQRT_PI);
            let h2 = -(big_a + big_b) * k2 + gauss * (8.0 * e * e * e * r / SQRT_PI);
            let w = 8.0 * PI * r;
            let g0 = h / w;
            let g1 = h1 / w - h / (w * r);
            let g2 = h2 / w - h1 * (2.0 / (w * r)) + h * (2.0 / (w * r * r));
            let cp = (pv[0] * x + pv[1] * y) / r;
            let proj = g0 + (g2 * (cp * cp) + g1 * ((1.0 - cp * cp) / r)) / k2;
            let (ps, pc) = (k_par.kx * x + k_par.ky * y).sin_cos();
            spatial += proj * Complex64::new(pc, -ps);
        }
    }

    // spectral part over p = k_∥ + q_m
    let g = 2.0 * PI / d;
    let p_max = ((2.0 * REACH * e).powi(2) + k2).sqrt();
    let span = |c0: f64| {
        let lo = ((-p_max - c0) / g).floor() as i32;
        let hi = ((p_max - c0) / g).ceil() as i32;
        lo..=hi
    };
    let par2 = pv[0] * pv[0] + pv[1] * pv[1];
    let mut spectral = Complex64::new(0.0, 0.0);
    let mut proximity = false;
    for a in span(k_par.kx) {
        for b in span(k_par.ky) {
            let p = [k_par.kx + g * a as f64, k_par.ky + g * b as f64];
            let p2 = p[0] * p[0] + p[1] * p[1];
            let diff = p2 - k2;
            let gamma = if diff >= 0.0 {
                c(diff.sqrt())
            } else {
                Complex64::new(0.0, -(-diff).sqrt())
            };
            let w = gamma / (2.0 * e);
            if w.re > REACH {
                continue;
            }
            let ec = erfc(w);
            let n = anomaly_numerator(p, &config.dipole());
            // F(N − |℘_∥|²γ²)/k′² − ℘_z²(E/√π)e^{−w²}/k′², F = erfc(w)/(2γ)
            let mut term = -(ec * gamma) * (par2 / 2.0) - (-w * w).exp() * (pv[2] * pv[2] * e / SQRT_PI);
            if diff.abs() < PROXIMITY * k2 {
                proximity = true;
                if !numerator_vanishes(n, k) {
                    // the labels follow p_m = k_∥ − q_m
                    return Err(Error::AnomalyDivergence { mx: -a, my: -b });
                }
            } else {
                term += ec / (gamma * 2.0) * n;
            }
            spectral += term / k2;
        }
    }
    spectral /= d * d;

    // remove the n = 0 spatial image, which the spectral sum includes
    let c0 = (erfc(-u) * Complex64::new(0.0, 2.0 * k) + eu * (4.0 * e / SQRT_PI)) / (8.0 * PI);
    let h1_0 = -erf(u) * Complex64::new(0.0, 2.0 * k) - eu * (4.0 * e / SQRT_PI);
    let h3_0 = -h1_0 * k2 + eu * (8.0 * e * e * e / SQRT_PI);
    let c2 = (Complex64::new(0.0, -k * k2 / 3.0) - h3_0 / 6.0) / (8.0 * PI);
    let self_term = c0 + c2 * (2.0 / k2);

    Ok(EwaldSum {
        value: spatial + spectral - self_term,
        proximity,
    })
}
