//! Brute-force real-space lattice sums with a Gaussian convergence factor
//! and Richardson extrapolation in the damping radius. Slow; used as an
//! independent oracle for the reciprocal and Ewald routes.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::dyadic::green_coefficients;
use crate::units::{BlochVector, SystemConfig};
use crate::{Error, Result};

/// The smallest accepted cutoff (largest damping radius), in `λ`.
pub const MIN_CUTOFF: f64 = 20.0;
/// Sites are kept out to this multiple of the largest damping radius, where
/// the Gaussian weight is `e^{−36}`.
const DISK_FACTOR: f64 = 6.0;
const MAX_DOUBLINGS: u32 = 3;

/// Extrapolated sum and its error estimate (difference of the last two
/// extrapolants).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampedSum {
    pub value: Complex64,
    pub error: Complex64,
    /// Largest damping radius actually used.
    pub cutoff: f64,
}

#[derive(Default)]
struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    fn add_part(s: &mut f64, c: &mut f64, x: f64) {
        let t = *s + x;
        if s.abs() >= x.abs() {
            *c += (*s - t) + x;
        } else {
            *c += (x - t) + *s;
        }
        *s = t;
    }

    fn add(&mut self, x: Complex64) {
        Self::add_part(&mut self.sum.re, &mut self.comp.re, x.re);
        Self::add_part(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `Σ_{n≠0} ℘·G(r_n)·℘ e^{−ik·r_n} e^{−(r_n/R)²}` for `R ∈ {R₀, 2R₀, 4R₀}`.
///
/// `G(r) = G(−r)`, so only half the plane is visited and each site carries
/// `2cos(k·r)`. Rows are summed in a fixed order, which keeps the result
/// bitwise reproducible.
fn damped_sums(k_par: &BlochVector, config: &SystemConfig, r0: f64) -> [Complex64; 3] {
    let k = config.k_probe();
    let d = config.lattice_constant();
    let pv = config.dipole().vector();
    let r_disk = DISK_FACTOR * 4.0 * r0;
    let n = (r_disk / d).floor() as i64;
    let inv = 1.0 / (4.0 * r0 * 4.0 * r0);
    let mut acc = [Neumaier::default(), Neumaier::default(), Neumaier::default()];
    for a in 0..=n {
        let x = a as f64 * d;
        let mut row = [Complex64::new(0.0, 0.0); 3];
        let b0 = if a == 0 { 1 } else { -n };
        for b in b0..=n {
            let y = b as f64 * d;
            let r2 = x * x + y * y;
            let r = r2.sqrt();
            if r > r_disk {
                continue;
            }
            let (ga, gb) = green_coefficients(r, k);
            let cp = (pv[0] * x + pv[1] * y) / r;
            let g = (ga + gb * (cp * cp)) * (2.0 * (k_par.kx * x + k_par.ky * y).cos());
            let w3 = (-r2 * inv).exp();
            let w2 = w3 * w3 * w3 * w3;
            let w1 = w2 * w2 * w2 * w2;
            row[0] += g * w1;
            row[1] += g * w2;
            row[2] += g * w3;
        }
        for (s, v) in acc.iter_mut().zip(row) {
            s.add(v);
        }
    }
    [acc[0].total(), acc[1].total(), acc[2].total()]
}

fn richardson(s: [Complex64; 3]) -> (Complex64, Complex64) {
    let a = (s[1] * 4.0 - s[0]) / 3.0;
    let b = (s[2] * 4.0 - s[1]) / 3.0;
    let c = (b * 16.0 - a) / 15.0;
    (c, c - b)
}

/// Extrapolated damped sum. `accept` decides whether an error estimate is
/// good enough; otherwise the cutoff doubles, at most three times.
pub fn damped_lattice_sum<F>(k_par: &BlochVector, config: &SystemConfig, cutoff: f64, accept: F) -> Result<DampedSum>
where
    F: Fn(Complex64, Complex64) -> bool,
{
    if !(cutoff >= MIN_CUTOFF) {
        return Err(Error::OutOfRange {
            what: "cutoff",
            value: cutoff,
            expected: "cutoff ≥ 20λ",
        });
    }
    let mut r_max = cutoff;
    let mut last = None;
    for _ in 0..=MAX_DOUBLINGS {
        let (value, error) = richardson(damped_sums(k_par, config, r_max / 4.0));
        if accept(value, error) {
            return Ok(DampedSum {
                value,
                error,
                cutoff: r_max,
            });
        }
        last = Some(error);
        r_max *= 2.0;
    }
    let err = last.map(|e| e.norm()).unwrap_or(f64::NAN);
    Err(Error::NoConvergence {
        residual: err,
        tolerance: 0.0,
    })
}

/// Oracle decay rate `Γ_e + (6π/k′) Im S`, accurate to about `1e-5` relative
/// at the default cutoff for Bloch vectors away from the light line.
pub fn gamma_k_realspace(k_par: &BlochVector, config: &SystemConfig, cutoff: f64) -> Result<f64> {
    let scale = 6.0 * PI / config.k_probe();
    let tol = 1e-5;
    let s = damped_lattice_sum(k_par, config, cutoff, |v, e| {
        scale * e.im.abs() <= tol * (1.0 + scale * v.im).abs().max(1.0)
    })
    .map_err(|e| match e {
        Error::NoConvergence { residual, .. } => Error::NoConvergence {
            residual: residual * scale,
            tolerance: tol,
        },
        other => other,
    })?;
    Ok(1.0 + scale * s.value.im)
}

/// Oracle cooperative shift `−(3π/k′) Re S` with its error estimate.
pub fn delta_k_realspace(
    k_par: &BlochVector,
    config: &SystemConfig,
    cutoff: f64,
    tolerance: f64,
) -> Result<(f64, f64)> {
    let scale = 3.0 * PI / config.k_probe();
    let s = damped_lattice_sum(k_par, config, cutoff, |v, e| {
        scale * e.re.abs() <= tolerance * (scale * v.re).abs().max(1.0)
    })
    .map_err(|e| match e {
        Error::NoConvergence { residual, .. } => Error::NoConvergence {
            residual: residual * scale,
            tolerance,
        },
        other => other,
    })?;
    Ok((-scale * s.value.re, scale * s.error.re.abs()))
}
