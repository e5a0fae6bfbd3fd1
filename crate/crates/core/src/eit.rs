//! Reduced EIT susceptibility of the collective mode, its dressed poles and
//! partial-fraction weights, and a time-domain steady-state oracle.
//!
//! `χ̃ = 1/(η − Δ_p − |Ω_c|²/(ξ − Δ_p))` is the susceptibility with the
//! `|μ_eg|²/ħ` prefactor taken out (it reappears in the scattering
//! prefactor), so `χ̃` carries units of `1/Γ_e`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::green::ModePoint;
use crate::ode::{Dopri5, Stop};
use crate::table::{Axis, Flags, SweepTable};
use crate::units::{DriveField, SystemConfig};
use crate::{Error, Result};

/// Denominators below this magnitude count as an undamped pole.
const DEGENERATE_DEN: f64 = 1e-14;
/// Minimum pole separation for the partial-fraction split.
const MIN_POLE_SEPARATION: f64 = 1e-10;
/// Largest probe amplitude accepted by the steady-state oracle.
pub const MAX_WEAK_PROBE: f64 = 1e-2;

/// `ξ = −Δ_c − iΓ_r/2`.
pub fn xi(drive: &DriveField, config: &SystemConfig) -> Complex64 {
    Complex64::new(-drive.delta_c, -config.gamma_r() / 2.0)
}

/// Everything the susceptibility depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EitParams {
    pub xi: Complex64,
    pub eta: Complex64,
    pub omega_c: Complex64,
    pub delta_c: f64,
}

impl EitParams {
    pub fn new(drive: &DriveField, mode: &ModePoint, config: &SystemConfig) -> Self {
        Self {
            xi: xi(drive, config),
            eta: mode.eta,
            omega_c: drive.omega_c,
            delta_c: drive.delta_c,
        }
    }

    /// Direct construction; `ξ` and `η` are taken as given.
    pub fn from_parts(eta: Complex64, xi: Complex64, omega_c: f64) -> Self {
        Self {
            xi,
            eta,
            omega_c: Complex64::new(omega_c, 0.0),
            delta_c: -xi.re,
        }
    }

    fn omega_sq(&self) -> f64 {
        self.omega_c.norm_sqr()
    }
}

/// Reduced susceptibility at probe detuning `dp`.
pub fn chi_reduced(dp: f64, params: &EitParams) -> Result<Complex64> {
    let om2 = params.omega_sq();
    let a = params.eta - dp;
    if om2 == 0.0 {
        if a.norm() < DEGENERATE_DEN {
            return Err(Error::Degenerate);
        }
        return Ok(a.inv());
    }
    let b = params.xi - dp;
    if b == Complex64::new(0.0, 0.0) {
        // the inner fraction diverges: dark point
        return Ok(Complex64::new(0.0, 0.0));
    }
    let den = a - om2 / b;
    if den.norm() < DEGENERATE_DEN {
        return Err(Error::Degenerate);
    }
    Ok(den.inv())
}

/// The two roots `Δ±` of `(η − Δ)(ξ − Δ) = |Ω_c|²`. `plus` has the larger
/// real part (ties: larger imaginary part).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedPoles {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl DressedPoles {
    pub fn separation(&self) -> f64 {
        (self.plus - self.minus).norm()
    }
}

pub fn dressed_poles(params: &EitParams) -> DressedPoles {
    let (xi, eta) = (params.xi, params.eta);
    let om2 = params.omega_sq();
    if om2 == 0.0 {
        let (plus, minus) = if xi.re > eta.re || (xi.re == eta.re && xi.im >= eta.im) {
            (xi, eta)
        } else {
            (eta, xi)
        };
        return DressedPoles { plus, minus };
    }
    let sum = xi + eta;
    let prod = xi * eta - om2;
    let disc = ((xi - eta) * (xi - eta) + 4.0 * om2).sqrt();
    let r1 = (sum + disc) / 2.0;
    let r2 = (sum - disc) / 2.0;
    // the smaller root from Vieta avoids cancellation
    let (big, small) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
    let small = if big.norm() > 0.0 && small.norm() < 1e-3 * big.norm() {
        prod / big
    } else {
        small
    };
    let first = big.re > small.re || (big.re == small.re && big.im >= small.im);
    if first {
        DressedPoles {
            plus: big,
            minus: small,
        }
    } else {
        DressedPoles {
            plus: small,
            minus: big,
        }
    }
}

/// Partial-fraction weights `(β̃₁, β̃₂)` with `β̃₁ + β̃₂ = χ̃`:
/// `β̃₁ = (ξ − Δ₊)/(Δ₊ − Δ₋) · 1/(Δ_p − Δ₊)`,
/// `β̃₂ = (Δ₋ − ξ)/(Δ₊ − Δ₋) · 1/(Δ_p − Δ₋)`.
pub fn beta_split(dp: f64, params: &EitParams) -> Result<(Complex64, Complex64)> {
    let poles = dressed_poles(params);
    let sep = poles.separation();
    if sep < MIN_POLE_SEPARATION {
        return Err(Error::DegeneratePoles { separation: sep });
    }
    let gap = poles.plus - poles.minus;
    let d1 = dp - poles.plus;
    let d2 = dp - poles.minus;
    if d1.norm() < DEGENERATE_DEN || d2.norm() < DEGENERATE_DEN {
        return Err(Error::Degenerate);
    }
    let b1 = (params.xi - poles.plus) / gap / d1;
    let b2 = (poles.minus - params.xi) / gap / d2;
    Ok((b1, b2))
}

/// One row of a susceptibility spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusceptibilitySample {
    pub delta_p: f64,
    pub chi: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
    pub poles: DressedPoles,
}

pub fn susceptibility_sample(dp: f64, params: &EitParams) -> Result<SusceptibilitySample> {
    let chi = chi_reduced(dp, params)?;
    let (beta1, beta2) = beta_split(dp, params)?;
    Ok(SusceptibilitySample {
        delta_p: dp,
        chi,
        beta1,
        beta2,
        poles: dressed_poles(params),
    })
}

pub const SPECTRUM_COLUMNS: [&str; 7] = [
    "delta_p", "chi_re", "chi_im", "beta1_re", "beta1_im", "beta2_re", "beta2_im",
];

/// `χ̃`, `β̃₁`, `β̃₂` over a probe-detuning grid. Rows that hit a pole carry
/// NaN and a flag; a degenerate pole pair only blanks the β columns.
pub fn susceptibility_spectrum(grid: &[f64], params: &EitParams) -> SweepTable {
    let mut t = SweepTable::new(alloc::vec![Axis::new("delta_p", grid.to_vec())], &SPECTRUM_COLUMNS);
    for &dp in grid {
        let mut flags = Flags::NONE;
        let chi = chi_reduced(dp, params).unwrap_or_else(|e| {
            flags |= Flags::from_error(&e);
            Complex64::new(f64::NAN, f64::NAN)
        });
        let (b1, b2) = beta_split(dp, params).unwrap_or_else(|e| {
            flags |= Flags::from_error(&e);
            let nan = Complex64::new(f64::NAN, f64::NAN);
            (nan, nan)
        });
        t.push(alloc::vec![dp, chi.re, chi.im, b1.re, b1.im, b2.re, b2.im], flags);
    }
    t
}

/// Converged density matrix of one Bloch mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    pub gg: f64,
    pub ee: f64,
    pub rr: f64,
    pub eg: Complex64,
    pub rg: Complex64,
    pub re: Complex64,
    pub omega_p: f64,
    /// Integration time at which the convergence test passed.
    pub time: f64,
}

impl SteadyState {
    pub fn trace(&self) -> f64 {
        self.gg + self.ee + self.rr
    }

    /// `ρ_eg/Ω_p`, the numerical estimate of `χ̃`.
    pub fn chi_estimate(&self) -> Complex64 {
        self.eg / self.omega_p
    }

    /// Full 3×3 matrix in the order `(g, e, r)`.
    pub fn matrix(&self) -> [[Complex64; 3]; 3] {
        let r = |x: f64| Complex64::new(x, 0.0);
        [
            [r(self.gg), self.eg.conj(), self.rg.conj()],
            [self.eg, r(self.ee), self.re.conj()],
            [self.rg, self.re, r(self.rr)],
        ]
    }
}

/// Right-hand side of the mode's motion equations. State:
/// `[Re ρ_eg, Im ρ_eg, Re ρ_rg, Im ρ_rg, Re ρ_re, Im ρ_re, ρ_ee, ρ_rr]`, with
/// `ρ_gg = 1 − ρ_ee − ρ_rr`.
fn motion(y: &[f64; 8], op: f64, dp: f64, p: &EitParams, gk: f64, gr: f64) -> [f64; 8] {
    let mi = Complex64::new(0.0, -1.0);
    let eg = Complex64::new(y[0], y[1]);
    let rg = Complex64::new(y[2], y[3]);
    let re = Complex64::new(y[4], y[5]);
    let (ee, rr) = (y[6], y[7]);
    let gg = 1.0 - ee - rr;
    let oc = p.omega_c;
    let d_eg = mi * ((ee - gg) * op + (p.eta - dp) * eg - oc.conj() * rg);
    let d_rg = mi * (-oc * eg + (p.xi - dp) * rg + re * op);
    let d_re = mi * ((rr - ee) * oc + (p.xi - p.eta.conj()) * re + rg * op);
    let coh_ee = mi * (-eg.conj() * op + eg * op + oc * re.conj() - oc.conj() * re);
    let coh_rr = mi * (oc.conj() * re - oc * re.conj());
    [
        d_eg.re,
        d_eg.im,
        d_rg.re,
        d_rg.im,
        d_re.re,
        d_re.im,
        coh_ee.re + gr * rr - gk * ee,
        coh_rr.re - gr * rr,
    ]
}

/// Integrates the motion equations from `ρ_gg = 1` until every derivative
/// falls below `1e-10·max(|ρ_eg|, 1e-6·Ω_p)`.
///
/// The ρ_re equation uses `ξ − η*`, the form that follows from the Lindblad
/// master equation; with `ξ − η` the coherence would grow whenever
/// `Γ_k > Γ_r`.
pub fn steady_state_numeric(
    omega_p: f64,
    drive: &DriveField,
    mode: &ModePoint,
    config: &SystemConfig,
    dp: f64,
) -> Result<SteadyState> {
    if !(0.0..=MAX_WEAK_PROBE).contains(&omega_p) {
        return Err(Error::OutOfRange {
            what: "omega_p",
            value: omega_p,
            expected: "0 ≤ Ω_p ≤ 1e-2 Γ_e",
        });
    }
    let params = EitParams::new(drive, mode, config);
    let gk = -2.0 * params.eta.im;
    let gr = config.gamma_r();
    if !(gk + gr > 0.0) {
        return Err(Error::Precondition("steady state needs Γ_k + Γ_r > 0"));
    }
    let zero = Complex64::new(0.0, 0.0);
    if omega_p == 0.0 {
        return Ok(SteadyState {
            gg: 1.0,
            ee: 0.0,
            rr: 0.0,
            eg: zero,
            rg: zero,
            re: zero,
            omega_p,
            time: 0.0,
        });
    }
    if !(gk > 0.0) {
        return Err(Error::Precondition("a driven steady state needs Γ_k > 0"));
    }
    let budget = 1e5 / (gk + gr).min(1.0);
    // Keep every step inside the explicit stability region. Near the fixed
    // point the controller would otherwise sit on its edge and leave
    // derivative noise at the tolerance level, so the convergence test
    // never fires when the two-photon detuning is large.
    let rate = params.eta.norm() + params.xi.norm() + params.omega_c.norm() + dp.abs() + gk + gr;
    let mut ode = Dopri5::new(1e-10, 1e-12 * omega_p * omega_p);
    ode.h_max = 1.5 / rate;
    let f = |_t: f64, y: &[f64; 8]| motion(y, omega_p, dp, &params, gk, gr);
    let (t, y, stop) = ode.integrate(f, 0.0, [0.0; 8], budget, |_t, y, dy| {
        let eg = y[0].hypot(y[1]);
        let tol = 1e-10 * eg.max(1e-6 * omega_p);
        dy.iter().all(|v| v.abs() < tol)
    });
    if stop != Stop::Observer {
        return Err(Error::NoSteadyState { time: t });
    }
    Ok(SteadyState {
        gg: 1.0 - y[6] - y[7],
        ee: y[6],
        rr: y[7],
        eg: Complex64::new(y[0], y[1]),
        rg: Complex64::new(y[2], y[3]),
        re: Complex64::new(y[4], y[5]),
        omega_p,
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{BlochVector, Dipole};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(gr: f64) -> SystemConfig {
        SystemConfig::new(0.1, gr, Dipole::X).unwrap()
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi(&DriveField::new(0.0, 0.0).unwrap(), &cfg(0.3)), c(-0.0, -0.15));
        assert_eq!(xi(&DriveField::new(3.0, 5.0).unwrap(), &cfg(0.0)), c(-5.0, -0.0));
        assert_eq!(xi(&DriveField::new(3.0, -15.0).unwrap(), &cfg(0.3)), c(15.0, -0.15));
    }

    #[test]
    fn two_level_limit() {
        let p = EitParams::from_parts(c(-8.4, -11.94), c(0.0, -0.15), 0.0);
        for dp in [-20.0, 0.0, 3.3] {
            let want = (c(-8.4, -11.94) - dp).inv();
            assert_eq!(chi_reduced(dp, &p).unwrap(), want);
            let (b1, b2) = beta_split(dp, &p).unwrap();
            // ξ has the larger real part here, so it is Δ₊ and β̃₁ vanishes
            assert_eq!(b1, c(0.0, 0.0));
            assert!((b2 - want).norm() < 1e-15 * want.norm());
        }
    }

    #[test]
    fn dark_point_without_upper_loss() {
        let p = EitParams::from_parts(c(29.6, -3.0), c(-4.0, 0.0), 15.0);
        assert_eq!(chi_reduced(-4.0, &p).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn degenerate_probe() {
        let p = EitParams::from_parts(c(2.0, 0.0), c(0.0, 0.0), 0.0);
        assert_eq!(chi_reduced(2.0, &p), Err(Error::Degenerate));
    }

    #[test]
    fn reference_value() {
        let p = EitParams::from_parts(c(-8.4, -11.94), c(0.0, -0.15), 20.0);
        // 1/(η − 400/(−0.15i)) = 1/(−8.4 − 11.94i − 2666.666…i)
        let want = c(-8.4, -11.94 - 400.0 / 0.15).inv();
        let got = chi_reduced(0.0, &p).unwrap();
        assert!((got - want).norm() < 1e-15 * want.norm());
        assert!((got.im - 3.7326e-4).abs() < 1e-7);
    }

    #[test]
    fn symmetric_splitting() {
        let x = c(1.0, -0.5);
        let p = EitParams::from_parts(x, x, 3.0);
        let poles = dressed_poles(&p);
        assert!((poles.plus - (x + 3.0)).norm() < 1e-14);
        assert!((poles.minus - (x - 3.0)).norm() < 1e-14);
        assert!(matches!(
            beta_split(0.0, &EitParams::from_parts(x, x, 0.0)),
            Err(Error::DegeneratePoles { .. })
        ));
    }

    #[test]
    fn decoupled_poles() {
        let p = EitParams::from_parts(c(30.0, -1.0), c(-2.0, -0.15), 0.0);
        let poles = dressed_poles(&p);
        assert_eq!(poles.plus, c(30.0, -1.0));
        assert_eq!(poles.minus, c(-2.0, -0.15));
    }

    #[test]
    fn lorentzian_near_upper_pole() {
        let p = EitParams::from_parts(c(30.0, -12.0), c(0.0, -0.15), 15.0);
        let poles = dressed_poles(&p);
        let w = -poles.plus.im;
        let at = |dp: f64| beta_split(dp, &p).unwrap().0;
        let peak = at(poles.plus.re);
        let half = at(poles.plus.re + w);
        // |1/(x − Δ₊)| drops by √2 one half-width away
        assert!((peak.norm() / half.norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn steady_state_zero_probe() {
        let mode = ModePoint::from_parts(BlochVector::GAMMA, -10.2, 23.87);
        let s = steady_state_numeric(0.0, &DriveField::new(10.0, 0.0).unwrap(), &mode, &cfg(0.3), 0.0).unwrap();
        assert_eq!(s.gg, 1.0);
        assert_eq!(s.eg, c(0.0, 0.0));
    }

    #[test]
    fn steady_state_matches_closed_form() {
        let mode = ModePoint::from_parts(BlochVector::GAMMA, -10.2, 23.87);
        let config = cfg(0.3);
        for (oc, dc, dp) in [
            (0.0, 0.0, -3.0),
            (20.0, 0.0, 0.0),
            (15.0, -7.0, 12.0),
            (45.0, 9.0, -30.0),
        ] {
            let drive = DriveField::new(oc, dc).unwrap();
            let s = steady_state_numeric(1e-4, &drive, &mode, &config, dp).unwrap();
            let want = chi_reduced(dp, &EitParams::new(&drive, &mode, &config)).unwrap();
            let rel = (s.chi_estimate() - want).norm() / want.norm();
            assert!(rel < 1e-6, "{oc} {dc} {dp}: {rel:e}");
            assert!((s.trace() - 1.0).abs() < 1e-12);
            let m = s.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(m[i][j], m[j][i].conj());
                }
            }
        }
    }

    #[test]
    fn steady_state_is_linear_in_probe() {
        let mode = ModePoint::from_parts(BlochVector::GAMMA, 29.6, 5.0);
        let drive = DriveField::new(15.0, 0.0).unwrap();
        let a = steady_state_numeric(1e-4, &drive, &mode, &cfg(0.3), 5.0).unwrap();
        let b = steady_state_numeric(1e-5, &drive, &mode, &cfg(0.3), 5.0).unwrap();
        let rel = (a.eg / 1e-4 - b.eg / 1e-5).norm() / (b.eg / 1e-5).norm();
        assert!(rel < 1e-4);
    }

    #[test]
    fn steady_state_rejects_strong_probe_and_dark_mode() {
        let drive = DriveField::new(10.0, 0.0).unwrap();
        let bright = ModePoint::from_parts(BlochVector::GAMMA, 0.0, 1.0);
        assert!(steady_state_numeric(0.1, &drive, &bright, &cfg(0.3), 0.0).is_err());
        let dark = ModePoint::from_parts(BlochVector::GAMMA, 29.6, 0.0);
        assert!(matches!(
            steady_state_numeric(1e-4, &drive, &dark, &cfg(0.0), 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn spectrum_columns() {
        let p = EitParams::from_parts(c(29.6, -2.0), c(0.0, -0.15), 15.0);
        let grid = crate::table::linspace(-40.0, 60.0, 11);
        let t = susceptibility_spectrum(&grid, &p);
        assert_eq!(t.len(), 11);
        assert_eq!(t.columns.len(), 7);
        assert!(!t.any_flagged());
    }

    proptest! {
        #[test]
        fn vieta_and_pole_equation(er in -40.0f64..40.0, ei in -80.0f64..0.0,
                                   xr in -15.0f64..15.0, xi_ in -1.0f64..0.0, om in 0.0f64..60.0) {
            let p = EitParams::from_parts(c(er, ei), c(xr, xi_), om);
            let poles = dressed_poles(&p);
            let scale = p.xi.norm() + p.eta.norm() + om;
            prop_assert!((poles.plus + poles.minus - (p.xi + p.eta)).norm() <= 1e-10 * scale);
            let prod = p.xi * p.eta - om * om;
            prop_assert!((poles.plus * poles.minus - prod).norm() <= 1e-10 * scale * scale);
            for r in [poles.plus, poles.minus] {
                let lhs = (p.eta - r) * (p.xi - r);
                prop_assert!((lhs - om * om).norm() <= 1e-10 * scale * scale);
            }
            prop_assert!(poles.plus.re >= poles.minus.re);
        }

        #[test]
        fn beta_recombines(er in -40.0f64..40.0, ei in -80.0f64..-0.01,
                           xr in -15.0f64..15.0, xi_ in -1.0f64..-0.01, om in 0.5f64..60.0,
                           dp in -80.0f64..80.0) {
            let p = EitParams::from_parts(c(er, ei), c(xr, xi_), om);
            let chi = chi_reduced(dp, &p).unwrap();
            let (b1, b2) = beta_split(dp, &p).unwrap();
            prop_assert!((b1 + b2 - chi).norm() <= 1e-12 * chi.norm().max(b1.norm()));
        }

        #[test]
        fn passive(er in -40.0f64..40.0, gk in 0.0f64..160.0, dc in -15.0f64..15.0,
                   gr in 0.0f64..1.0, om in 0.0f64..60.0, dp in -80.0f64..80.0) {
            let p = EitParams::from_parts(c(er, -gk / 2.0), c(-dc, -gr / 2.0), om);
            if let Ok(chi) = chi_reduced(dp, &p) {
                prop_assert!(chi.im >= -1e-12);
            }
        }
    }
}
