//! The acceptance checks behind the `verify` command and the `acceptance`
//! test target. Every tolerance is fixed here.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bands::{directional_mode, mode_vs_lattice};
use crate::eit::{beta_split, chi_reduced, dressed_poles, steady_state_numeric, EitParams};
use crate::green::{delta_k, gamma_k, gamma_k_realspace, AccelParams, MIN_CUTOFF};
use crate::scattering::{
    diffraction_threshold, extract_bands, extract_bands_with_threshold, local_maxima, order_contribution_xx,
    rt_spectrum, scattering_matrices, scattering_with_mode, spectra_sweep, sweep_bands, OperatingPoint, SweepParam,
};
use crate::table::linspace;
use crate::units::K_PROBE;
use crate::{
    BlochVector, Dipole, DriveField, Executor, Flags, IncidencePlane, ProbeGeometry, ProbePolarization, SystemConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CRITERIA: u32 = 13;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    /// Measured values against their tolerances.
    pub detail: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

/// Accumulates sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    parts: Vec<String>,
    pass: bool,
    any: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, text: String) {
        if !self.any {
            self.pass = true;
            self.any = true;
        }
        self.pass &= ok;
        self.parts.push(format!("{}{}", if ok { "" } else { "[fail] " }, text));
    }

    fn fail(&mut self, text: String) {
        self.check(false, text);
    }

    fn finish(self, id: u32, title: &'static str) -> Report {
        Report {
            id,
            title,
            pass: self.any && self.pass,
            detail: self.parts.join("; "),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn reference(p: Dipole) -> SystemConfig {
    SystemConfig::reference(p)
}

fn lossless(p: Dipole) -> SystemConfig {
    SystemConfig::new(0.1, 0.0, p).expect("valid config")
}

fn geom(theta: f64, plane: IncidencePlane, pol: ProbePolarization) -> ProbeGeometry {
    ProbeGeometry::new(theta, plane, pol).expect("valid geometry")
}

fn closed_rate(d: f64) -> f64 {
    3.0 * PI / (K_PROBE * K_PROBE * d * d)
}

fn random_dipole(rng: &mut ChaCha8Rng) -> Dipole {
    match rng.gen_range(0..4) {
        0 => Dipole::X,
        1 => Dipole::Y,
        2 => Dipole::Z,
        _ => loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if let Ok(d) = Dipole::new(v) {
                break d;
            }
        },
    }
}

fn random_plane(rng: &mut ChaCha8Rng) -> IncidencePlane {
    if rng.gen_bool(0.5) {
        IncidencePlane::XZ
    } else {
        IncidencePlane::YZ
    }
}

fn random_probe(rng: &mut ChaCha8Rng) -> ProbePolarization {
    if rng.gen_bool(0.5) {
        ProbePolarization::P
    } else {
        ProbePolarization::S
    }
}

fn gamma_point_inplane() -> Report {
    let mut c = Checks::default();
    let title = "in-plane dipole decay at the zone center";
    match gamma_k(&BlochVector::GAMMA, &reference(Dipole::X)) {
        Ok(g) => {
            let closed = closed_rate(0.1);
            c.check(
                rel(g, closed) <= 1e-6,
                format!(
                    "Γ_k = {g:.6} vs closed form {closed:.6} (rel {:.1e} ≤ 1e-6)",
                    rel(g, closed)
                ),
            );
            c.check(
                rel(g, 23.9) <= 5e-3,
                format!("vs 23.9 (rel {:.1e} ≤ 5e-3)", rel(g, 23.9)),
            );
        }
        Err(e) => c.fail(format!("error: {e}")),
    }
    c.finish(1, title)
}

fn gamma_point_subradiant() -> Report {
    let mut c = Checks::default();
    match gamma_k(&BlochVector::GAMMA, &reference(Dipole::Z)) {
        Ok(g) => c.check(g == 0.0, format!("Γ_k = {g:e} (must be exactly 0)")),
        Err(e) => c.fail(format!("error: {e}")),
    }
    c.finish(2, "out-of-plane dipole is dark at the zone center")
}

fn grazing_superradiance() -> Report {
    let mut c = Checks::default();
    let th = 0.45 * PI;
    match directional_mode(
        &geom(th, IncidencePlane::XZ, ProbePolarization::P),
        &reference(Dipole::Z),
    ) {
        Ok(m) => {
            let law = closed_rate(0.1) * th.sin().powi(2) / th.cos();
            c.check(
                rel(m.gamma, law) <= 1e-6,
                format!(
                    "Γ_k = {:.4} vs sin²θ/cosθ law {law:.4} (rel {:.1e} ≤ 1e-6)",
                    m.gamma,
                    rel(m.gamma, law)
                ),
            );
            c.check(
                rel(m.gamma, 149.0) <= 0.01,
                format!("vs 149 (rel {:.1e} ≤ 1e-2)", rel(m.gamma, 149.0)),
            );
        }
        Err(e) => c.fail(format!("error: {e}")),
    }
    c.finish(3, "grazing-incidence superradiance")
}

fn cooperative_shifts() -> Report {
    let mut c = Checks::default();
    let accel = AccelParams::default();
    let shift = |k: BlochVector, p: Dipole| delta_k(&k, &reference(p), accel).map(|s| s.value);
    let th = 0.45 * PI;
    let bloch = |t: f64, plane| geom(t, plane, ProbePolarization::P).bloch();
    let cases = [
        ("Δ_k(Γ, z)", shift(BlochVector::GAMMA, Dipole::Z), 31.4, 0.02),
        ("Δ_k(Γ, x)", shift(BlochVector::GAMMA, Dipole::X), -8.4, 0.03),
        (
            "Δ_k(0.45π, x, xz)",
            shift(bloch(th, IncidencePlane::XZ), Dipole::X),
            -9.4,
            0.03,
        ),
        (
            "Δ_k(0.45π, x, yz)",
            shift(bloch(th, IncidencePlane::YZ), Dipole::X),
            -8.6,
            0.03,
        ),
    ];
    for (label, got, want, tol) in cases {
        match got {
            Ok(v) => c.check(
                rel(v, want) <= tol,
                format!("{label} = {v:.3} vs {want} (rel {:.3} ≤ {tol})", rel(v, want)),
            ),
            Err(e) => c.fail(format!("{label}: {e}")),
        }
    }
    let lo = shift(bloch(0.01 * PI, IncidencePlane::XZ), Dipole::Z);
    let hi = shift(bloch(th, IncidencePlane::XZ), Dipole::Z);
    match (lo, hi) {
        (Ok(lo), Ok(hi)) => {
            let inc = hi - lo;
            c.check(
                (inc - 1.2).abs() <= 0.2,
                format!("z increase 0.01π→0.45π = {inc:.3} vs 1.2 ± 0.2"),
            );
        }
        (Err(e), _) | (_, Err(e)) => c.fail(format!("z increase: {e}")),
    }
    c.finish(4, "cooperative shifts")
}

fn oracle_equivalence<E: Executor>(exec: &E) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws: Vec<(BlochVector, SystemConfig)> = (0..50)
        .map(|_| {
            let d = rng.gen_range(0.1..0.45);
            let r = rng.gen_range(0.0..0.9) * K_PROBE;
            let a = rng.gen_range(0.0..2.0 * PI);
            let cfg = SystemConfig::new(d, 0.0, random_dipole(&mut rng)).expect("valid config");
            (BlochVector::new(r * a.cos(), r * a.sin()), cfg)
        })
        .collect();
    let out = exec.map(&draws, |(k, cfg)| {
        let exact = gamma_k(k, cfg)?;
        let oracle = gamma_k_realspace(k, cfg, MIN_CUTOFF)?;
        Ok::<_, crate::Error>((exact - oracle).abs() / exact.abs().max(1.0))
    });
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for r in &out {
        match r {
            Ok(e) => worst = worst.max(*e),
            Err(_) => errors += 1,
        }
    }
    c.check(errors == 0, format!("{} of 50 points evaluated", 50 - errors));
    c.check(
        worst <= 1e-3,
        format!("max deviation {worst:.2e} ≤ 1e-3 (relative to max(Γ_k, Γ_e))"),
    );
    c.finish(5, "reciprocal and real-space decay rates agree")
}

fn susceptibility_oracle<E: Executor>(exec: &E) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draws: Vec<_> = (0..25)
        .map(|i| {
            let (dip, theta) = if i % 2 == 0 {
                (Dipole::X, rng.gen_range(0.0..0.4 * PI))
            } else {
                (Dipole::Z, rng.gen_range(PI / 12.0..0.4 * PI))
            };
            let g = geom(theta, random_plane(&mut rng), ProbePolarization::P);
            let drive = DriveField::new(rng.gen_range(0.0..60.0), rng.gen_range(-15.0..15.0)).expect("finite drive");
            let dp = rng.gen_range(-40.0..40.0);
            (g, reference(dip), drive, dp)
        })
        .collect();
    let out = exec.map(&draws, |(g, cfg, drive, dp)| {
        let mode = directional_mode(g, cfg)?;
        let chi = chi_reduced(*dp, &EitParams::new(drive, &mode, cfg))?;
        let ss = steady_state_numeric(1e-4, drive, &mode, cfg, *dp)?;
        Ok::<_, crate::Error>((ss.chi_estimate() - chi).norm() / chi.norm())
    });
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (i, r) in out.iter().enumerate() {
        match r {
            Ok(e) => worst = worst.max(*e),
            Err(e) => failures.push(format!("draw {i}: {e}")),
        }
    }
    c.check(
        failures.is_empty(),
        if failures.is_empty() {
            "25 of 25 steady states reached".into()
        } else {
            format!(
                "{} of 25 steady states reached ({})",
                25 - failures.len(),
                failures.join(", ")
            )
        },
    );
    c.check(worst <= 1e-6, format!("max relative deviation {worst:.2e} ≤ 1e-6"));
    c.finish(6, "steady-state susceptibility matches the closed form")
}

fn decomposition_identity() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = linspace(-40.0, 60.0, 1001);
    let mut worst_beta: f64 = 0.0;
    let mut worst_vieta: f64 = 0.0;
    let mut c = Checks::default();
    for _ in 0..10 {
        let dip = if rng.gen_bool(0.5) { Dipole::X } else { Dipole::Z };
        let g = geom(
            rng.gen_range(0.05..0.4 * PI),
            random_plane(&mut rng),
            ProbePolarization::P,
        );
        let cfg = reference(dip);
        let drive = DriveField::new(rng.gen_range(1.0..60.0), rng.gen_range(-15.0..15.0)).expect("finite drive");
        let mode = match directional_mode(&g, &cfg) {
            Ok(m) => m,
            Err(e) => {
                c.fail(format!("mode: {e}"));
                continue;
            }
        };
        let p = EitParams::new(&drive, &mode, &cfg);
        let poles = dressed_poles(&p);
        let scale = (p.xi.norm() + p.eta.norm()).max(1.0);
        worst_vieta = worst_vieta
            .max((poles.plus + poles.minus - (p.xi + p.eta)).norm() / scale)
            .max((poles.plus * poles.minus - (p.xi * p.eta - drive.omega_c_sq())).norm() / (scale * scale));
        for &dp in &grid {
            match (chi_reduced(dp, &p), beta_split(dp, &p)) {
                (Ok(chi), Ok((b1, b2))) => worst_beta = worst_beta.max((b1 + b2 - chi).norm() / chi.norm()),
                _ => c.fail(format!("evaluation failed at Δ_p = {dp}")),
            }
        }
    }
    c.check(
        worst_beta <= 1e-12,
        format!("max |β̃₁+β̃₂−χ̃|/|χ̃| = {worst_beta:.2e} ≤ 1e-12"),
    );
    c.check(
        worst_vieta <= 1e-10,
        format!("max pole-sum/product residual {worst_vieta:.2e} ≤ 1e-10"),
    );
    c.finish(7, "two-pole decomposition")
}

fn perfect_mirror() -> Report {
    let mut c = Checks::default();
    let cfg = lossless(Dipole::X);
    let g = ProbeGeometry::normal(ProbePolarization::P);
    let res = directional_mode(&g, &cfg).and_then(|m| scattering_with_mode(m.delta, &g, &DriveField::off(), &cfg, &m));
    match res {
        Ok(r) => {
            let (rpp, tpp) = (r.r[0][0], r.t[0][0]);
            c.check((rpp - 1.0).abs() <= 1e-8, format!("R_pp = {rpp:.12} (|R−1| ≤ 1e-8)"));
            c.check(tpp <= 1e-8, format!("T_pp = {tpp:.2e} ≤ 1e-8"));
        }
        Err(e) => c.fail(format!("error: {e}")),
    }
    c.finish(8, "two-level array is a perfect mirror on resonance")
}

fn energy_conservation() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..200 {
        let cfg = lossless(random_dipole(&mut rng));
        let g = geom(
            rng.gen_range(0.0..0.45 * PI),
            random_plane(&mut rng),
            random_probe(&mut rng),
        );
        let drive = DriveField::new(rng.gen_range(0.0..60.0), rng.gen_range(-15.0..15.0)).expect("finite drive");
        match scattering_matrices(rng.gen_range(-60.0..60.0), &g, &drive, &cfg) {
            Ok(r) => worst = worst.max((r.sum_rt(g.polarization()) - 1.0).abs()),
            Err(_) => errors += 1,
        }
    }
    c.check(
        errors == 0,
        format!("{} of 200 lossless points evaluated", 200 - errors),
    );
    c.check(worst <= 1e-10, format!("max |ΣR+ΣT−1| = {worst:.2e} ≤ 1e-10"));

    let g = geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P);
    let drive = DriveField::new(15.0, 0.0).expect("finite drive");
    match rt_spectrum(&linspace(-40.0, 60.0, 1001), &g, &drive, &reference(Dipole::Z)) {
        Ok(t) => {
            let r = t.column("R_pp").unwrap_or_default();
            let sum = t.column("sum_RT").unwrap_or_default();
            let band: Vec<f64> = r
                .iter()
                .zip(&sum)
                .filter(|(r, _)| **r > 0.01)
                .map(|(_, s)| *s)
                .collect();
            let max = band.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            c.check(
                !band.is_empty() && max < 1.0,
                format!(
                    "Γ_r = 0.3: max ΣR+ΣT inside the reflection bands = {max:.6} < 1 ({} rows)",
                    band.len()
                ),
            );
        }
        Err(e) => c.fail(format!("lossy spectrum: {e}")),
    }
    c.finish(9, "energy conservation")
}

fn polarization_selectivity() -> Report {
    let mut c = Checks::default();
    let grid = linspace(-40.0, 60.0, 201);
    let drive = DriveField::new(15.0, 0.0).expect("finite drive");
    let cases = [
        (
            "z, s probe",
            Dipole::Z,
            IncidencePlane::XZ,
            ProbePolarization::S,
            "T_ss",
            "R_ss",
        ),
        (
            "z, s probe, yz",
            Dipole::Z,
            IncidencePlane::YZ,
            ProbePolarization::S,
            "T_ss",
            "R_ss",
        ),
        (
            "x, xz, s probe",
            Dipole::X,
            IncidencePlane::XZ,
            ProbePolarization::S,
            "T_ss",
            "R_ss",
        ),
        (
            "x, yz, p probe",
            Dipole::X,
            IncidencePlane::YZ,
            ProbePolarization::P,
            "T_pp",
            "R_pp",
        ),
    ];
    for (label, dip, plane, pol, tcol, rcol) in cases {
        let g = geom(PI / 4.0, plane, pol);
        match rt_spectrum(&grid, &g, &drive, &reference(dip)) {
            Ok(t) => {
                let tv = t.column(tcol).unwrap_or_default();
                let rv = t.column(rcol).unwrap_or_default();
                let ok = tv.iter().all(|&v| v == 1.0) && rv.iter().all(|&v| v == 0.0);
                c.check(ok, format!("{label}: {tcol} ≡ 1, {rcol} ≡ 0 on {} rows", tv.len()));
            }
            Err(e) => c.fail(format!("{label}: {e}")),
        }
    }
    c.finish(10, "polarization selectivity")
}

fn dual_band<E: Executor>(exec: &E) -> Report {
    let mut c = Checks::default();
    let base = OperatingPoint {
        geometry: geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P),
        drive: DriveField::new(15.0, 0.0).expect("finite drive"),
        config: reference(Dipole::Z),
    };
    match rt_spectrum(&linspace(-40.0, 60.0, 1001), &base.geometry, &base.drive, &base.config) {
        Ok(t) => {
            let dp = t.column("delta_p").unwrap_or_default();
            let r = t.column("R_pp").unwrap_or_default();
            let maxima = local_maxima(&r);
            let peak = maxima.iter().map(|&i| r[i]).fold(0.0, f64::max);
            c.check(
                maxima.len() == 2,
                format!("{} local maxima of R_pp (need exactly 2)", maxima.len()),
            );
            c.check(peak > 0.97, format!("peak R = {peak:.4} > 0.97"));
            if let Ok((n, b)) = extract_bands(&dp, &r) {
                c.check(
                    true,
                    format!(
                        "narrow at {:.2} (R {:.3}, FWHM {:.2}), broad at {:.2} (R {:.3}, FWHM {:.2})",
                        n.center, n.peak, n.fwhm, b.center, b.peak, b.fwhm
                    ),
                );
            }
        }
        Err(e) => c.fail(format!("spectrum: {e}")),
    }

    let dp = linspace(-60.0, 90.0, 6001);
    let mut trend = |param: SweepParam, values: Vec<f64>, increasing: bool| {
        let label = param.name();
        let widths = spectra_sweep(&[(param, values.clone())], &dp, &base, exec)
            .and_then(|t| sweep_bands(&t, ProbePolarization::P, 0.2))
            .map(|bands| {
                bands
                    .into_iter()
                    .map(|b| b.map(|(n, _)| n.fwhm))
                    .collect::<Result<Vec<_>, _>>()
            });
        match widths {
            Ok(Ok(w)) => {
                let ok = w.windows(2).all(|p| if increasing { p[1] > p[0] } else { p[1] < p[0] });
                c.check(
                    ok,
                    format!(
                        "narrow FWHM {} over {label} ∈ [{}, {}] ({} points): {:.3} → {:.3}",
                        if increasing { "increasing" } else { "decreasing" },
                        values[0],
                        values[values.len() - 1],
                        w.len(),
                        w[0],
                        w[w.len() - 1]
                    ),
                );
            }
            Ok(Err(e)) | Err(e) => c.fail(format!("{label} sweep: {e}")),
        }
    };
    trend(SweepParam::OmegaC, linspace(5.0, 30.0, 26), true);
    trend(SweepParam::DeltaC, linspace(-15.0, 15.0, 31), false);
    c.finish(11, "dual reflection band and its tunability")
}

fn dark_point() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..100 {
        let cfg = lossless(random_dipole(&mut rng));
        let g = geom(
            rng.gen_range(0.0..0.45 * PI),
            random_plane(&mut rng),
            random_probe(&mut rng),
        );
        let dc = rng.gen_range(-15.0..15.0);
        let drive = DriveField::new(rng.gen_range(0.1..60.0), dc).expect("finite drive");
        match scattering_matrices(-dc, &g, &drive, &cfg) {
            Ok(r) => {
                let n = g.polarization().index();
                worst = worst.max((r.t[n][n] - 1.0).abs());
            }
            Err(_) => errors += 1,
        }
    }
    c.check(errors == 0, format!("{} of 100 draws evaluated", 100 - errors));
    c.check(
        worst <= 1e-12,
        format!("max |T − 1| at Δ_p = −Δ_c: {worst:.2e} ≤ 1e-12"),
    );
    c.finish(12, "transparency at the dark point")
}

fn diffraction<E: Executor>(exec: &E) -> Report {
    let mut c = Checks::default();
    let g = geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::P);
    let ds = linspace(0.05, 0.95, 181);
    let step = ds[1] - ds[0];
    let d_star = diffraction_threshold(&g).d_star;
    match mode_vs_lattice(&ds, &g, &reference(Dipole::X), exec) {
        Ok(t) => {
            let n = t.column("propagating_orders").unwrap_or_default();
            let gamma = t.column("gamma_k").unwrap_or_default();
            let changes: Vec<usize> = (0..n.len() - 1).filter(|&i| n[i + 1] != n[i]).collect();
            match changes.as_slice() {
                [i] => {
                    let at = 0.5 * (ds[*i] + ds[i + 1]);
                    c.check(
                        (at - d_star).abs() <= step,
                        format!("order count {}→{} at d ≈ {at:.4} vs 2/3 ± {step:.4}", n[*i], n[i + 1]),
                    );
                }
                _ => c.fail(format!("expected one order-count step, found {}", changes.len())),
            }
            // Γ_k scales as 1/d² away from thresholds, so the feature is the
            // largest jump of the dimensionless d²Γ_k between finite rows
            let scaled: Vec<f64> = ds.iter().zip(&gamma).map(|(d, g)| d * d * g).collect();
            let jump = (0..scaled.len() - 1)
                .filter(|&i| scaled[i].is_finite() && scaled[i + 1].is_finite())
                .max_by(|&a, &b| {
                    (scaled[a + 1] - scaled[a])
                        .abs()
                        .total_cmp(&(scaled[b + 1] - scaled[b]).abs())
                });
            match jump {
                Some(i) => {
                    let at = 0.5 * (ds[i] + ds[i + 1]);
                    c.check(
                        (at - d_star).abs() <= step,
                        format!("largest jump of d²Γ_k at d ≈ {at:.4} vs 2/3 ± {step:.4}"),
                    );
                }
                None => c.fail("no finite Γ_k rows".into()),
            }
            let flagged = t.flags.iter().any(|f| f.contains(Flags::NONSPECULAR));
            c.check(flagged, "rows past the threshold carry the nonspecular flag".into());
        }
        Err(e) => c.fail(format!("lattice sweep: {e}")),
    }

    let th = PI / 6.0;
    let ds = diffraction_threshold(&geom(th, IncidencePlane::XZ, ProbePolarization::P)).d_star;
    match (
        order_contribution_xx(ds, th),
        order_contribution_xx(0.9 * ds, th),
        order_contribution_xx(1.05 * ds, th),
    ) {
        (Ok(at), Ok(below), Ok(above)) => {
            c.check(
                at.value.norm() == 0.0,
                format!("(1,0) xx term at d* = {:e}", at.value.norm()),
            );
            c.check(
                below.value.im == 0.0 && below.value.re != 0.0 && above.value.im > 0.0,
                format!("below d*: {:.3e}; above d*: {:.3e}i", below.value.re, above.value.im),
            );
        }
        _ => c.fail("xx term evaluation failed".into()),
    }
    match extract_bands_with_threshold(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0], 0.5) {
        Err(crate::Error::NotDualBand { .. }) => {}
        _ => c.fail("single peak must not count as a dual band".into()),
    }
    c.finish(13, "diffraction thresholds")
}

/// Runs one criterion by number.
pub fn run<E: Executor>(id: u32, exec: &E) -> Option<Report> {
    Some(match id {
        1 => gamma_point_inplane(),
        2 => gamma_point_subradiant(),
        3 => grazing_superradiance(),
        4 => cooperative_shifts(),
        5 => oracle_equivalence(exec),
        6 => susceptibility_oracle(exec),
        7 => decomposition_identity(),
        8 => perfect_mirror(),
        9 => energy_conservation(),
        10 => polarization_selectivity(),
        11 => dual_band(exec),
        12 => dark_point(),
        13 => diffraction(exec),
        _ => return None,
    })
}

pub fn run_all<E: Executor>(exec: &E) -> Vec<Report> {
    (1..=CRITERIA).filter_map(|id| run(id, exec)).collect()
}
