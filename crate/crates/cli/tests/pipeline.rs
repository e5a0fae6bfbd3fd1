use std::f64::consts::PI;

use arraymirror_core::bands::{band_structure, directional_mode, mode_vs_lattice};
use arraymirror_core::eit::{chi_reduced, dressed_poles, steady_state_numeric, EitParams};
use arraymirror_core::green::{eta, gamma_k, gamma_k_realspace, AccelParams, MIN_CUTOFF};
use arraymirror_core::scattering::{
    diffraction_threshold, extract_bands, order_contribution_xx, rt_spectrum, scattering_matrices, spectra_sweep,
    sweep_bands, OperatingPoint, SweepParam,
};
use arraymirror_core::table::linspace;
use arraymirror_core::units::{bz_path, SymmetryPoint};
use arraymirror_core::{
    BlochVector, Dipole, DriveField, Error, Flags, IncidencePlane, ProbeGeometry, ProbePolarization, Sequential,
    SystemConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn geom(theta: f64, plane: IncidencePlane, pol: ProbePolarization) -> ProbeGeometry {
    ProbeGeometry::new(theta, plane, pol).unwrap()
}

#[test]
fn gamma_point_closed_forms() {
    let x = SystemConfig::reference(Dipole::X);
    let g = gamma_k(&BlochVector::GAMMA, &x).unwrap();
    let closed = 3.0 * PI / (4.0 * PI * PI * 0.01);
    assert!((g - closed).abs() < 1e-12 * closed);
    assert!((g - 23.9).abs() < 0.005 * 23.9);
    assert_eq!(
        gamma_k(&BlochVector::GAMMA, &SystemConfig::reference(Dipole::Z)).unwrap(),
        0.0
    );
}

#[test]
fn grazing_z_law() {
    let c = SystemConfig::reference(Dipole::Z);
    let th = 0.45 * PI;
    let m = directional_mode(&geom(th, IncidencePlane::YZ, ProbePolarization::P), &c).unwrap();
    let law = 3.0 / (4.0 * PI * 0.01) * th.sin().powi(2) / th.cos();
    assert!((m.gamma - law).abs() < 1e-9 * law);
    assert!((m.gamma - 149.0).abs() < 0.01 * 149.0);
}

#[test]
fn realspace_oracle_agrees_in_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let d = rng.gen_range(0.1..0.45);
        let r = rng.gen_range(0.0..0.9) * 2.0 * PI;
        let a = rng.gen_range(0.0..2.0 * PI);
        let k = BlochVector::new(r * a.cos(), r * a.sin());
        let p = Dipole::new([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
        .unwrap();
        let c = SystemConfig::new(d, 0.0, p).unwrap();
        let exact = gamma_k(&k, &c).unwrap();
        let oracle = gamma_k_realspace(&k, &c, MIN_CUTOFF).unwrap();
        assert!(
            (exact - oracle).abs() <= 1e-3 * exact.abs().max(1.0),
            "{exact} vs {oracle}"
        );
    }
}

#[test]
fn weak_probe_steady_state_matches_susceptibility() {
    let c = SystemConfig::reference(Dipole::X);
    let g = geom(0.3, IncidencePlane::XZ, ProbePolarization::P);
    let mode = directional_mode(&g, &c).unwrap();
    let drive = DriveField::new(12.0, 4.0).unwrap();
    let dp = -3.0;
    let chi = chi_reduced(dp, &EitParams::new(&drive, &mode, &c)).unwrap();
    let ss = steady_state_numeric(1e-4, &drive, &mode, &c, dp).unwrap();
    assert!((ss.chi_estimate() - chi).norm() < 1e-6 * chi.norm());
}

#[test]
fn band_table_feeds_scattering_mode() {
    let c = SystemConfig::reference(Dipole::Z);
    let pts = ["G", "X", "M", "G"].map(|s| SymmetryPoint::from_char(s.chars().next().unwrap()).unwrap().bloch(&c));
    let path = bz_path(&pts, 5, &c).unwrap();
    let t = band_structure(&path, &c, AccelParams::default(), &Sequential);
    assert_eq!(t.rows.len(), 13);
    assert_eq!(t.rows[0].delta, eta(&BlochVector::GAMMA, &c).unwrap().delta);
    assert!(t.rows.iter().all(|r| r.gamma >= 0.0));
}

#[test]
fn dual_band_mirror() {
    let c = SystemConfig::reference(Dipole::Z);
    let g = geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P);
    let drive = DriveField::new(15.0, 0.0).unwrap();
    let t = rt_spectrum(&linspace(-40.0, 60.0, 1001), &g, &drive, &c).unwrap();
    let (narrow, broad) = extract_bands(&t.column("delta_p").unwrap(), &t.column("R_pp").unwrap()).unwrap();
    let mode = directional_mode(&g, &c).unwrap();
    let poles = dressed_poles(&EitParams::new(&drive, &mode, &c));
    assert!((narrow.center - poles.minus.re).abs() < 2.0);
    assert!((broad.center - poles.plus.re).abs() < 2.0);
    assert!(broad.peak > 0.97);
    let ts = t.column("T_ss").unwrap();
    assert!(ts.iter().all(|&v| v == 1.0));
}

#[test]
fn bandwidths_grow_with_angle() {
    let base = OperatingPoint {
        geometry: geom(PI / 6.0, IncidencePlane::XZ, ProbePolarization::P),
        drive: DriveField::new(15.0, 0.0).unwrap(),
        config: SystemConfig::reference(Dipole::Z),
    };
    let axes = vec![(SweepParam::Theta, linspace(PI / 6.0, PI / 3.0, 4))];
    let t = spectra_sweep(&axes, &linspace(-60.0, 120.0, 3601), &base, &Sequential).unwrap();
    let bands: Vec<_> = sweep_bands(&t, ProbePolarization::P, 0.5)
        .unwrap()
        .into_iter()
        .map(|b| b.unwrap())
        .collect();
    for w in bands.windows(2) {
        assert!(w[1].0.fwhm > w[0].0.fwhm);
        assert!(w[1].1.fwhm > w[0].1.fwhm);
    }
}

#[test]
fn threshold_marks_order_step() {
    let g = geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::P);
    let ds = linspace(0.05, 0.95, 181);
    let t = mode_vs_lattice(&ds, &g, &SystemConfig::reference(Dipole::X), &Sequential).unwrap();
    let n = t.column("propagating_orders").unwrap();
    let step = n.windows(2).position(|w| w[1] > w[0]).unwrap();
    let d_star = diffraction_threshold(&g).d_star;
    assert!(ds[step] <= d_star + 1e-12 && ds[step + 1] >= d_star - 1e-12);
    assert!(t.flags.iter().any(|f| f.contains(Flags::NONSPECULAR)));
    let c = order_contribution_xx(d_star, PI / 6.0).unwrap();
    assert_eq!(c.value.norm(), 0.0);
}

#[test]
fn errors_surface_unchanged() {
    let c = SystemConfig::new(2.0 / 3.0, 0.0, Dipole::X).unwrap();
    let g = geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::S);
    let e = scattering_matrices(0.0, &g, &DriveField::off(), &c).unwrap_err();
    assert!(matches!(e, Error::AnomalyDivergence { .. }));
    assert!(ProbeGeometry::new(0.5 * PI, IncidencePlane::XZ, ProbePolarization::P).is_err());
}
