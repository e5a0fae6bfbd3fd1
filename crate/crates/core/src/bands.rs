//! Band tables along Brillouin-zone paths and directional-mode sweeps over
//! incidence angle and lattice constant.

use alloc::vec::Vec;

use crate::exec::Executor;
use crate::green::{eta_with, AccelParams, ModePoint};
use crate::table::{Axis, Flags, SweepTable};
use crate::units::{BlochVector, IncidencePlane, PathPoint, ProbeGeometry, ProbePolarization, SystemConfig};
use crate::Result;

/// One row of a band table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandRow {
    pub arc: f64,
    pub k: BlochVector,
    /// `Δ_k`; NaN when the row failed.
    pub delta: f64,
    /// `Γ_k`; `+∞` on a divergent anomaly, NaN on other failures.
    pub gamma: f64,
    pub light_cone: bool,
    pub propagating: usize,
    pub flags: Flags,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandTable {
    pub waypoints: Vec<BlochVector>,
    pub config: SystemConfig,
    pub rows: Vec<BandRow>,
}

pub const BAND_COLUMNS: [&str; 7] = [
    "arc",
    "kx",
    "ky",
    "delta_k",
    "gamma_k",
    "light_cone",
    "propagating_orders",
];

impl BandTable {
    pub fn to_table(&self) -> SweepTable {
        let arcs = self.rows.iter().map(|r| r.arc).collect();
        let mut t = SweepTable::new(alloc::vec![Axis::new("arc", arcs)], &BAND_COLUMNS);
        for r in &self.rows {
            t.push(
                alloc::vec![
                    r.arc,
                    r.k.kx,
                    r.k.ky,
                    r.delta,
                    r.gamma,
                    if r.light_cone { 1.0 } else { 0.0 },
                    r.propagating as f64,
                ],
                r.flags,
            );
        }
        t
    }
}

/// Evaluates `η(k)`, turning a failure into a flagged placeholder.
pub fn mode_or_flag(k: &BlochVector, config: &SystemConfig, accel: AccelParams) -> (ModePoint, Flags) {
    match eta_with(k, config, accel) {
        Ok(m) => {
            let f = m.flags();
            (m, f)
        }
        Err(e) => {
            let mut flags = Flags::from_error(&e);
            let mut gamma = f64::NAN;
            if flags.contains(Flags::ANOMALY_DIVERGENCE) {
                // a divergent order always sits inside the proximity window
                flags |= Flags::ANOMALY_PROXIMITY;
                gamma = f64::INFINITY;
            }
            let mut m = ModePoint::from_parts(*k, f64::NAN, gamma);
            m.propagating = crate::green::reciprocal_orders(k, config, 3)
                .iter()
                .filter(|o| o.propagating)
                .count();
            (m, flags)
        }
    }
}

/// One mode per path sample, in path order. Failing rows are flagged, not
/// dropped.
pub fn band_structure<E: Executor>(
    path: &[PathPoint],
    config: &SystemConfig,
    accel: AccelParams,
    exec: &E,
) -> BandTable {
    let rows = exec.map(path, |p| {
        let (m, flags) = mode_or_flag(&p.k, config, accel);
        BandRow {
            arc: p.arc,
            k: p.k,
            delta: m.delta,
            gamma: m.gamma,
            light_cone: p.k.inside_light_cone(),
            propagating: m.propagating,
            flags,
        }
    });
    let mut waypoints = Vec::new();
    if let (Some(first), Some(last)) = (path.first(), path.last()) {
        waypoints.push(first.k);
        waypoints.push(last.k);
    }
    BandTable {
        waypoints,
        config: *config,
        rows,
    }
}

/// The mode excited by a plane wave at the given incidence.
pub fn directional_mode(geometry: &ProbeGeometry, config: &SystemConfig) -> Result<ModePoint> {
    eta_with(&geometry.bloch(), config, AccelParams::default())
}

pub const ANGLE_COLUMNS: [&str; 4] = ["theta", "delta_k", "gamma_k", "propagating_orders"];

/// `Δ_k`, `Γ_k` against incidence angle in one plane.
pub fn mode_vs_angle<E: Executor>(
    thetas: &[f64],
    plane: IncidencePlane,
    config: &SystemConfig,
    exec: &E,
) -> Result<SweepTable> {
    let geoms = thetas
        .iter()
        .map(|&t| ProbeGeometry::new(t, plane, ProbePolarization::P))
        .collect::<Result<Vec<_>>>()?;
    let rows = exec.map(&geoms, |g| mode_or_flag(&g.bloch(), config, AccelParams::default()));
    let mut t = SweepTable::new(alloc::vec![Axis::new("theta", thetas.to_vec())], &ANGLE_COLUMNS);
    for (th, (m, f)) in thetas.iter().zip(rows) {
        t.push(alloc::vec![*th, m.delta, m.gamma, m.propagating as f64], f);
    }
    Ok(t)
}

pub const LATTICE_COLUMNS: [&str; 5] = ["d", "delta_k", "gamma_k", "propagating_orders", "anomaly"];

/// `Δ_k`, `Γ_k` and the number of open diffraction orders against lattice
/// constant at fixed incidence. Anomaly rows stay in the table.
pub fn mode_vs_lattice<E: Executor>(
    ds: &[f64],
    geometry: &ProbeGeometry,
    template: &SystemConfig,
    exec: &E,
) -> Result<SweepTable> {
    let configs = ds
        .iter()
        .map(|&d| template.with_lattice_constant(d))
        .collect::<Result<Vec<_>>>()?;
    let k = geometry.bloch();
    let rows = exec.map(&configs, |c| mode_or_flag(&k, c, AccelParams::default()));
    let mut t = SweepTable::new(alloc::vec![Axis::new("d", ds.to_vec())], &LATTICE_COLUMNS);
    for (d, (m, f)) in ds.iter().zip(rows) {
        let anomaly = f.contains(Flags::ANOMALY_PROXIMITY) || f.contains(Flags::ANOMALY_DIVERGENCE);
        t.push(
            alloc::vec![
                *d,
                m.delta,
                m.gamma,
                m.propagating as f64,
                if anomaly { 1.0 } else { 0.0 }
            ],
            f,
        );
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::table::linspace;
    use crate::units::{bz_path, Dipole, SymmetryPoint};
    use core::f64::consts::PI;

    fn cfg(p: Dipole) -> SystemConfig {
        SystemConfig::reference(p)
    }

    #[test]
    fn gamma_row_of_z_band() {
        let c = cfg(Dipole::Z);
        let pts = [SymmetryPoint::Gamma.bloch(&c), SymmetryPoint::X.bloch(&c)];
        let path = bz_path(&pts, 11, &c).unwrap();
        let t = band_structure(&path, &c, AccelParams::default(), &Sequential);
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.rows[0].gamma, 0.0);
        assert!((t.rows[0].delta - 29.601).abs() < 1e-2);
        for r in &t.rows[1..] {
            if r.flags.contains(Flags::ANOMALY_DIVERGENCE) {
                // k = 2π sits on the light line
                assert!((r.k.norm() - 2.0 * PI).abs() < 1e-9);
                assert_eq!(r.gamma, f64::INFINITY);
                continue;
            }
            assert!(r.gamma >= 0.0);
            assert_eq!(r.light_cone, r.k.norm() < 2.0 * PI);
            if !r.light_cone {
                assert_eq!(r.gamma, 0.0);
            }
        }
        let table = t.to_table();
        assert_eq!(table.columns.len(), BAND_COLUMNS.len());
        assert_eq!(table.len(), 11);
    }

    #[test]
    fn z_band_path_symmetry() {
        let c = cfg(Dipole::Z);
        let e = c.zone_edge();
        let a = bz_path(&[BlochVector::GAMMA, BlochVector::new(e, 0.0)], 9, &c).unwrap();
        let b = bz_path(&[BlochVector::GAMMA, BlochVector::new(0.0, e)], 9, &c).unwrap();
        let ta = band_structure(&a, &c, AccelParams::default(), &Sequential);
        let tb = band_structure(&b, &c, AccelParams::default(), &Sequential);
        for (ra, rb) in ta.rows.iter().zip(&tb.rows) {
            assert!((ra.delta - rb.delta).abs() < 1e-9);
            assert!((ra.gamma - rb.gamma).abs() < 1e-9);
        }
    }

    #[test]
    fn x_band_depends_on_path() {
        let c = cfg(Dipole::X);
        let k = 3.0;
        let along = eta_with(&BlochVector::new(k, 0.0), &c, AccelParams::default()).unwrap();
        let across = eta_with(&BlochVector::new(0.0, k), &c, AccelParams::default()).unwrap();
        assert!((along.gamma - across.gamma).abs() > 1.0);
        assert!((along.delta - across.delta).abs() > 0.1);
    }

    #[test]
    fn grazing_modes() {
        let th = 0.45 * PI;
        let z = directional_mode(
            &ProbeGeometry::new(th, IncidencePlane::XZ, ProbePolarization::P).unwrap(),
            &cfg(Dipole::Z),
        )
        .unwrap();
        assert!((z.gamma - 148.87).abs() < 0.1);
        let xz = directional_mode(
            &ProbeGeometry::new(th, IncidencePlane::XZ, ProbePolarization::P).unwrap(),
            &cfg(Dipole::X),
        )
        .unwrap();
        let yz = directional_mode(
            &ProbeGeometry::new(th, IncidencePlane::YZ, ProbePolarization::P).unwrap(),
            &cfg(Dipole::X),
        )
        .unwrap();
        assert!((xz.delta + 11.178).abs() < 1e-2, "{}", xz.delta);
        assert!((yz.delta + 10.397).abs() < 1e-2, "{}", yz.delta);
    }

    #[test]
    fn angle_sweep_trends() {
        let thetas = linspace(0.0, 0.45 * PI, 31);
        let t = mode_vs_angle(&thetas, IncidencePlane::XZ, &cfg(Dipole::X), &Sequential).unwrap();
        let g = t.column("gamma_k").unwrap();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        let tz = mode_vs_angle(&thetas, IncidencePlane::XZ, &cfg(Dipole::Z), &Sequential).unwrap();
        assert_eq!(tz.column("gamma_k").unwrap()[0], 0.0);
        assert!(mode_vs_angle(&[0.6 * PI], IncidencePlane::XZ, &cfg(Dipole::Z), &Sequential).is_err());
    }

    #[test]
    fn lattice_sweep_order_step() {
        let g = ProbeGeometry::new(PI / 6.0, IncidencePlane::YZ, ProbePolarization::P).unwrap();
        let ds = linspace(0.6, 0.72, 25);
        let t = mode_vs_lattice(&ds, &g, &cfg(Dipole::X), &Sequential).unwrap();
        let n = t.column("propagating_orders").unwrap();
        for (d, n) in ds.iter().zip(&n) {
            let want = if *d > 2.0 / 3.0 { 2.0 } else { 1.0 };
            assert_eq!(*n, want, "d = {d}");
        }
    }

    #[test]
    fn anomaly_row_is_flagged_not_dropped() {
        let g = ProbeGeometry::new(PI / 6.0, IncidencePlane::YZ, ProbePolarization::P).unwrap();
        let t = mode_vs_lattice(&[0.5, 2.0 / 3.0, 0.8], &g, &cfg(Dipole::X), &Sequential).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.flags[1].contains(Flags::ANOMALY_DIVERGENCE));
        assert_eq!(t.rows[1][2], f64::INFINITY);
        assert!(t.flags[0].is_empty());
        assert!(t.flags[2].contains(Flags::NONSPECULAR));
    }
}
