//! Polarization-resolved reflection and transmission of the array, band
//! metrics of the reflection spectrum, and diffraction-threshold analysis.
//!
//! `S±_μν = A χ̃(Δ_p) (e_μ±·℘)(℘·e_ν⁺)` with `A = i(3π/2)Γ_e/(d²k′k′_z)`;
//! `T = |δ + S⁺|²`, `R = |S⁻|²`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bands::directional_mode;
use crate::eit::{chi_reduced, EitParams};
use crate::exec::Executor;
use crate::green::{ModePoint, PROXIMITY};
use crate::table::{Axis, Flags, SweepTable};
use crate::units::{
    DriveField, IncidencePlane, ProbeGeometry, ProbePolarization, SystemConfig, GAMMA_E, K_PROBE, WAVELENGTH,
};
use crate::{Error, Result};

/// `e_p±`, `e_s±` for one incidence. `e_s` is the same for both directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationBasis {
    pub p_plus: [f64; 3],
    pub p_minus: [f64; 3],
    pub s_plus: [f64; 3],
    pub s_minus: [f64; 3],
}

impl PolarizationBasis {
    /// Basis vector for polarization `mu`; `forward` picks the `+` set.
    pub fn vector(&self, mu: ProbePolarization, forward: bool) -> [f64; 3] {
        match (mu, forward) {
            (ProbePolarization::P, true) => self.p_plus,
            (ProbePolarization::P, false) => self.p_minus,
            (ProbePolarization::S, true) => self.s_plus,
            (ProbePolarization::S, false) => self.s_minus,
        }
    }
}

/// In-plane direction `(cos φ, sin φ)` of the incidence plane, exact.
fn azimuth(plane: IncidencePlane) -> (f64, f64) {
    match plane {
        IncidencePlane::XZ => (1.0, 0.0),
        IncidencePlane::YZ => (0.0, 1.0),
    }
}

/// `e_p± = ±(k′_z/(k′k′_∥))(k′_x, k′_y, ∓k′_∥²/k′_z)`, `e_s = (k′_y, −k′_x, 0)/k′_∥`,
/// written in `θ, φ` so that `θ = 0` is the `k′_∥ → 0⁺` limit along the plane.
fn basis_at(theta: f64, (cp, sp): (f64, f64)) -> PolarizationBasis {
    let (st, ct) = theta.sin_cos();
    let s = [sp, -cp, 0.0];
    PolarizationBasis {
        p_plus: [ct * cp, ct * sp, -st],
        p_minus: [-ct * cp, -ct * sp, -st],
        s_plus: s,
        s_minus: s,
    }
}

pub fn sp_basis(geometry: &ProbeGeometry, _config: &SystemConfig) -> PolarizationBasis {
    basis_at(geometry.theta(), azimuth(geometry.plane()))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Reduced prefactor `A = i(3π/2)Γ_e/(d²k′k′_z)`.
pub fn prefactor(geometry: &ProbeGeometry, config: &SystemConfig) -> Complex64 {
    let d = config.lattice_constant();
    Complex64::new(
        0.0,
        1.5 * core::f64::consts::PI * GAMMA_E / (d * d * K_PROBE * geometry.kz()),
    )
}

type Mat2 = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringResult {
    /// `S⁺[μ][ν]`, indices in `p, s` order.
    pub s_plus: Mat2,
    pub s_minus: Mat2,
    pub r: [[f64; 2]; 2],
    pub t: [[f64; 2]; 2],
    pub chi: Complex64,
    pub delta_p: f64,
    pub geometry: ProbeGeometry,
    pub drive: DriveField,
    pub mode: ModePoint,
}

impl ScatteringResult {
    /// `Σ_μ (R_μν + T_μν)` for incident polarization `nu`.
    pub fn sum_rt(&self, nu: ProbePolarization) -> f64 {
        let n = nu.index();
        (0..2).map(|m| self.r[m][n] + self.t[m][n]).sum()
    }

    /// Specular flux missing for the driven polarization.
    pub fn nonspecular_loss(&self) -> f64 {
        1.0 - self.sum_rt(self.geometry.polarization())
    }

    pub fn reflectivity(&self, mu: ProbePolarization, nu: ProbePolarization) -> f64 {
        self.r[mu.index()][nu.index()]
    }

    pub fn transmissivity(&self, mu: ProbePolarization, nu: ProbePolarization) -> f64 {
        self.t[mu.index()][nu.index()]
    }
}

const POLS: [ProbePolarization; 2] = [ProbePolarization::P, ProbePolarization::S];

fn matrices(basis: &PolarizationBasis, pv: [f64; 3], a_chi: Complex64) -> (Mat2, Mat2) {
    let zero = Complex64::new(0.0, 0.0);
    let mut sp = [[zero; 2]; 2];
    let mut sm = [[zero; 2]; 2];
    for (m, &mu) in POLS.iter().enumerate() {
        for (n, &nu) in POLS.iter().enumerate() {
            let inc = dot(pv, basis.vector(nu, true));
            sp[m][n] = a_chi * (dot(basis.vector(mu, true), pv) * inc);
            sm[m][n] = a_chi * (dot(basis.vector(mu, false), pv) * inc);
        }
    }
    (sp, sm)
}

fn intensities(sp: &Mat2, sm: &Mat2) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let mut r = [[0.0; 2]; 2];
    let mut t = [[0.0; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            let delta = if m == n { 1.0 } else { 0.0 };
            t[m][n] = (sp[m][n] + delta).norm_sqr();
            r[m][n] = sm[m][n].norm_sqr();
        }
    }
    (r, t)
}

/// Scattering matrices with a precomputed directional mode.
pub fn scattering_with_mode(
    dp: f64,
    geometry: &ProbeGeometry,
    drive: &DriveField,
    config: &SystemConfig,
    mode: &ModePoint,
) -> Result<ScatteringResult> {
    if !dp.is_finite() {
        return Err(Error::OutOfRange {
            what: "delta_p",
            value: dp,
            expected: "finite detuning",
        });
    }
    let chi = chi_reduced(dp, &EitParams::new(drive, mode, config))?;
    let basis = sp_basis(geometry, config);
    let (s_plus, s_minus) = matrices(&basis, config.dipole().vector(), prefactor(geometry, config) * chi);
    let (r, t) = intensities(&s_plus, &s_minus);
    Ok(ScatteringResult {
        s_plus,
        s_minus,
        r,
        t,
        chi,
        delta_p: dp,
        geometry: *geometry,
        drive: *drive,
        mode: *mode,
    })
}

pub fn scattering_matrices(
    dp: f64,
    geometry: &ProbeGeometry,
    drive: &DriveField,
    config: &SystemConfig,
) -> Result<ScatteringResult> {
    let mode = directional_mode(geometry, config)?;
    scattering_with_mode(dp, geometry, drive, config, &mode)
}

pub const RT_COLUMNS: [&str; 11] = [
    "delta_p",
    "R_pp",
    "R_ps",
    "R_sp",
    "R_ss",
    "T_pp",
    "T_ps",
    "T_sp",
    "T_ss",
    "sum_RT",
    "nonspecular_loss",
];

fn rt_values(res: &ScatteringResult) -> [f64; 10] {
    let sum = res.sum_rt(res.geometry.polarization());
    [
        res.r[0][0],
        res.r[0][1],
        res.r[1][0],
        res.r[1][1],
        res.t[0][0],
        res.t[0][1],
        res.t[1][0],
        res.t[1][1],
        sum,
        1.0 - sum,
    ]
}

/// One spectrum row: the nine values after `delta_p`, with flags.
fn rt_row(
    dp: f64,
    geometry: &ProbeGeometry,
    drive: &DriveField,
    config: &SystemConfig,
    mode: &Result<ModePoint>,
) -> ([f64; 10], Flags) {
    let mode = match mode {
        Ok(m) => m,
        Err(e) => {
            let mut f = Flags::from_error(e);
            if f.contains(Flags::ANOMALY_DIVERGENCE) {
                f |= Flags::ANOMALY_PROXIMITY;
            }
            return ([f64::NAN; 10], f);
        }
    };
    match scattering_with_mode(dp, geometry, drive, config, mode) {
        Ok(res) => (rt_values(&res), mode.flags()),
        Err(e) => ([f64::NAN; 10], mode.flags() | Flags::from_error(&e)),
    }
}

/// Reflectivities and transmissivities over a probe-detuning grid. The
/// directional mode is evaluated once; its failure flags every row.
pub fn rt_spectrum(
    grid: &[f64],
    geometry: &ProbeGeometry,
    drive: &DriveField,
    config: &SystemConfig,
) -> Result<SweepTable> {
    if let Some(&bad) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::OutOfRange {
            what: "delta_p",
            value: bad,
            expected: "finite grid",
        });
    }
    let mode = directional_mode(geometry, config);
    let mut t = SweepTable::new(alloc::vec![Axis::new("delta_p", grid.to_vec())], &RT_COLUMNS);
    for &dp in grid {
        let (vals, flags) = rt_row(dp, geometry, drive, config, &mode);
        let mut row = Vec::with_capacity(RT_COLUMNS.len());
        row.push(dp);
        row.extend_from_slice(&vals);
        t.push(row, flags);
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandIndex {
    Narrow,
    Broad,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandDescriptor {
    pub center: f64,
    pub peak: f64,
    pub fwhm: f64,
    pub index: BandIndex,
}

pub const DEFAULT_BAND_THRESHOLD: f64 = 0.5;

/// Indices of interior local maxima (`r[i−1] < r[i] ≥ r[i+1]`).
pub fn local_maxima(r: &[f64]) -> Vec<usize> {
    (1..r.len().saturating_sub(1))
        .filter(|&i| r[i] > r[i - 1] && r[i] >= r[i + 1])
        .collect()
}

/// Half-maximum crossing searched outward from `i`, linearly interpolated.
/// A band running off the grid is cut at the grid edge.
fn half_crossing(x: &[f64], r: &[f64], i: usize, step: isize) -> f64 {
    let half = r[i] / 2.0;
    let mut j = i;
    loop {
        let next = j as isize + step;
        if next < 0 || next as usize >= r.len() {
            return x[j];
        }
        let n = next as usize;
        if r[n] <= half {
            let t = (r[j] - half) / (r[j] - r[n]);
            return x[j] + t * (x[n] - x[j]);
        }
        j = n;
    }
}

fn fwhm(x: &[f64], r: &[f64], i: usize) -> f64 {
    half_crossing(x, r, i, 1) - half_crossing(x, r, i, -1)
}

pub fn extract_bands(dp: &[f64], r: &[f64]) -> Result<(BandDescriptor, BandDescriptor)> {
    extract_bands_with_threshold(dp, r, DEFAULT_BAND_THRESHOLD)
}

/// The two highest local maxima above `threshold`, returned as
/// `(narrow, broad)` by FWHM.
pub fn extract_bands_with_threshold(dp: &[f64], r: &[f64], threshold: f64) -> Result<(BandDescriptor, BandDescriptor)> {
    if dp.len() != r.len() {
        return Err(Error::Precondition("trace columns differ in length"));
    }
    let mut peaks: Vec<usize> = local_maxima(r).into_iter().filter(|&i| r[i] > threshold).collect();
    if peaks.len() < 2 {
        return Err(Error::NotDualBand { found: peaks.len() });
    }
    peaks.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
    let mut bands = [peaks[0], peaks[1]].map(|i| BandDescriptor {
        center: dp[i],
        peak: r[i],
        fwhm: fwhm(dp, r, i),
        index: BandIndex::Broad,
    });
    if bands[1].fwhm < bands[0].fwhm {
        bands.swap(0, 1);
    }
    bands[0].index = BandIndex::Narrow;
    Ok((bands[0], bands[1]))
}

/// Onset of the first non-specular order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffractionThreshold {
    pub d_star: f64,
    pub order: (i32, i32),
}

/// `d* = λ/(1 + sin θ)`; the new order lies along the incidence plane.
pub fn diffraction_threshold(geometry: &ProbeGeometry) -> DiffractionThreshold {
    DiffractionThreshold {
        d_star: WAVELENGTH / (1.0 + geometry.theta().sin()),
        order: match geometry.plane() {
            IncidencePlane::XZ => (1, 0),
            IncidencePlane::YZ => (0, 1),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderContribution {
    pub value: Complex64,
    /// The order sits on its Rayleigh line.
    pub anomaly: bool,
}

/// Single-order term `(i/(2d²)) f/κ` of the reciprocal `G^xx` sum for the
/// `(1,0)` order at XZ incidence. With `p_y = 0`, `f = 1 − p_x²/k′² = κ²/k′²`,
/// so the term is `iκ/(2d²k′²)` and its `0/0` limit on the Rayleigh line is 0.
pub fn order_contribution_xx(d: f64, theta: f64) -> Result<OrderContribution> {
    ProbeGeometry::new(theta, IncidencePlane::XZ, ProbePolarization::P)?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::OutOfRange {
            what: "lattice_constant",
            value: d,
            expected: "d > 0",
        });
    }
    let k = K_PROBE;
    let px = k * theta.sin() - 2.0 * core::f64::consts::PI / d;
    let diff = k * k - px * px;
    let anomaly = diff.abs() < PROXIMITY * k * k;
    let kappa = if anomaly {
        Complex64::new(0.0, 0.0)
    } else if diff > 0.0 {
        Complex64::new(diff.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-diff).sqrt())
    };
    Ok(OrderContribution {
        value: Complex64::new(0.0, 1.0) * kappa / (2.0 * d * d * k * k),
        anomaly,
    })
}

/// Parameters a spectra sweep can vary besides `Δ_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepParam {
    OmegaC,
    DeltaC,
    Theta,
    LatticeConstant,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::OmegaC => "omega_c",
            SweepParam::DeltaC => "delta_c",
            SweepParam::Theta => "theta",
            SweepParam::LatticeConstant => "d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "omega_c" | "omega-c" => Some(SweepParam::OmegaC),
            "delta_c" | "delta-c" => Some(SweepParam::DeltaC),
            "theta" => Some(SweepParam::Theta),
            "d" => Some(SweepParam::LatticeConstant),
            _ => None,
        }
    }
}

/// Fixed values for everything a sweep does not vary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub geometry: ProbeGeometry,
    pub drive: DriveField,
    pub config: SystemConfig,
}

#[derive(Clone, Copy)]
struct Cell {
    outer: [f64; 2],
    dp: f64,
    geometry: ProbeGeometry,
    drive: DriveField,
    config: SystemConfig,
}

fn apply(base: &OperatingPoint, param: SweepParam, v: f64) -> Result<OperatingPoint> {
    let mut op = *base;
    match param {
        SweepParam::OmegaC => {
            op.drive = DriveField::new(v, base.drive.delta_c)?;
        }
        SweepParam::DeltaC => {
            op.drive = DriveField::complex(base.drive.omega_c, v)?;
        }
        SweepParam::Theta => op.geometry = base.geometry.with_theta(v)?,
        SweepParam::LatticeConstant => op.config = base.config.with_lattice_constant(v)?,
    }
    Ok(op)
}

fn mode_key(g: &ProbeGeometry, c: &SystemConfig) -> (u64, u64) {
    (g.theta().to_bits(), c.lattice_constant().to_bits())
}

/// `R`/`T` over one or two parameter axes times a `Δ_p` grid, rows in
/// row-major axis order with `Δ_p` fastest. Directional modes are computed
/// once per distinct `(θ, d)`.
pub fn spectra_sweep<E: Executor>(
    axes: &[(SweepParam, Vec<f64>)],
    dp_grid: &[f64],
    base: &OperatingPoint,
    exec: &E,
) -> Result<SweepTable> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::Precondition("spectra sweeps take one or two parameter axes"));
    }
    if axes.len() == 2 && axes[0].0 == axes[1].0 {
        return Err(Error::Precondition("sweep axes must differ"));
    }
    if dp_grid.is_empty() || axes.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::Precondition("sweep axes must be nonempty"));
    }
    if let Some(&bad) = dp_grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::OutOfRange {
            what: "delta_p",
            value: bad,
            expected: "finite grid",
        });
    }
    let outer: Vec<[f64; 2]> = match axes {
        [(_, a)] => a.iter().map(|&x| [x, f64::NAN]).collect(),
        [(_, a), (_, b)] => a.iter().flat_map(|&x| b.iter().map(move |&y| [x, y])).collect(),
        _ => unreachable!(),
    };
    let mut cells = Vec::with_capacity(outer.len() * dp_grid.len());
    for o in &outer {
        let mut op = *base;
        for (i, (param, _)) in axes.iter().enumerate() {
            op = apply(&op, *param, o[i])?;
        }
        for &dp in dp_grid {
            cells.push(Cell {
                outer: *o,
                dp,
                geometry: op.geometry,
                drive: op.drive,
                config: op.config,
            });
        }
    }

    let mut keys: Vec<(ProbeGeometry, SystemConfig)> = Vec::new();
    let mut index = BTreeMap::new();
    for c in &cells {
        index.entry(mode_key(&c.geometry, &c.config)).or_insert_with(|| {
            keys.push((c.geometry, c.config));
            keys.len() - 1
        });
    }
    let modes = exec.map(&keys, |(g, c)| directional_mode(g, c));

    let rows = exec.map(&cells, |c| {
        let m = &modes[index[&mode_key(&c.geometry, &c.config)]];
        rt_row(c.dp, &c.geometry, &c.drive, &c.config, m)
    });

    let mut table_axes: Vec<Axis> = axes.iter().map(|(p, v)| Axis::new(p.name(), v.clone())).collect();
    table_axes.push(Axis::new("delta_p", dp_grid.to_vec()));
    let mut names: Vec<&str> = axes.iter().map(|(p, _)| p.name()).collect();
    names.extend_from_slice(&RT_COLUMNS);
    let mut t = SweepTable::new(table_axes, &names);
    for (c, (vals, flags)) in cells.iter().zip(rows) {
        let mut row = Vec::with_capacity(names.len());
        row.extend_from_slice(&c.outer[..axes.len()]);
        row.push(c.dp);
        row.extend_from_slice(&vals);
        t.push(row, flags);
    }
    Ok(t)
}

/// Band descriptors of each `R_μμ` trace in a sweep, one entry per outer
/// grid point. Traces that are not dual-band yield the error.
pub fn sweep_bands(
    table: &SweepTable,
    polarization: ProbePolarization,
    threshold: f64,
) -> Result<Vec<Result<(BandDescriptor, BandDescriptor)>>> {
    let col = match polarization {
        ProbePolarization::P => "R_pp",
        ProbePolarization::S => "R_ss",
    };
    let r_idx = table
        .column_index(col)
        .ok_or(Error::Precondition("table has no reflectivity column"))?;
    let dp_idx = table
        .column_index("delta_p")
        .ok_or(Error::Precondition("table has no delta_p column"))?;
    let n_dp = table
        .axes
        .last()
        .filter(|a| a.name == "delta_p")
        .map(|a| a.values.len())
        .ok_or(Error::Precondition("delta_p must be the innermost axis"))?;
    Ok(table
        .rows
        .chunks(n_dp)
        .map(|chunk| {
            let dp: Vec<f64> = chunk.iter().map(|r| r[dp_idx]).collect();
            let r: Vec<f64> = chunk.iter().map(|r| r[r_idx]).collect();
            extract_bands_with_threshold(&dp, &r, threshold)
        })
        .collect())
}

impl core::fmt::Display for BandIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            BandIndex::Narrow => "narrow",
            BandIndex::Broad => "broad",
        })
    }
}

impl core::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eit::dressed_poles;
    use crate::exec::Sequential;
    use crate::table::linspace;
    use crate::units::Dipole;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn geom(theta: f64, plane: IncidencePlane, pol: ProbePolarization) -> ProbeGeometry {
        ProbeGeometry::new(theta, plane, pol).unwrap()
    }

    fn lossless(p: Dipole) -> SystemConfig {
        SystemConfig::new(0.1, 0.0, p).unwrap()
    }

    fn norm(v: [f64; 3]) -> f64 {
        dot(v, v).sqrt()
    }

    #[test]
    fn basis_examples() {
        let c = lossless(Dipole::Z);
        let b = sp_basis(&geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P), &c);
        assert_eq!(b.s_plus, [0.0, -1.0, 0.0]);
        assert_eq!(b.p_plus[1], 0.0);
        let b = sp_basis(&geom(PI / 4.0, IncidencePlane::YZ, ProbePolarization::P), &c);
        assert_eq!(b.s_plus, [1.0, 0.0, 0.0]);
        // the closed form in k-components
        let th = 0.3;
        let g = geom(th, IncidencePlane::XZ, ProbePolarization::P);
        let b = sp_basis(&g, &c);
        let (kx, kz, k) = (g.bloch().kx, g.kz(), K_PROBE);
        let want = [kz / (k * kx) * kx, 0.0, kz / (k * kx) * (-kx * kx / kz)];
        for i in 0..3 {
            assert!((b.p_plus[i] - want[i]).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn basis_orthonormal(th in 0.0f64..0.49 * PI, yz in any::<bool>()) {
            let plane = if yz { IncidencePlane::YZ } else { IncidencePlane::XZ };
            let b = sp_basis(&geom(th, plane, ProbePolarization::P), &lossless(Dipole::X));
            for v in [b.p_plus, b.p_minus, b.s_plus, b.s_minus] {
                prop_assert!((norm(v) - 1.0).abs() < 1e-12);
            }
            prop_assert!(dot(b.p_plus, b.s_plus).abs() < 1e-12);
            prop_assert!(dot(b.p_minus, b.s_minus).abs() < 1e-12);
            prop_assert_eq!(b.s_plus[2], 0.0);
        }

        #[test]
        fn lossless_conserves_flux(
            th in 0.0f64..0.45 * PI,
            yz in any::<bool>(),
            s in any::<bool>(),
            which in 0usize..3,
            om in 0.0f64..40.0,
            dc in -15.0f64..15.0,
            dp in -60.0f64..60.0,
        ) {
            let plane = if yz { IncidencePlane::YZ } else { IncidencePlane::XZ };
            let pol = if s { ProbePolarization::S } else { ProbePolarization::P };
            let dip = [Dipole::X, Dipole::Y, Dipole::Z][which];
            let g = geom(th, plane, pol);
            let res = scattering_matrices(dp, &g, &DriveField::new(om, dc).unwrap(), &lossless(dip)).unwrap();
            prop_assert!((res.sum_rt(pol) - 1.0).abs() < 1e-10, "{}", res.sum_rt(pol));
        }

        #[test]
        fn loss_only_removes_flux(th in 0.0f64..0.45 * PI, om in 0.0f64..30.0, dp in -40.0f64..40.0) {
            let c = SystemConfig::new(0.1, 0.3, Dipole::Z).unwrap();
            let g = geom(th, IncidencePlane::XZ, ProbePolarization::P);
            let res = scattering_matrices(dp, &g, &DriveField::new(om, 0.0).unwrap(), &c).unwrap();
            prop_assert!(res.sum_rt(ProbePolarization::P) <= 1.0 + 1e-12);
        }

        #[test]
        fn mirrored_incidence_reflects_alike(th in 0.01f64..0.45 * PI, yz in any::<bool>(), which in 0usize..3, dp in -40.0f64..40.0) {
            let dip = [Dipole::X, Dipole::Y, Dipole::Z][which];
            let c = SystemConfig::new(0.1, 0.3, dip).unwrap();
            let g = geom(th, if yz { IncidencePlane::YZ } else { IncidencePlane::XZ }, ProbePolarization::P);
            let mode = directional_mode(&g, &c).unwrap();
            let a_chi = prefactor(&g, &c) * chi_reduced(dp, &EitParams::new(&DriveField::new(10.0, 0.0).unwrap(), &mode, &c)).unwrap();
            let phi = azimuth(g.plane());
            let (_, m0) = matrices(&basis_at(th, phi), c.dipole().vector(), a_chi);
            let (_, m1) = matrices(&basis_at(th, (-phi.0, -phi.1)), c.dipole().vector(), a_chi);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((m0[i][j].norm_sqr() - m1[i][j].norm_sqr()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn perfect_mirror() {
        let c = lossless(Dipole::X);
        let g = ProbeGeometry::normal(ProbePolarization::P);
        let mode = directional_mode(&g, &c).unwrap();
        let res = scattering_with_mode(mode.delta, &g, &DriveField::off(), &c, &mode).unwrap();
        // S⁺ = −1 cancels the incident wave; S⁻ carries the e_p⁻ sign
        assert!((res.s_plus[0][0] + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((res.s_minus[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((res.r[0][0] - 1.0).abs() < 1e-12);
        assert!(res.t[0][0] < 1e-12);
    }

    #[test]
    fn z_dipole_ignores_s() {
        let c = SystemConfig::reference(Dipole::Z);
        for th in [0.0, 0.3, 1.2] {
            let res = scattering_matrices(
                3.0,
                &geom(th, IncidencePlane::YZ, ProbePolarization::S),
                &DriveField::new(15.0, 0.0).unwrap(),
                &c,
            )
            .unwrap();
            assert_eq!(res.r[1][1], 0.0);
            assert_eq!(res.t[1][1], 1.0);
            assert_eq!(res.s_minus[0][1], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn x_dipole_selects_by_plane() {
        let c = SystemConfig::reference(Dipole::X);
        let d = DriveField::new(15.0, 0.0).unwrap();
        let xz = scattering_matrices(-8.0, &geom(0.5, IncidencePlane::XZ, ProbePolarization::S), &d, &c).unwrap();
        assert_eq!(xz.t[1][1], 1.0);
        assert!(xz.r[0][0] > 0.0);
        let yz = scattering_matrices(-8.0, &geom(0.5, IncidencePlane::YZ, ProbePolarization::P), &d, &c).unwrap();
        assert_eq!(yz.t[0][0], 1.0);
        assert_eq!(yz.r[0][0], 0.0);
        assert!(yz.r[1][1] > 0.0);
    }

    #[test]
    fn dark_point_transmits() {
        let c = lossless(Dipole::Z);
        for (om, dc) in [(5.0, 0.0), (15.0, -7.0), (30.0, 12.0)] {
            let res = scattering_matrices(
                -dc,
                &geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P),
                &DriveField::new(om, dc).unwrap(),
                &c,
            )
            .unwrap();
            assert!((res.t[0][0] - 1.0).abs() < 1e-12);
        }
    }

    fn reference_spectrum(om: f64, dc: f64) -> SweepTable {
        let g = geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P);
        rt_spectrum(
            &linspace(-40.0, 60.0, 1001),
            &g,
            &DriveField::new(om, dc).unwrap(),
            &SystemConfig::reference(Dipole::Z),
        )
        .unwrap()
    }

    #[test]
    fn dual_band_trace() {
        let t = reference_spectrum(15.0, 0.0);
        assert_eq!(t.columns, RT_COLUMNS);
        let r = t.column("R_pp").unwrap();
        assert_eq!(local_maxima(&r).len(), 2);
        let (narrow, broad) = extract_bands(&t.column("delta_p").unwrap(), &r).unwrap();
        assert_eq!(narrow.index, BandIndex::Narrow);
        assert!(narrow.fwhm < broad.fwhm);
        assert!(narrow.center < 0.0 && broad.center > 0.0);
        assert!(narrow.peak > 0.5 && broad.peak > 0.97);
    }

    #[test]
    fn two_level_trace_is_single_band() {
        let t = reference_spectrum(0.0, 0.0);
        let e = extract_bands(&t.column("delta_p").unwrap(), &t.column("R_pp").unwrap());
        assert_eq!(e, Err(Error::NotDualBand { found: 1 }));
    }

    #[test]
    fn fwhm_of_a_triangle() {
        let x = linspace(0.0, 10.0, 11);
        let r = [0.0, 0.0, 1.0, 0.0, 0.0, 0.2, 0.6, 0.9, 0.6, 0.2, 0.0];
        let (n, b) = extract_bands(&x, &r).unwrap();
        assert_eq!(n.center, 2.0);
        assert!((n.fwhm - 1.0).abs() < 1e-12);
        assert_eq!(b.center, 7.0);
        assert!((b.fwhm - 2.75).abs() < 1e-12);
    }

    #[test]
    fn band_centers_track_poles() {
        let c = SystemConfig::reference(Dipole::Z);
        let g = geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P);
        let mode = directional_mode(&g, &c).unwrap();
        let grid = linspace(-40.0, 60.0, 2001);
        for (om, dc) in [(8.0, -10.0), (15.0, 0.0), (25.0, 10.0)] {
            let drive = DriveField::new(om, dc).unwrap();
            let t = rt_spectrum(&grid, &g, &drive, &c).unwrap();
            let (n, b) = extract_bands(&t.column("delta_p").unwrap(), &t.column("R_pp").unwrap()).unwrap();
            let poles = dressed_poles(&EitParams::new(&drive, &mode, &c));
            let (lo, hi) = if n.center < b.center { (n, b) } else { (b, n) };
            assert!(
                (lo.center - poles.minus.re).abs() < 2.0,
                "{} vs {}",
                lo.center,
                poles.minus.re
            );
            assert!(
                (hi.center - poles.plus.re).abs() < 2.0,
                "{} vs {}",
                hi.center,
                poles.plus.re
            );
            assert!(lo.center < -dc && hi.center > -dc);
        }
    }

    #[test]
    fn thresholds() {
        let t = diffraction_threshold(&geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::P));
        assert!((t.d_star - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.order, (0, 1));
        let t = diffraction_threshold(&geom(0.0, IncidencePlane::XZ, ProbePolarization::P));
        assert_eq!(t.d_star, 1.0);
        assert_eq!(t.order, (1, 0));
        let t = diffraction_threshold(&geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P));
        assert!((t.d_star - 0.585_786_437_626_904_9).abs() < 1e-12);
    }

    #[test]
    fn xx_order_contribution() {
        let th = PI / 6.0;
        let ds = 1.0 / (1.0 + th.sin());
        let at = order_contribution_xx(ds, th).unwrap();
        assert_eq!(at.value, Complex64::new(0.0, 0.0));
        assert!(at.anomaly);
        let below = order_contribution_xx(0.9 * ds, th).unwrap();
        assert_eq!(below.value.im, 0.0);
        assert!(below.value.re < 0.0);
        let above = order_contribution_xx(1.05 * ds, th).unwrap();
        assert!(above.value.im > 0.0);
        assert!(!above.anomaly);
        // the extra decay of an x-dipole past the threshold is this term
        let c = SystemConfig::new(1.05 * ds, 0.0, Dipole::X).unwrap();
        let g = geom(th, IncidencePlane::XZ, ProbePolarization::P);
        let two = crate::green::gamma_k(&g.bloch(), &c).unwrap();
        let d = 1.05 * ds;
        let single = 3.0 * PI / (K_PROBE * d * d) * (1.0 - th.sin().powi(2)) / (K_PROBE * th.cos());
        assert!((two - single - 6.0 * PI / K_PROBE * above.value.im).abs() < 1e-9 * two);
    }

    #[test]
    fn above_threshold_leaks() {
        let c = SystemConfig::new(0.8, 0.0, Dipole::X).unwrap();
        let g = geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::S);
        let t = rt_spectrum(&linspace(-5.0, 5.0, 11), &g, &DriveField::off(), &c).unwrap();
        assert!(t.flags.iter().all(|f| f.contains(Flags::NONSPECULAR)));
        let loss = t.column("nonspecular_loss").unwrap();
        assert!(loss.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn anomaly_rows_are_flagged() {
        let c = SystemConfig::new(2.0 / 3.0, 0.0, Dipole::X).unwrap();
        let g = geom(PI / 6.0, IncidencePlane::YZ, ProbePolarization::S);
        let t = rt_spectrum(&[0.0, 1.0], &g, &DriveField::off(), &c).unwrap();
        assert!(t.flags.iter().all(|f| f.contains(Flags::ANOMALY_DIVERGENCE)));
        assert!(t.rows[0][1].is_nan());
    }

    #[test]
    fn sweep_layout_and_caching() {
        let base = OperatingPoint {
            geometry: geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P),
            drive: DriveField::new(15.0, 0.0).unwrap(),
            config: SystemConfig::reference(Dipole::Z),
        };
        let dp = linspace(-40.0, 60.0, 201);
        let axes = alloc::vec![
            (SweepParam::OmegaC, alloc::vec![5.0, 10.0]),
            (SweepParam::Theta, alloc::vec![0.5, 0.7, 0.9])
        ];
        let t = spectra_sweep(&axes, &dp, &base, &Sequential).unwrap();
        assert_eq!(t.len(), 2 * 3 * 201);
        assert_eq!(t.columns[..3], ["omega_c", "theta", "delta_p"]);
        assert_eq!(t.rows[201][..2], [5.0, 0.7]);
        assert_eq!(t.rows[3 * 201][..2], [10.0, 0.5]);
        // a cell matches the direct evaluation bit for bit
        let row = &t.rows[3 * 201 + 17];
        let g = base.geometry.with_theta(0.5).unwrap();
        let direct = scattering_matrices(row[2], &g, &DriveField::new(10.0, 0.0).unwrap(), &base.config).unwrap();
        assert_eq!(row[3], direct.r[0][0]);
        let bands = sweep_bands(&t, ProbePolarization::P, 0.2).unwrap();
        assert_eq!(bands.len(), 6);
    }

    #[test]
    fn narrow_band_widens_with_control() {
        let base = OperatingPoint {
            geometry: geom(PI / 4.0, IncidencePlane::XZ, ProbePolarization::P),
            drive: DriveField::new(15.0, 0.0).unwrap(),
            config: SystemConfig::reference(Dipole::Z),
        };
        let axes = alloc::vec![(SweepParam::OmegaC, linspace(5.0, 30.0, 6))];
        let t = spectra_sweep(&axes, &linspace(-60.0, 80.0, 2801), &base, &Sequential).unwrap();
        let w: Vec<f64> = sweep_bands(&t, ProbePolarization::P, 0.2)
            .unwrap()
            .into_iter()
            .map(|b| b.unwrap().0.fwhm)
            .collect();
        assert!(w.windows(2).all(|p| p[1] > p[0]), "{w:?}");
    }

    #[test]
    fn sweep_rejects_bad_axes() {
        let base = OperatingPoint {
            geometry: geom(0.2, IncidencePlane::XZ, ProbePolarization::P),
            drive: DriveField::off(),
            config: SystemConfig::reference(Dipole::Z),
        };
        let dp = [0.0];
        assert!(spectra_sweep(&[], &dp, &base, &Sequential).is_err());
        let th = alloc::vec![(SweepParam::Theta, alloc::vec![2.0])];
        assert!(matches!(
            spectra_sweep(&th, &dp, &base, &Sequential),
            Err(Error::OutOfRange { .. })
        ));
        let dup = alloc::vec![
            (SweepParam::Theta, alloc::vec![0.1]),
            (SweepParam::Theta, alloc::vec![0.2])
        ];
        assert!(spectra_sweep(&dup, &dp, &base, &Sequential).is_err());
    }
}
