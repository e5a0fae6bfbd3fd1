//! Reduced units, validated configuration and incidence geometry.
//!
//! The reference length is the probe wavelength (`λ = 1`) and the reference
//! rate is the single-atom linewidth (`Γ_e = 1`). The probe wavenumber is
//! pinned to `k′ = 2π/λ` for every probe detuning; `Δ_p/ω_eg` is of order
//! `1e-8` for optical transitions, so its effect on `k′` is dropped.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Probe wavelength in reduced units.
pub const WAVELENGTH: f64 = 1.0;
/// Single-atom linewidth of `|e⟩` in reduced units.
pub const GAMMA_E: f64 = 1.0;
/// Probe wavenumber `k′ = 2π/λ`.
pub const K_PROBE: f64 = 2.0 * PI / WAVELENGTH;
/// Largest accepted angle of incidence. The scattering prefactor diverges
/// as `1/cos θ` at grazing incidence.
pub const MAX_THETA: f64 = 0.49 * PI;

const UNIT_TOL: f64 = 1e-9;

/// Orientation of the `e ↔ g` transition dipole, a real unit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dipole([f64; 3]);

impl Dipole {
    pub const X: Dipole = Dipole([1.0, 0.0, 0.0]);
    pub const Y: Dipole = Dipole([0.0, 1.0, 0.0]);
    pub const Z: Dipole = Dipole([0.0, 0.0, 1.0]);

    /// Normalizes `v`. Fails for zero, non-finite or otherwise unusable input.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadPolarization);
        }
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::BadPolarization);
        }
        let u = [v[0] / norm, v[1] / norm, v[2] / norm];
        let check = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        if (check - 1.0).abs() > UNIT_TOL {
            return Err(Error::BadPolarization);
        }
        Ok(Dipole(u))
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn in_plane(&self) -> [f64; 2] {
        [self.0[0], self.0[1]]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.0[0] * v[0] + self.0[1] * v[1] + self.0[2] * v[2]
    }
}

/// Physical configuration of the array in reduced units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    lattice_constant: f64,
    gamma_r: f64,
    dipole: Dipole,
}

impl SystemConfig {
    pub fn new(lattice_constant: f64, gamma_r: f64, dipole: Dipole) -> Result<Self> {
        if !lattice_constant.is_finite() || lattice_constant <= 0.0 || lattice_constant >= WAVELENGTH {
            return Err(Error::OutOfRange {
                what: "lattice_constant",
                value: lattice_constant,
                expected: "0 < d < λ",
            });
        }
        if !gamma_r.is_finite() || gamma_r < 0.0 {
            return Err(Error::OutOfRange {
                what: "gamma_r",
                value: gamma_r,
                expected: "Γ_r ≥ 0",
            });
        }
        Ok(Self {
            lattice_constant,
            gamma_r,
            dipole,
        })
    }

    /// The parameters of the reference band structure: `d = 0.1λ`,
    /// `Γ_r = 0.3Γ_e` (1.8 MHz / 6 MHz).
    pub fn reference(dipole: Dipole) -> Self {
        Self {
            lattice_constant: 0.1,
            gamma_r: 0.3,
            dipole,
        }
    }

    pub fn lattice_constant(&self) -> f64 {
        self.lattice_constant
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    pub fn dipole(&self) -> Dipole {
        self.dipole
    }

    pub fn k_probe(&self) -> f64 {
        K_PROBE
    }

    /// Edge of the first Brillouin zone, `π/d`.
    pub fn zone_edge(&self) -> f64 {
        PI / self.lattice_constant
    }

    pub fn with_lattice_constant(&self, d: f64) -> Result<Self> {
        Self::new(d, self.gamma_r, self.dipole)
    }

    pub fn with_gamma_r(&self, gamma_r: f64) -> Result<Self> {
        Self::new(self.lattice_constant, gamma_r, self.dipole)
    }

    pub fn with_dipole(&self, dipole: Dipole) -> Self {
        Self { dipole, ..*self }
    }
}

/// Builds a validated configuration from raw inputs; the orientation is
/// normalized first.
pub fn make_config(d: f64, gamma_r: f64, pol: [f64; 3]) -> Result<SystemConfig> {
    SystemConfig::new(d, gamma_r, Dipole::new(pol)?)
}

/// Laboratory values (SI) for conversion into reduced units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabParameters {
    /// Probe wavelength in metres.
    pub wavelength: f64,
    /// Lattice constant in metres.
    pub lattice_constant: f64,
    /// Angular linewidth of `|e⟩` in rad/s.
    pub gamma_e: f64,
    /// Angular linewidth of `|r⟩` in rad/s.
    pub gamma_r: f64,
}

impl LabParameters {
    /// `(d/λ, Γ_r/Γ_e)`.
    pub fn reduced(&self) -> (f64, f64) {
        (self.lattice_constant / self.wavelength, self.gamma_r / self.gamma_e)
    }

    pub fn to_config(&self, dipole: Dipole) -> Result<SystemConfig> {
        let (d, gamma_r) = self.reduced();
        SystemConfig::new(d, gamma_r, dipole)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IncidencePlane {
    XZ,
    YZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProbePolarization {
    P,
    S,
}

impl ProbePolarization {
    /// Row/column index in the 2×2 scattering matrices (`p = 0`, `s = 1`).
    pub fn index(self) -> usize {
        match self {
            ProbePolarization::P => 0,
            ProbePolarization::S => 1,
        }
    }
}

/// Direction and polarization of the incident probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeGeometry {
    theta: f64,
    plane: IncidencePlane,
    polarization: ProbePolarization,
}

impl ProbeGeometry {
    pub fn new(theta: f64, plane: IncidencePlane, polarization: ProbePolarization) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=MAX_THETA).contains(&theta) {
            return Err(Error::OutOfRange {
                what: "theta",
                value: theta,
                expected: "0 ≤ θ ≤ 0.49π",
            });
        }
        Ok(Self {
            theta,
            plane,
            polarization,
        })
    }

    pub fn normal(polarization: ProbePolarization) -> Self {
        Self {
            theta: 0.0,
            plane: IncidencePlane::XZ,
            polarization,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn plane(&self) -> IncidencePlane {
        self.plane
    }

    pub fn polarization(&self) -> ProbePolarization {
        self.polarization
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.plane, self.polarization)
    }

    /// In-plane component `k′_∥` of the incident wavevector.
    pub fn bloch(&self) -> BlochVector {
        let kt = K_PROBE * self.theta.sin();
        match self.plane {
            IncidencePlane::XZ => BlochVector::new(kt, 0.0),
            IncidencePlane::YZ => BlochVector::new(0.0, kt),
        }
    }

    /// Magnitude of the normal component, `k′ cos θ`.
    pub fn kz(&self) -> f64 {
        K_PROBE * self.theta.cos()
    }
}

/// In-plane quasi-momentum, radians per `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BlochVector {
    pub kx: f64,
    pub ky: f64,
}

impl BlochVector {
    pub const GAMMA: BlochVector = BlochVector { kx: 0.0, ky: 0.0 };

    pub const fn new(kx: f64, ky: f64) -> Self {
        Self { kx, ky }
    }

    pub fn norm(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    pub fn inside_light_cone(&self) -> bool {
        self.norm() < K_PROBE
    }

    pub fn is_finite(&self) -> bool {
        self.kx.is_finite() && self.ky.is_finite()
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.kx, self.ky]
    }
}

/// Maps an incidence geometry onto the Bloch vector it excites.
pub fn incidence_bloch(geometry: &ProbeGeometry, _config: &SystemConfig) -> BlochVector {
    geometry.bloch()
}

/// Control field on `|r⟩ ↔ |e⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveField {
    pub omega_c: Complex64,
    pub delta_c: f64,
}

impl DriveField {
    pub fn new(omega_c: f64, delta_c: f64) -> Result<Self> {
        Self::complex(Complex64::new(omega_c, 0.0), delta_c)
    }

    pub fn complex(omega_c: Complex64, delta_c: f64) -> Result<Self> {
        if !omega_c.re.is_finite() || !omega_c.im.is_finite() {
            return Err(Error::OutOfRange {
                what: "omega_c",
                value: omega_c.norm(),
                expected: "finite Rabi frequency",
            });
        }
        if !delta_c.is_finite() {
            return Err(Error::OutOfRange {
                what: "delta_c",
                value: delta_c,
                expected: "finite detuning",
            });
        }
        Ok(Self { omega_c, delta_c })
    }

    /// No control field: the two-level limit.
    pub fn off() -> Self {
        Self {
            omega_c: Complex64::new(0.0, 0.0),
            delta_c: 0.0,
        }
    }

    pub fn omega_c_sq(&self) -> f64 {
        self.omega_c.norm_sqr()
    }
}

/// High-symmetry points of the square lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryPoint {
    Gamma,
    X,
    Y,
    M,
}

impl SymmetryPoint {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'G' | 'g' | 'Γ' => Some(SymmetryPoint::Gamma),
            'X' | 'x' => Some(SymmetryPoint::X),
            'Y' | 'y' => Some(SymmetryPoint::Y),
            'M' | 'm' => Some(SymmetryPoint::M),
            _ => None,
        }
    }

    pub fn bloch(self, config: &SystemConfig) -> BlochVector {
        let e = config.zone_edge();
        match self {
            SymmetryPoint::Gamma => BlochVector::GAMMA,
            SymmetryPoint::X => BlochVector::new(e, 0.0),
            SymmetryPoint::Y => BlochVector::new(0.0, e),
            SymmetryPoint::M => BlochVector::new(e, e),
        }
    }
}

/// One sample of a Brillouin-zone path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    /// Cumulative arc length from the first waypoint, radians per `λ`.
    pub arc: f64,
    pub k: BlochVector,
}

/// Piecewise-linear path through `waypoints`, `samples_per_segment` points
/// per segment including both ends. A junction shared by two segments is
/// emitted once.
pub fn bz_path(waypoints: &[BlochVector], samples_per_segment: usize, config: &SystemConfig) -> Result<Vec<PathPoint>> {
    if waypoints.len() < 2 {
        return Err(Error::Precondition("a path needs at least two waypoints"));
    }
    if samples_per_segment < 2 {
        return Err(Error::OutOfRange {
            what: "samples_per_segment",
            value: samples_per_segment as f64,
            expected: "≥ 2",
        });
    }
    let edge = config.zone_edge() * (1.0 + 1e-12);
    for w in waypoints {
        if !w.is_finite() || w.kx.abs() > edge || w.ky.abs() > edge {
            return Err(Error::OutOfZone { kx: w.kx, ky: w.ky });
        }
    }

    let mut out = Vec::with_capacity((waypoints.len() - 1) * (samples_per_segment - 1) + 1);
    let mut arc0 = 0.0;
    for (seg, pair) in waypoints.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let len = (b.kx - a.kx).hypot(b.ky - a.ky);
        let first = if seg == 0 { 0 } else { 1 };
        for i in first..samples_per_segment {
            let t = i as f64 / (samples_per_segment - 1) as f64;
            let k = if i == samples_per_segment - 1 {
                b
            } else {
                BlochVector::new(a.kx + t * (b.kx - a.kx), a.ky + t * (b.ky - a.ky))
            };
            out.push(PathPoint { arc: arc0 + t * len, k });
        }
        arc0 += len;
    }
    Ok(out)
}
