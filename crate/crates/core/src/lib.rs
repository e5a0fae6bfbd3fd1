//! Cooperative optical response of an infinite square atomic array driven
//! in a three-level ladder (EIT) configuration.
//!
//! Everything here is expressed in reduced units: the probe wavelength
//! `λ = 1` and the single-atom linewidth `Γ_e = 1`. Lengths are in `λ`,
//! rates and detunings in `Γ_e`, wavenumbers in radians per `λ`.
//!
//! The crate is `no_std` (it needs `alloc` for tables and order lists).
//! File formats, the command line and thread pools live in the companion
//! `arraymirror` crate.
//!
//! Module map:
//!
//! - [`units`]: validated configuration, incidence geometry, Brillouin-zone paths
//! - [`green`]: dyadic Green's tensor, reciprocal orders, lattice sums, `η(k)`
//! - [`bands`]: band tables and directional-mode sweeps
//! - [`eit`]: susceptibility, dressed poles, steady-state oracle
//! - [`scattering`]: s/p basis, scattering matrices, reflection bands, diffraction
//! - [`table`]: the rectangular result table shared by all sweeps
//! - [`verify`]: the numbered acceptance checks with their tolerances

#![no_std]

extern crate alloc;

pub mod bands;
pub mod eit;
mod error;
pub mod exec;
pub mod green;
pub mod ode;
pub mod scattering;
pub mod special;
pub mod table;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use table::{Axis, Flags, SweepTable};
pub use units::{BlochVector, Dipole, DriveField, IncidencePlane, ProbeGeometry, ProbePolarization, SystemConfig};

pub use num_complex::Complex64;
