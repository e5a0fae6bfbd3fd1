//! TOML run configuration and its merge with command-line overrides.

use std::fs;
use std::path::Path;

use arraymirror_core::{Dipole, DriveField, IncidencePlane, ProbeGeometry, ProbePolarization, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Keys accepted in a config file. Everything is optional; missing keys
/// fall back to [`RunConfig::default`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lattice_constant: Option<f64>,
    pub gamma_r: Option<f64>,
    pub polarization: Option<String>,
    pub theta: Option<f64>,
    pub plane: Option<String>,
    pub omega_c: Option<f64>,
    pub delta_c: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// The effective operating point of a run. Echoed into JSON metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub lattice_constant: f64,
    pub gamma_r: f64,
    pub polarization: String,
    pub theta: f64,
    pub plane: String,
    pub probe: String,
    pub omega_c: f64,
    pub delta_c: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lattice_constant: 0.1,
            gamma_r: 0.3,
            polarization: "z".into(),
            theta: 0.0,
            plane: "xz".into(),
            probe: "p".into(),
            omega_c: 0.0,
            delta_c: 0.0,
        }
    }
}

/// Values given on the command line; these win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lattice_constant: Option<f64>,
    pub gamma_r: Option<f64>,
    pub polarization: Option<String>,
    pub theta: Option<f64>,
    pub plane: Option<String>,
    pub probe: Option<String>,
    pub omega_c: Option<f64>,
    pub delta_c: Option<f64>,
}

impl RunConfig {
    pub fn merge(file: &FileConfig, cli: &Overrides) -> Self {
        let d = RunConfig::default();
        RunConfig {
            lattice_constant: cli
                .lattice_constant
                .or(file.lattice_constant)
                .unwrap_or(d.lattice_constant),
            gamma_r: cli.gamma_r.or(file.gamma_r).unwrap_or(d.gamma_r),
            polarization: cli
                .polarization
                .clone()
                .or_else(|| file.polarization.clone())
                .unwrap_or(d.polarization),
            theta: cli.theta.or(file.theta).unwrap_or(d.theta),
            plane: cli.plane.clone().or_else(|| file.plane.clone()).unwrap_or(d.plane),
            probe: cli.probe.clone().unwrap_or(d.probe),
            omega_c: cli.omega_c.or(file.omega_c).unwrap_or(d.omega_c),
            delta_c: cli.delta_c.or(file.delta_c).unwrap_or(d.delta_c),
        }
    }

    pub fn dipole(&self) -> Result<Dipole, CliError> {
        parse_dipole(&self.polarization)
    }

    pub fn system(&self) -> Result<SystemConfig, CliError> {
        Ok(SystemConfig::new(self.lattice_constant, self.gamma_r, self.dipole()?)?)
    }

    pub fn plane(&self) -> Result<IncidencePlane, CliError> {
        match self.plane.to_ascii_lowercase().as_str() {
            "xz" => Ok(IncidencePlane::XZ),
            "yz" => Ok(IncidencePlane::YZ),
            other => Err(CliError::Invalid(format!(
                "plane must be \"xz\" or \"yz\", got {other:?}"
            ))),
        }
    }

    pub fn probe(&self) -> Result<ProbePolarization, CliError> {
        match self.probe.to_ascii_lowercase().as_str() {
            "p" => Ok(ProbePolarization::P),
            "s" => Ok(ProbePolarization::S),
            other => Err(CliError::Invalid(format!(
                "probe must be \"p\" or \"s\", got {other:?}"
            ))),
        }
    }

    pub fn geometry(&self) -> Result<ProbeGeometry, CliError> {
        Ok(ProbeGeometry::new(self.theta, self.plane()?, self.probe()?)?)
    }

    pub fn drive(&self) -> Result<DriveField, CliError> {
        Ok(DriveField::new(self.omega_c, self.delta_c)?)
    }
}

/// `"x"`, `"y"`, `"z"` or three comma-separated components.
pub fn parse_dipole(s: &str) -> Result<Dipole, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "x" => Ok(Dipole::X),
        "y" => Ok(Dipole::Y),
        "z" => Ok(Dipole::Z),
        other => {
            let parts: Vec<f64> = other
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Invalid(format!("unknown polarization {s:?}")))?;
            let v: [f64; 3] = parts
                .try_into()
                .map_err(|_| CliError::Invalid(format!("polarization vector needs three components, got {s:?}")))?;
            Ok(Dipole::new(v)?)
        }
    }
}
