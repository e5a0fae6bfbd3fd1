use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is out of range (expected {expected})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dipole orientation cannot be normalized to a real unit vector")]
    BadPolarization,

    #[error("Bloch vector ({kx}, {ky}) lies outside the first Brillouin zone")]
    OutOfZone { kx: f64, ky: f64 },

    #[error("Green's tensor evaluated at zero displacement")]
    ZeroDisplacement,

    #[error("lattice sum did not converge: residual {residual:e} > tolerance {tolerance:e}")]
    NoConvergence { residual: f64, tolerance: f64 },

    #[error("diffraction order ({mx}, {my}) sits on a Rayleigh anomaly (κ → 0)")]
    AnomalyDivergence { mx: i32, my: i32 },

    #[error("probe detuning hits an undamped pole of the susceptibility")]
    Degenerate,

    #[error("dressed poles are degenerate (|Δ₊ − Δ₋| = {separation:e})")]
    DegeneratePoles { separation: f64 },

    #[error("density matrix did not reach steady state within t = {time}")]
    NoSteadyState { time: f64 },

    #[error("reflection trace has {found} qualifying maxima, need 2")]
    NotDualBand { found: usize },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

impl Error {
    /// Short machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OutOfRange { .. } => "OUT_OF_RANGE",
            Error::BadPolarization => "BAD_POLARIZATION",
            Error::OutOfZone { .. } => "OUT_OF_ZONE",
            Error::ZeroDisplacement => "ZERO_DISPLACEMENT",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::AnomalyDivergence { .. } => "ANOMALY_DIVERGENCE",
            Error::Degenerate => "DEGENERATE",
            Error::DegeneratePoles { .. } => "DEGENERATE_POLES",
            Error::NoSteadyState { .. } => "NO_STEADY_STATE",
            Error::NotDualBand { .. } => "NOT_DUAL_BAND",
            Error::Precondition(_) => "PRECONDITION",
        }
    }

    /// True for failures of a numerical procedure on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoSteadyState { .. }
                | Error::AnomalyDivergence { .. }
                | Error::Degenerate
                | Error::DegeneratePoles { .. }
                | Error::NotDualBand { .. }
        )
    }
}
