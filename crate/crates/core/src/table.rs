//! Rectangular result tables shared by every sweep.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// Per-row condition bits. Rows are flagged instead of aborting a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Flags(u32);

impl Flags {
    pub const NONE: Flags = Flags(0);
    /// A diffraction order sits within `|k′² − |p|²| < 1e-9 k′²` of its threshold.
    pub const ANOMALY_PROXIMITY: Flags = Flags(1);
    /// A propagating order has `κ → 0` with a non-vanishing numerator.
    pub const ANOMALY_DIVERGENCE: Flags = Flags(1 << 1);
    pub const NO_CONVERGENCE: Flags = Flags(1 << 2);
    /// The probe sits on an undamped pole of the susceptibility.
    pub const DEGENERATE: Flags = Flags(1 << 3);
    pub const DEGENERATE_POLES: Flags = Flags(1 << 4);
    /// Non-specular diffraction orders propagate.
    pub const NONSPECULAR: Flags = Flags(1 << 5);
    /// Any other per-row failure.
    pub const ERROR: Flags = Flags(1 << 6);

    const NAMES: [(Flags, &'static str); 7] = [
        (Flags::ANOMALY_PROXIMITY, "anomaly_proximity"),
        (Flags::ANOMALY_DIVERGENCE, "anomaly_divergence"),
        (Flags::NO_CONVERGENCE, "no_convergence"),
        (Flags::DEGENERATE, "degenerate"),
        (Flags::DEGENERATE_POLES, "degenerate_poles"),
        (Flags::NONSPECULAR, "nonspecular"),
        (Flags::ERROR, "error"),
    ];

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, other: Flags) -> bool {
        self.0 & other.0 == other.0 && other.0 != 0
    }

    pub fn insert(&mut self, other: Flags) {
        self.0 |= other.0;
    }

    /// The flag that records a failed row computation.
    pub fn from_error(e: &Error) -> Flags {
        match e {
            Error::AnomalyDivergence { .. } => Flags::ANOMALY_DIVERGENCE,
            Error::NoConvergence { .. } => Flags::NO_CONVERGENCE,
            Error::Degenerate => Flags::DEGENERATE,
            Error::DegeneratePoles { .. } => Flags::DEGENERATE_POLES,
            _ => Flags::ERROR,
        }
    }
}

impl core::ops::BitOr for Flags {
    type Output = Flags;
    fn bitor(self, rhs: Flags) -> Flags {
        Flags(self.0 | rhs.0)
    }
}

impl core::ops::BitOrAssign for Flags {
    fn bitor_assign(&mut self, rhs: Flags) {
        self.0 |= rhs.0;
    }
}

/// `none`, or the set names joined by `|`.
impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let mut first = true;
        for (flag, name) in Flags::NAMES {
            if self.contains(flag) {
                if !first {
                    f.write_str("|")?;
                }
                f.write_str(name)?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A swept parameter and its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            values,
        }
    }

    /// `count` points from `min` to `max`, both included.
    pub fn linspace(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self::new(name, linspace(min, max, count))
    }
}

/// `count` evenly spaced points, endpoints exact.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![min],
        _ => {
            let step = (max - min) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { max } else { min + step * i as f64 })
                .collect()
        }
    }
}

/// Numeric columns plus one flags entry per row. Rows follow the row-major
/// order of `axes` (the last axis varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub flags: Vec<Flags>,
}

impl SweepTable {
    pub fn new(axes: Vec<Axis>, columns: &[&str]) -> Self {
        Self {
            axes,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>, flags: Flags) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.flags.push(flags);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// A copy of one column, or `None` if the name is unknown.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn any_flagged(&self) -> bool {
        self.flags.iter().any(|f| !f.is_empty())
    }
}
