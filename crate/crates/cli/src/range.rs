use std::fmt;
use std::str::FromStr;

use arraymirror_core::table::linspace;

/// `min:max:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("expected min:max:count, got {s:?}"));
        };
        let min: f64 = min.trim().parse().map_err(|_| format!("bad range minimum {min:?}"))?;
        let max: f64 = max.trim().parse().map_err(|_| format!("bad range maximum {max:?}"))?;
        let count: usize = count.trim().parse().map_err(|_| format!("bad range count {count:?}"))?;
        if !min.is_finite() || !max.is_finite() {
            return Err(format!("range bounds must be finite, got {s:?}"));
        }
        if count < 2 {
            return Err(format!("a range needs at least 2 points, got {count}"));
        }
        if max < min {
            return Err(format!("range maximum {max} is below minimum {min}"));
        }
        Ok(Range { min, max, count })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// A single value or a range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scan {
    Fixed(f64),
    Range(Range),
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            return s.parse().map(Scan::Range);
        }
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| format!("expected a number or min:max:count, got {s:?}"))?;
        if !v.is_finite() {
            return Err(format!("value must be finite, got {s:?}"));
        }
        Ok(Scan::Fixed(v))
    }
}

/// `name=min:max:count` for a swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub range: Range,
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("expected name=min:max:count, got {s:?}"))?;
        Ok(AxisSpec {
            name: name.trim().to_string(),
            range: range.parse()?,
        })
    }
}
