use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// 3×3 complex tensor, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicTensor(pub [[Complex64; 3]; 3]);

impl DyadicTensor {
    pub fn zero() -> Self {
        DyadicTensor([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    /// `a·G·b` for real vectors.
    pub fn project(&self, a: [f64; 3], b: [f64; 3]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * (a[i] * b[j]);
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }
}

/// Radial coefficients `(a, b)` of `G = a·I + b·r̂r̂`.
pub(crate) fn green_coefficients(r: f64, k: f64) -> (Complex64, Complex64) {
    let kr = k * r;
    let inv = 1.0 / kr;
    let (s, c) = kr.sin_cos();
    let pre = Complex64::new(c, s) / (4.0 * PI * r);
    let a = Complex64::new(1.0 - inv * inv, inv);
    let b = Complex64::new(-1.0 + 3.0 * inv * inv, -3.0 * inv);
    (pre * a, pre * b)
}

/// Free-space dyadic Green's tensor at displacement `r`:
/// `G = e^{ikr}/(4πr) [(1 + i/kr − 1/(kr)²) I + (−1 − 3i/kr + 3/(kr)²) r̂r̂]`.
pub fn free_green(r: [f64; 3], k: f64) -> Result<DyadicTensor> {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if n == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    if !n.is_finite() {
        return Err(Error::OutOfRange {
            what: "displacement",
            value: n,
            expected: "finite",
        });
    }
    let (a, b) = green_coefficients(n, k);
    let u = [r[0] / n, r[1] / n, r[2] / n];
    let mut g = DyadicTensor::zero();
    for i in 0..3 {
        for j in 0..3 {
            g.0[i][j] = b * (u[i] * u[j]);
        }
        g.0[i][i] += a;
    }
    Ok(g)
}
