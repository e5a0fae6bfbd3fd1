//! Error functions of complex argument, as needed by the Ewald splitting.

use core::f64::consts::{FRAC_2_SQRT_PI, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Imaginary error function `erfi(y) = −i·erf(iy)` for real `y`.
///
/// Power series; every term is positive, so there is no cancellation.
pub fn erfi(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let y2 = y * y;
    // term_n = y^(2n+1)/n!
    let mut term = y;
    let mut sum = y;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= y2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Complementary error function of complex argument.
///
/// For `Re z > 0` this uses the Abramowitz & Stegun 7.1.29 series around
/// the real axis, whose error is relative to the `e^{−x²}` scale of the
/// correction and therefore stays small where `erfc` itself is small.
/// Negative real parts go through `erfc(−z) = 2 − erfc(z)`.
pub fn erfc(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x < 0.0 {
        return Complex64::new(2.0, 0.0) - erfc(-z);
    }
    if x == 0.0 {
        return Complex64::new(1.0, -erfi(y));
    }
    if y == 0.0 {
        return Complex64::new(libm::erfc(x), 0.0);
    }
    let ex = (-x * x).exp();
    let two_xy = 2.0 * x * y;
    let (s2, c2) = two_xy.sin_cos();
    // 1 − cos 2xy without cancellation
    let one_minus_cos = 2.0 * (x * y).sin().powi(2);
    let lead = ex / (2.0 * PI * x);
    let mut re = lead * one_minus_cos;
    let mut im = lead * s2;

    let mut sre = 0.0;
    let mut sim = 0.0;
    let n_max = (2.0 * y.abs()).ceil() as i32 + 16;
    for n in 1..=n_max {
        let nf = n as f64;
        let w = (-0.25 * nf * nf).exp() / (nf * nf + 4.0 * x * x);
        let (ch, sh) = ((nf * y).cosh(), (nf * y).sinh());
        let f = 2.0 * x - 2.0 * x * ch * c2 + nf * sh * s2;
        let g = 2.0 * x * ch * s2 + nf * sh * c2;
        sre += w * f;
        sim += w * g;
    }
    re += (2.0 / PI) * ex * sre;
    im += (2.0 / PI) * ex * sim;
    Complex64::new(libm::erfc(x) - re, -im)
}

/// Error function of complex argument, `1 − erfc(z)`.
pub fn erf(z: Complex64) -> Complex64 {
    if z.re == 0.0 {
        return Complex64::new(0.0, erfi(z.im));
    }
    if z.re.abs() < 0.5 && z.im == 0.0 {
        return Complex64::new(libm::erf(z.re), 0.0);
    }
    Complex64::new(1.0, 0.0) - erfc(z)
}
