//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size real systems.

#[allow(unused_imports)]
use num_traits::Float;

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Why an integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// The observer asked to stop.
    Observer,
    /// `t_end` was reached.
    End,
    /// The step size underflowed.
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_max: f64::INFINITY,
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` towards `t_end`. After every
    /// accepted step `observe(t, y, y')` may stop the run by returning true.
    /// Returns the final time, state and the reason for stopping.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut observe: O,
    ) -> (f64, [f64; N], Stop)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
    {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        if observe(t, &y, &k1) {
            return (t, y, Stop::Observer);
        }
        let mut h = self.initial_step(&y, &k1).min(self.h_max).min(t_end - t0);
        let axpy = |y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64| {
            let mut out = *y;
            for (i, o) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for (a, k) in terms {
                    s += a * k[i];
                }
                *o += h * s;
            }
            out
        };
        while t < t_end {
            if h < 1e-14 * t.abs().max(1.0) {
                return (t, y, Stop::StepUnderflow);
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(
                t + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = f(
                t + h,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(t + h, &y_new);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if err <= 1.0 {
                t = if last { t_end } else { t + h };
                y = y_new;
                k1 = k7;
                if observe(t, &y, &k1) {
                    return (t, y, Stop::Observer);
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * if err.is_finite() { factor } else { 0.2 }).min(self.h_max);
        }
        (t, y, Stop::End)
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], dy: &[f64; N]) -> f64 {
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 = d0.max((y[i] / sc).abs());
            d1 = d1.max((dy[i] / sc).abs());
        }
        if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ode = Dopri5::new(1e-10, 1e-12);
        let (t, y, stop) = ode.integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, |_, _, _| false);
        assert_eq!(stop, Stop::End);
        assert_eq!(t, 10.0);
        assert!((y[0] - 10.0f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10.0f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn observer_stops_at_relaxation() {
        let ode = Dopri5::new(1e-10, 1e-14);
        let (t, y, stop) = ode.integrate(
            |_, y: &[f64; 1]| [2.0 - y[0]],
            0.0,
            [0.0],
            1e3,
            |_, _, dy| dy[0].abs() < 1e-9,
        );
        assert_eq!(stop, Stop::Observer);
        assert!(t < 1e3);
        assert!((y[0] - 2.0).abs() < 1e-8);
    }
}
