//! Explicit Runge–Kutta steppers for `dρ/dt = f(t, ρ)` on 3×3 complex states.
//!
//! Both steppers work in dimensionless time `s = t · scale`, so step
//! control does not depend on whether rates are 1 s⁻¹ or 1e12 s⁻¹.

use crate::linalg::{re, ComplexMat3};

pub(crate) trait Rhs {
    /// Derivative with respect to physical time.
    fn eval(&self, t: f64, rho: &ComplexMat3) -> ComplexMat3;
}

impl<F: Fn(f64, &ComplexMat3) -> ComplexMat3> Rhs for F {
    fn eval(&self, t: f64, rho: &ComplexMat3) -> ComplexMat3 {
        self(t, rho)
    }
}

/// One classical RK4 step of physical length `h`.
pub(crate) fn rk4_step<R: Rhs>(f: &R, t: f64, rho: &ComplexMat3, h: f64, scale: f64) -> ComplexMat3 {
    let hs = h * scale;
    let g = |t: f64, y: &ComplexMat3| f.eval(t, y) * re(1.0 / scale);
    let k1 = g(t, rho);
    let k2 = g(t + 0.5 * h, &(rho + k1 * re(0.5 * hs)));
    let k3 = g(t + 0.5 * h, &(rho + k2 * re(0.5 * hs)));
    let k4 = g(t + h, &(rho + k3 * re(hs)));
    rho + (k1 + (k2 + k3) * re(2.0) + k4) * re(hs / 6.0)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Embedded 5(4) step; returns the 5th-order solution and the Frobenius
/// norm of the difference to the embedded 4th-order one.
fn dopri_step<R: Rhs>(f: &R, t: f64, rho: &ComplexMat3, h: f64, scale: f64) -> (ComplexMat3, f64) {
    let hs = h * scale;
    let mut k = [ComplexMat3::zeros(); 7];
    for i in 0..7 {
        let mut y = *rho;
        for (j, kj) in k.iter().enumerate().take(i) {
            if A[i][j] != 0.0 {
                y += kj * re(hs * A[i][j]);
            }
        }
        k[i] = f.eval(t + C[i] * h, &y) * re(1.0 / scale);
    }
    let mut y5 = *rho;
    let mut err = ComplexMat3::zeros();
    for i in 0..7 {
        y5 += k[i] * re(hs * B5[i]);
        err += k[i] * re(hs * (B5[i] - B4[i]));
    }
    (y5, err.norm())
}

pub(crate) struct AdaptiveControl {
    pub rel_tol: f64,
    /// Smallest physical step before giving up.
    pub min_step: f64,
}

pub(crate) struct Underflow {
    pub t: f64,
    pub step: f64,
}

/// Advance from `t` to `t_target` with error control; `h` carries the
/// step-size suggestion between calls.
pub(crate) fn dopri_advance<R: Rhs>(
    f: &R,
    t: f64,
    t_target: f64,
    rho: &ComplexMat3,
    h: &mut f64,
    scale: f64,
    ctl: &AdaptiveControl,
) -> Result<ComplexMat3, Underflow> {
    let mut t = t;
    let mut y = *rho;
    while t < t_target {
        let remaining = t_target - t;
        let last = *h >= remaining;
        let step = if last { remaining } else { *h };
        let (y_new, err) = dopri_step(f, t, &y, step, scale);
        let tol = ctl.rel_tol * y.norm().max(f64::MIN_POSITIVE);
        if err <= tol {
            t = if last { t_target } else { t + step };
            y = y_new;
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(1.0, 2.0) };
            // a truncated final step says nothing about the step the controller wants
            if !last {
                *h = step * grow;
            }
        } else {
            *h = step * 0.5;
            if *h < ctl.min_step {
                return Err(Underflow { t, step: *h });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn decay(_t: f64, y: &ComplexMat3) -> ComplexMat3 {
        -y * re(2.0)
    }

    #[test]
    fn rk4_on_exponential_decay_is_fourth_order() {
        let y0 = ComplexMat3::identity();
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = y0;
            for k in 0..n {
                y = rk4_step(&decay, k as f64 * h, &y, h, 1.0);
            }
            (y[(0, 0)].re - (-2.0f64).exp()).abs()
        };
        let ratio = run(20) / run(40);
        assert!(ratio > 15.0 && ratio < 17.0, "ratio {ratio}");
    }

    #[test]
    fn dopri_hits_target_with_tolerance() {
        let rot = |_t: f64, y: &ComplexMat3| y * C64::new(0.0, -5.0);
        let mut h = 1e-3;
        let ctl = AdaptiveControl { rel_tol: 1e-10, min_step: 1e-12 };
        let y = dopri_advance(&rot, 0.0, 3.0, &ComplexMat3::identity(), &mut h, 1.0, &ctl)
            .ok()
            .unwrap();
        let want = C64::from_polar(1.0, -15.0);
        assert!((y[(1, 1)] - want).norm() < 1e-7);
    }

    #[test]
    fn dopri_reports_underflow() {
        // stiff blow-up forces repeated halving
        let f = |_t: f64, y: &ComplexMat3| y * re(1e12);
        let mut h = 1.0;
        let ctl = AdaptiveControl { rel_tol: 1e-9, min_step: 1e-3 };
        assert!(dopri_advance(&f, 0.0, 1.0, &ComplexMat3::identity(), &mut h, 1.0, &ctl).is_err());
    }
}
