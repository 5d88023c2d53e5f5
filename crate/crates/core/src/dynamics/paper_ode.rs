//! The nine coupled Dirac-picture equations, term for term.
//!
//! These equations are not the Dirac-picture form of the lab-frame
//! Lindblad equation: the dissipative terms carry rotating phases, the
//! coherent pairings differ from `−i[H₁ᴰ, ρᴰ]`, and the last line couples
//! ρ₂₂ to ρ₂₁ where the commutator gives ρ₂₀. Trace and Hermiticity are
//! therefore not conserved once c > 0; trajectories carry diagnostics
//! rather than being repaired.

use crate::linalg::{ComplexMat3, C64, I};

/// `dρᴰ/dt` at physical time `t` (seconds).
pub fn rhs(t: f64, r: &ComplexMat3, omega0: f64, c: f64, gamma: f64) -> ComplexMat3 {
    let e1 = C64::from_polar(1.0, omega0 * t);
    let e2 = C64::from_polar(1.0, 2.0 * omega0 * t);
    let e1c = e1.conj();
    let e2c = e2.conj();
    let ic = I * c;
    let g = C64::new(gamma, 0.0);
    let p = |m: usize, n: usize| r[(m, n)];

    let mut d = ComplexMat3::zeros();
    d[(0, 0)] = -ic * (p(2, 0) - p(0, 1)) - g * 2.0 * p(0, 0);
    d[(0, 1)] = e1 * (ic * p(2, 1) + ic * p(0, 2) - g * 2.0 * p(0, 1));
    d[(0, 2)] = e2 * (-ic * p(2, 2) + ic * p(0, 0) - g * p(0, 2));
    d[(1, 0)] = e1c * (-ic * p(0, 0) + ic * p(1, 1) - g * 2.0 * p(1, 0));
    d[(1, 1)] = -ic * (p(0, 1) - p(1, 2)) + g * 2.0 * (p(0, 0) - p(1, 1));
    d[(1, 2)] = -ic * e1 * (p(0, 2) - p(1, 0)) + g * e1 * (p(0, 1) * 2.0 - p(1, 2));
    d[(2, 0)] = -ic * e2c * (p(1, 0) - p(2, 1)) - g * e2c * p(2, 0);
    d[(2, 1)] = -ic * e1c * (p(1, 1) - p(2, 2)) + g * e1c * (p(1, 0) * 2.0 - p(2, 1));
    d[(2, 2)] = -ic * (p(1, 2) - p(2, 1)) + g * 2.0 * p(1, 1);
    d
}
