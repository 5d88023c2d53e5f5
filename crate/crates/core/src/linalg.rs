//! Small dense complex linear algebra used across the crate.
//!
//! States live in 3×3 matrices; superoperators act on column-stacked
//! states as 9×9 matrices. Column stacking matches nalgebra's column-major
//! storage, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, Matrix3, SMatrix, SVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type ComplexMat3 = Matrix3<C64>;
pub type SuperMat = SMatrix<C64, 9, 9>;
pub type Vec9 = SVector<C64, 9>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn dagger(m: &ComplexMat3) -> ComplexMat3 {
    m.adjoint()
}

pub fn commutator(a: &ComplexMat3, b: &ComplexMat3) -> ComplexMat3 {
    a * b - b * a
}

pub fn trace(m: &ComplexMat3) -> C64 {
    m[(0, 0)] + m[(1, 1)] + m[(2, 2)]
}

/// Frobenius norm of a difference, `‖a − b‖_F`.
pub fn frobenius_distance(a: &ComplexMat3, b: &ComplexMat3) -> f64 {
    (a - b).norm()
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &ComplexMat3) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &ComplexMat3) -> ComplexMat3 {
    (m + m.adjoint()) * re(0.5)
}

/// Column-stack a 3×3 matrix.
pub fn stack(m: &ComplexMat3) -> Vec9 {
    Vec9::from_column_slice(m.as_slice())
}

pub fn unstack(v: &Vec9) -> ComplexMat3 {
    ComplexMat3::from_column_slice(v.as_slice())
}

/// Superoperator of `X ↦ A X B` under column stacking.
pub fn sandwich(a: &ComplexMat3, b: &ComplexMat3) -> SuperMat {
    b.transpose().kronecker(a)
}

/// Eigenvalues of a Hermitian matrix (only the lower triangle is read), ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn to_dense(m: &ComplexMat3) -> DMatrix<C64> {
    DMatrix::from_column_slice(3, 3, m.as_slice())
}

pub fn kron_dense(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé kernel.
///
/// The 1-norm is scaled below θ₁₃ = 5.37 so the Padé remainder stays at
/// unit roundoff; `exp(0)` returns the identity exactly.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let id = DMatrix::<C64>::identity(n, n);
    let norm = one_norm(a);
    if norm == 0.0 {
        return id;
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * re(0.5f64.powi(squarings));
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]))
        + &a6 * re(b[7])
        + &a4 * re(b[5])
        + &a2 * re(b[3])
        + &id * re(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]))
        + &a6 * re(b[6])
        + &a4 * re(b[4])
        + &a2 * re(b[2])
        + &id * re(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

pub fn expm_super(a: &SuperMat) -> SuperMat {
    let d = DMatrix::from_column_slice(9, 9, a.as_slice());
    SuperMat::from_column_slice(expm(&d).as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_expm(a: &DMatrix<C64>) -> DMatrix<C64> {
        // brute-force oracle: plain Taylor series on a small-norm argument
        let n = a.nrows();
        let mut term = DMatrix::<C64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * a * re(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = DMatrix::<C64>::zeros(9, 9);
        assert_eq!(expm(&z), DMatrix::identity(9, 9));
    }

    #[test]
    fn expm_matches_taylor_on_small_matrix() {
        let a = DMatrix::from_fn(4, 4, |i, j| {
            C64::new(0.3 * (i as f64 - j as f64), 0.1 * (i * j) as f64)
        });
        let diff = (expm(&a) - taylor_expm(&a)).norm();
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn expm_of_diagonal_uses_scaling() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(-30.0, 0.0),
            C64::new(0.0, 40.0),
            C64::new(2.0, -7.0),
        ]));
        let e = expm(&a);
        for i in 0..3 {
            let want = a[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() <= 1e-12 * want.norm().max(1e-300));
        }
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let a = ComplexMat3::from_fn(|i, j| C64::new(i as f64 + 1.0, j as f64));
        let b = ComplexMat3::from_fn(|i, j| C64::new(j as f64 - i as f64, 0.5));
        let x = ComplexMat3::from_fn(|i, j| C64::new((i * 3 + j) as f64, 1.0));
        let lhs = unstack(&(sandwich(&a, &b) * stack(&x)));
        assert!((lhs - a * x * b).norm() < 1e-12);
    }
}
