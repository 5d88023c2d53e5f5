//! Scalar observables: populations, dephasing, von Neumann entropy,
//! distillable coherence and purity.
//!
//! Entropies are in bits. Entropy-based functions accept any square state
//! (3×3 model states, or 9×9 tensor products in the additivity checks).

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{self, ComplexMat3, C64};
use crate::operators::DensityMatrix;

/// Largest tolerated `|ρ − ρ†|` entry before entropy is refused.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Eigenvalues below `-NEGATIVE_TOL` are an error; negatives above it are clamped to 0.
pub const NEGATIVE_TOL: f64 = 1e-8;
const CD_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("state is not Hermitian (defect {0:e} > 1e-8)")]
    NotHermitian(f64),
    #[error("state has eigenvalue {0:e} < -1e-8")]
    NegativeEigenvalue(f64),
}

/// Anything that can be viewed as a dense square state matrix.
pub trait StateMatrix {
    fn to_dense(&self) -> DMatrix<C64>;
}

impl StateMatrix for DMatrix<C64> {
    fn to_dense(&self) -> DMatrix<C64> {
        self.clone()
    }
}

impl StateMatrix for ComplexMat3 {
    fn to_dense(&self) -> DMatrix<C64> {
        linalg::to_dense(self)
    }
}

impl StateMatrix for DensityMatrix {
    fn to_dense(&self) -> DMatrix<C64> {
        linalg::to_dense(self.matrix())
    }
}

/// Real parts of the diagonal.
pub fn populations(rho: &DensityMatrix) -> [f64; 3] {
    let m = rho.matrix();
    [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re]
}

pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(ComplexMat3::from_diagonal(&rho.matrix().diagonal()))
}

pub fn dephase_dense(rho: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_diagonal(&rho.diagonal())
}

/// `(ρ + ρ†)/2` together with the largest entry of `|ρ − ρ†|`.
pub fn symmetrize(rho: &ComplexMat3) -> (ComplexMat3, f64) {
    (linalg::hermitian_part(rho), linalg::hermiticity_defect(rho))
}

/// Sum of `|ρ_ij|` over off-diagonal entries.
pub fn off_diagonal_mass<M: StateMatrix + ?Sized>(rho: &M) -> f64 {
    let d = rho.to_dense();
    let mut s = 0.0;
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if i != j {
                s += d[(i, j)].norm();
            }
        }
    }
    s
}

fn entropy_dense(rho: &DMatrix<C64>) -> Result<f64, MeasureError> {
    let defect = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > HERMITIAN_TOL {
        return Err(MeasureError::NotHermitian(defect));
    }
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let mut ev = linalg::hermitian_eigenvalues(&h);
    if ev[0] < -NEGATIVE_TOL {
        return Err(MeasureError::NegativeEigenvalue(ev[0]));
    }
    for l in ev.iter_mut() {
        *l = l.max(0.0);
    }
    let total: f64 = ev.iter().sum();
    Ok(ev
        .iter()
        .map(|&l| l / total)
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

/// `−Σ λ log₂ λ` over the spectrum, in bits.
pub fn von_neumann_entropy<M: StateMatrix + ?Sized>(rho: &M) -> Result<f64, MeasureError> {
    entropy_dense(&rho.to_dense())
}

/// `S(Δ[ρ]) − S(ρ)` in bits.
pub fn distillable_coherence<M: StateMatrix + ?Sized>(rho: &M) -> Result<f64, MeasureError> {
    let d = rho.to_dense();
    let s = entropy_dense(&d)?;
    let s_dephased = entropy_dense(&dephase_dense(&d))?;
    let cd = s_dephased - s;
    Ok(if (-CD_CLAMP..0.0).contains(&cd) { 0.0 } else { cd })
}

/// `Tr ρ²` (real part).
pub fn purity<M: StateMatrix + ?Sized>(rho: &M) -> f64 {
    let d = rho.to_dense();
    (&d * &d).trace().re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub c_d: f64,
    pub entropy: f64,
    pub entropy_dephased: f64,
    pub purity: f64,
    pub populations: [f64; 3],
}

pub fn coherence_report(rho: &DensityMatrix) -> Result<CoherenceReport, MeasureError> {
    let entropy = von_neumann_entropy(rho)?;
    let entropy_dephased = von_neumann_entropy(&dephase(rho))?;
    let raw = entropy_dephased - entropy;
    Ok(CoherenceReport {
        c_d: if (-CD_CLAMP..0.0).contains(&raw) { 0.0 } else { raw },
        entropy,
        entropy_dephased,
        purity: purity(rho),
        populations: populations(rho),
    })
}
