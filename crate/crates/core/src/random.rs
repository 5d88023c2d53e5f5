//! Seeded random states for property suites.
//!
//! Mixed states are Ginibre-distributed: `G G† / Tr(G G†)` with `G` a
//! square matrix of independent standard complex Gaussians. Pure states
//! normalize a complex Gaussian vector. The generator is ChaCha8, so a seed
//! reproduces the same states on every platform.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::C64;

pub const DEFAULT_SEED: u64 = 0x1_0F1A_2024;

pub type StateRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut StateRng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn ginibre_state(rng: &mut StateRng, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let w = &g * g.adjoint();
    let tr = w.trace();
    let mut rho = w / tr;
    // exact Hermitian symmetry; the product is Hermitian only up to roundoff
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    rho
}

pub fn pure_state_vector(rng: &mut StateRng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn pure_state(rng: &mut StateRng, dim: usize) -> DMatrix<C64> {
    let v = pure_state_vector(rng, dim);
    &v * v.adjoint()
}
