//! Spin-1 operators, model Hamiltonians, the amplitude-damping dissipator
//! and the vectorized Liouvillian.
//!
//! Basis labels 0, 1, 2 are the `S_z` eigenstates m = +1, 0, −1, so the
//! dissipator moves population 0 → 1 → 2 and |2⟩ is dark.
//!
//! Ladder operators follow `S± = S_x ± i S_y` with no 1/√2 factor: their
//! nonzero entries are √2, `S₊S₋ = diag(2, 2, 0)`, and a pure |0⟩ state
//! decays at rate 2γ while the (0,2) coherence decays at rate γ. The nine
//! coupled Dirac-picture equations used by [`crate::dynamics::paper_ode`]
//! carry exactly these rates; the 1/√2-normalized convention would amount
//! to a uniform rescaling γ → γ/2.

use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::linalg::{
    self, commutator, hermiticity_defect, re, sandwich, stack, unstack, ComplexMat3, SuperMat, C64,
    I, ONE, ZERO,
};

/// `S_z` eigenvalue attached to each basis label.
pub const SZ_WEIGHTS: [f64; 3] = [1.0, 0.0, -1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("trace is {0}, expected 1 within 1e-12")]
    Trace(C64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix has negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("basis index {0} out of range 0..3")]
    BasisIndex(usize),
    #[error("state vector has zero norm")]
    ZeroVector,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("omega0 must be positive and finite, got {0}")]
    Omega0(f64),
    #[error("c must be non-negative and finite, got {0}")]
    HoppingRate(f64),
    #[error("gamma must be non-negative and finite, got {0}")]
    Gamma(f64),
}

/// A 3×3 density matrix.
///
/// [`DensityMatrix::new`] enforces the physical invariants (unit trace,
/// Hermitian, positive semidefinite). Trajectories of the literal
/// Dirac-picture system are not guaranteed to stay Hermitian, so their
/// samples are wrapped with [`DensityMatrix::new_unchecked`] and the
/// defects are reported as diagnostics instead.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMat3);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-12;
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const EIGEN_TOL: f64 = 1e-10;

    pub fn new(mat: ComplexMat3) -> Result<Self, StateError> {
        let rho = DensityMatrix(mat);
        rho.validate()?;
        Ok(rho)
    }

    pub fn new_unchecked(mat: ComplexMat3) -> Self {
        DensityMatrix(mat)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let tr = linalg::trace(&self.0);
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(StateError::Trace(tr));
        }
        let defect = hermiticity_defect(&self.0);
        if defect > Self::HERMITIAN_TOL {
            return Err(StateError::NotHermitian(defect));
        }
        let min = self.min_eigenvalue();
        if min < -Self::EIGEN_TOL {
            return Err(StateError::NegativeEigenvalue(min));
        }
        Ok(())
    }

    pub fn basis(index: usize) -> Result<Self, StateError> {
        if index > 2 {
            return Err(StateError::BasisIndex(index));
        }
        let mut m = ComplexMat3::zeros();
        m[(index, index)] = ONE;
        Ok(DensityMatrix(m))
    }

    /// Equal-weight superposition `(|0⟩ + |1⟩ + |2⟩)/√3`, the initial state of
    /// the figure presets.
    pub fn superposition() -> Self {
        DensityMatrix(ComplexMat3::from_element(re(1.0 / 3.0)))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMat3::identity() * re(1.0 / 3.0))
    }

    /// Projector onto a normalized copy of `psi`.
    pub fn pure(psi: &nalgebra::Vector3<C64>) -> Result<Self, StateError> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(StateError::ZeroVector);
        }
        let v = psi / re(n);
        Ok(DensityMatrix(v * v.adjoint()))
    }

    pub fn matrix(&self) -> &ComplexMat3 {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMat3 {
        self.0
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = linalg::hermitian_part(&self.0);
        linalg::hermitian_eigenvalues(&linalg::to_dense(&h))[0]
    }
}

impl AsRef<ComplexMat3> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMat3 {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinOps {
    pub sz: ComplexMat3,
    pub sx: ComplexMat3,
    pub sy: ComplexMat3,
    pub s_plus: ComplexMat3,
    pub s_minus: ComplexMat3,
    pub s_plus_s_minus: ComplexMat3,
}

pub fn build_spin1_ops() -> SpinOps {
    let r2 = re(SQRT_2);
    let mut s_minus = ComplexMat3::zeros();
    s_minus[(1, 0)] = r2;
    s_minus[(2, 1)] = r2;
    let s_plus = s_minus.adjoint();
    let sz = ComplexMat3::from_diagonal(&nalgebra::Vector3::new(ONE, ZERO, -ONE));
    let sx = (s_plus + s_minus) * re(0.5);
    let sy = (s_plus - s_minus) * (-I * 0.5);
    SpinOps {
        sz,
        sx,
        sy,
        s_plus_s_minus: s_plus * s_minus,
        s_plus,
        s_minus,
    }
}

/// Which hopping term enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H1Variant {
    /// `c(|1⟩⟨0| + |2⟩⟨1| + |0⟩⟨2|)` exactly as written; not Hermitian.
    PaperNonHermitian,
    /// The written term plus its conjugate transpose.
    #[default]
    Hermitized,
}

impl H1Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            H1Variant::PaperNonHermitian => "paper-nonhermitian",
            H1Variant::Hermitized => "hermitized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper-nonhermitian" => Some(H1Variant::PaperNonHermitian),
            "hermitized" => Some(H1Variant::Hermitized),
            _ => None,
        }
    }
}

/// Model rates in s⁻¹ (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub c: f64,
    pub gamma: f64,
    pub h1_variant: H1Variant,
}

impl ModelParams {
    pub fn new(omega0: f64, c: f64, gamma: f64, h1_variant: H1Variant) -> Result<Self, ParamError> {
        let p = ModelParams {
            omega0,
            c,
            gamma,
            h1_variant,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(ParamError::Omega0(self.omega0));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(ParamError::HoppingRate(self.c));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(ParamError::Gamma(self.gamma));
        }
        Ok(())
    }

    /// `max(ω₀, c, γ, 1)`: the rate used to make time dimensionless.
    pub fn rate_scale(&self) -> f64 {
        self.omega0.max(self.c).max(self.gamma).max(1.0)
    }
}

pub fn hopping_term(c: f64, variant: H1Variant) -> ComplexMat3 {
    let mut h1 = ComplexMat3::zeros();
    h1[(1, 0)] = re(c);
    h1[(2, 1)] = re(c);
    h1[(0, 2)] = re(c);
    match variant {
        H1Variant::PaperNonHermitian => h1,
        H1Variant::Hermitized => h1 + h1.adjoint(),
    }
}

pub fn build_hamiltonian(params: &ModelParams) -> ComplexMat3 {
    build_spin1_ops().sz * re(params.omega0) + hopping_term(params.c, params.h1_variant)
}

/// `γ(S₋ρS₊ − ½S₊S₋ρ − ½ρS₊S₋)`.
pub fn dissipator_apply(rho: &ComplexMat3, gamma: f64) -> ComplexMat3 {
    let ops = build_spin1_ops();
    let n = &ops.s_plus_s_minus;
    (ops.s_minus * rho * ops.s_plus - (n * rho + rho * n) * re(0.5)) * re(gamma)
}

/// Right-hand side of the lab-frame master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub h_total: ComplexMat3,
    pub jump_op: ComplexMat3,
    pub rate: f64,
    pub params: ModelParams,
}

impl Generator {
    pub fn new(params: ModelParams) -> Result<Self, ParamError> {
        params.validate()?;
        Ok(Generator {
            h_total: build_hamiltonian(&params),
            jump_op: build_spin1_ops().s_minus,
            rate: params.gamma,
            params,
        })
    }

    /// `−i[H, ρ] + γ D[S₋](ρ)` assembled directly from matrix products.
    pub fn rhs(&self, rho: &ComplexMat3) -> ComplexMat3 {
        let l = &self.jump_op;
        let ld = l.adjoint();
        let n = ld * l;
        commutator(&self.h_total, rho) * (-I)
            + (l * rho * ld - (n * rho + rho * n) * re(0.5)) * re(self.rate)
    }
}

/// 9×9 Liouvillian acting on column-stacked states.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub mat: SuperMat,
}

impl Superoperator {
    pub fn apply(&self, rho: &ComplexMat3) -> ComplexMat3 {
        unstack(&(self.mat * stack(rho)))
    }

    /// `⟨vec(I)| L`, which vanishes for a trace-preserving generator.
    pub fn trace_row(&self) -> nalgebra::SMatrix<C64, 1, 9> {
        stack(&ComplexMat3::identity()).transpose() * self.mat
    }
}

pub fn build_liouvillian(gen: &Generator) -> Superoperator {
    let id = ComplexMat3::identity();
    let h = &gen.h_total;
    let l = &gen.jump_op;
    let ld = l.adjoint();
    let n = ld * l;
    let coherent = (sandwich(h, &id) - sandwich(&id, h)) * (-I);
    let dissipative =
        (sandwich(l, &ld) - (sandwich(&n, &id) + sandwich(&id, &n)) * re(0.5)) * re(gen.rate);
    Superoperator {
        mat: coherent + dissipative,
    }
}

/// `e^{itH₀} ρ e^{−itH₀}` with `H₀ = ω₀S_z`: entry (m, n) picks up
/// `e^{iω₀(w_m − w_n)t}`.
pub fn dirac_transform(rho: &ComplexMat3, t: f64, omega0: f64) -> ComplexMat3 {
    ComplexMat3::from_fn(|m, n| {
        let phase = omega0 * (SZ_WEIGHTS[m] - SZ_WEIGHTS[n]) * t;
        rho[(m, n)] * C64::from_polar(1.0, phase)
    })
}
