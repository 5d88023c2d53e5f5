//! Two-time intensity correlations and the second-order coherence g²(τ).
//!
//! The emitted field is proportional to the lowering operator,
//! `E⁺ ∝ S₋`, so every field prefactor cancels between numerator and
//! denominator. With Λ_τ = exp(Lτ) the Lindblad propagator, the quantum
//! regression theorem gives
//!
//! ```text
//! G(τ)  = Tr[ S₊S₋ Λ_τ(S₋ ρ S₊) ]
//! g²(τ) = G(τ) / ( Tr[S₊S₋ ρ] · Tr[S₊S₋ Λ_τ(ρ)] )
//! ```
//!
//! where ρ is the anchor state. Regression needs a semigroup generator,
//! so only the lab-frame Lindblad mode supports it.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::decoherence::constants::HBAR;
use crate::dynamics::{propagate_expm, steady_state, DynamicsError, Evolution, Mode};
use crate::linalg::{expm_super, stack, trace, unstack, ComplexMat3, SuperMat, Vec9, C64};
use crate::operators::{build_liouvillian, build_spin1_ops, DensityMatrix, Generator, Superoperator};

/// Below this, an excitation number counts as zero.
pub const EXCITATION_FLOOR: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("no excitation to correlate at tau = {tau:e} s (n(anchor) = {anchor:e}, n(evolved) = {evolved:e})")]
    ZeroExcitation { tau: f64, anchor: f64, evolved: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Single field mode. Only documents the prefactor that cancels in g²;
/// nothing here enters the numerics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMode {
    pub omega0: f64,
    pub epsilon0: f64,
    pub volume: f64,
    pub k_dot_r: f64,
}

impl FieldMode {
    /// `i (ħω₀ / 2ε₀V)^{1/2} e^{i(k·r − ω₀t)}`, multiplying `S₋` in `E⁺`.
    pub fn prefactor(&self, t: f64) -> C64 {
        let amp = (HBAR * self.omega0 / (2.0 * self.epsilon0 * self.volume)).sqrt();
        C64::new(0.0, amp) * C64::from_polar(1.0, self.k_dot_r - self.omega0 * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Anchor {
    SteadyState,
    /// State at `t0` reached from `rho0` under the same generator.
    AtTime { t0: f64, rho0: DensityMatrix },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorKind {
    SteadyState,
    AtTime(f64),
}

impl Anchor {
    pub fn kind(&self) -> AnchorKind {
        match self {
            Anchor::SteadyState => AnchorKind::SteadyState,
            Anchor::AtTime { t0, .. } => AnchorKind::AtTime(*t0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub anchor: AnchorKind,
    pub mode: Mode,
    /// Largest |Im g²| dropped when taking real parts.
    pub max_imag: f64,
}

impl G2Curve {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

fn number(lowering: &ComplexMat3) -> ComplexMat3 {
    lowering.adjoint() * lowering
}

/// `Tr[a†a Λ_τ(a ρ a†)]` for an arbitrary lowering operator `a`.
pub fn regression_correlation(
    liouvillian: &Superoperator,
    lowering: &ComplexMat3,
    anchor: &ComplexMat3,
    tau: f64,
) -> C64 {
    let collapsed = lowering * anchor * lowering.adjoint();
    let prop = expm_super(&(liouvillian.mat * C64::new(tau, 0.0)));
    trace(&(number(lowering) * unstack(&(prop * stack(&collapsed)))))
}

/// Regression correlation with `a = S₋`. Linear in `rho_anchor`.
pub fn two_time_correlation(gen: &Generator, rho_anchor: &ComplexMat3, tau: f64) -> C64 {
    regression_correlation(&build_liouvillian(gen), &build_spin1_ops().s_minus, rho_anchor, tau)
}

pub fn resolve_anchor(gen: &Generator, anchor: &Anchor) -> Result<ComplexMat3, CorrelationError> {
    Ok(match anchor {
        Anchor::SteadyState => steady_state(gen)?.into_matrix(),
        Anchor::AtTime { t0, rho0 } => {
            rho0.validate().map_err(DynamicsError::from)?;
            propagate_expm(gen, rho0, *t0).into_matrix()
        }
    })
}

/// g² for an explicit anchor state and lowering operator.
pub fn normalized_correlation(
    liouvillian: &Superoperator,
    lowering: &ComplexMat3,
    anchor: &ComplexMat3,
    tau: f64,
) -> Result<C64, CorrelationError> {
    let prop = expm_super(&(liouvillian.mat * C64::new(tau, 0.0)));
    ratio_with(&prop, lowering, anchor, tau)
}

fn ratio_with(
    prop: &SuperMat,
    lowering: &ComplexMat3,
    anchor: &ComplexMat3,
    tau: f64,
) -> Result<C64, CorrelationError> {
    let n = number(lowering);
    let collapsed = lowering * anchor * lowering.adjoint();
    let num = trace(&(n * unstack(&(prop * stack(&collapsed)))));
    let n_anchor = trace(&(n * anchor));
    let n_evolved = trace(&(n * unstack(&(prop * stack(anchor)))));
    check_excitation(tau, n_anchor, n_evolved)?;
    Ok(num / (n_anchor * n_evolved))
}

fn check_excitation(tau: f64, anchor: C64, evolved: C64) -> Result<(), CorrelationError> {
    if anchor.re <= EXCITATION_FLOOR || evolved.re <= EXCITATION_FLOOR {
        return Err(CorrelationError::ZeroExcitation { tau, anchor: anchor.re, evolved: evolved.re });
    }
    Ok(())
}

pub fn g2(gen: &Generator, anchor: &Anchor, tau: f64) -> Result<f64, CorrelationError> {
    let rho = resolve_anchor(gen, anchor)?;
    Ok(normalized_correlation(&build_liouvillian(gen), &build_spin1_ops().s_minus, &rho, tau)?.re)
}

/// g² over a τ grid. Uniformly spaced grids reuse one step propagator;
/// irregular grids exponentiate per point.
pub fn g2_curve(gen: &Generator, anchor: &Anchor, taus: &[f64]) -> Result<G2Curve, CorrelationError> {
    let mut curve = G2Curve {
        taus: taus.to_vec(),
        values: Vec::with_capacity(taus.len()),
        anchor: anchor.kind(),
        mode: Mode::LabLindblad,
        max_imag: 0.0,
    };
    if taus.is_empty() {
        return Ok(curve);
    }
    let rho = resolve_anchor(gen, anchor)?;
    let l = build_liouvillian(gen);
    let a = build_spin1_ops().s_minus;
    let n = number(&a);
    let n_anchor = trace(&(n * rho));

    let push = |g: C64, curve: &mut G2Curve| {
        curve.max_imag = curve.max_imag.max(g.im.abs());
        curve.values.push(g.re);
    };

    match uniform_step(taus) {
        Some(h) => {
            let first = expm_super(&(l.mat * C64::new(taus[0], 0.0)));
            let step = expm_super(&(l.mat * C64::new(h, 0.0)));
            let mut collapsed: Vec9 = first * stack(&(a * rho * a.adjoint()));
            let mut evolved: Vec9 = first * stack(&rho);
            for &tau in taus {
                let num = trace(&(n * unstack(&collapsed)));
                let n_evolved = trace(&(n * unstack(&evolved)));
                check_excitation(tau, n_anchor, n_evolved)?;
                push(num / (n_anchor * n_evolved), &mut curve);
                collapsed = step * collapsed;
                evolved = step * evolved;
            }
        }
        None => {
            for &tau in taus {
                let g = normalized_correlation(&l, &a, &rho, tau)?;
                push(g, &mut curve);
            }
        }
    }
    Ok(curve)
}

fn uniform_step(taus: &[f64]) -> Option<f64> {
    if taus.len() < 2 {
        return Some(0.0);
    }
    let h = (taus[taus.len() - 1] - taus[0]) / (taus.len() - 1) as f64;
    if h <= 0.0 {
        return None;
    }
    let uniform = taus
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - (taus[0] + k as f64 * h)).abs() <= 1e-9 * h);
    uniform.then_some(h)
}

impl Evolution {
    pub fn two_time_correlation(&self, rho_anchor: &ComplexMat3, tau: f64) -> Result<C64, CorrelationError> {
        Ok(two_time_correlation(self.generator()?, rho_anchor, tau))
    }

    pub fn g2_curve(&self, anchor: &Anchor, taus: &[f64]) -> Result<G2Curve, CorrelationError> {
        g2_curve(self.generator()?, anchor, taus)
    }
}

/// `⟨a†a†aa⟩ / ⟨a†a⟩²` for any lowering operator and state.
pub fn g2_zero_delay_dense(lowering: &DMatrix<C64>, rho: &DMatrix<C64>) -> f64 {
    let ad = lowering.adjoint();
    let num = (&ad * &ad * lowering * lowering * rho).trace();
    let n = (&ad * lowering * rho).trace();
    (num / (n * n)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::operators::{H1Variant, ModelParams};
    use nalgebra::DVector;

    fn gen(c: f64) -> Generator {
        Generator::new(ModelParams::new(1e8, c, 5e6, H1Variant::Hermitized).unwrap()).unwrap()
    }

    fn superposition() -> Anchor {
        Anchor::AtTime { t0: 0.0, rho0: DensityMatrix::superposition() }
    }

    #[test]
    fn dark_anchor_has_no_correlation() {
        let ground = DensityMatrix::basis(2).unwrap();
        for tau in [0.0, 1e-7, 1e-6] {
            assert!(two_time_correlation(&gen(1e7), ground.matrix(), tau).norm() < 1e-12);
        }
    }

    #[test]
    fn top_state_correlation_at_zero_delay() {
        // S₋|0⟩⟨0|S₊ = 2|1⟩⟨1| and S₊S₋ = diag(2,2,0)
        let g = two_time_correlation(&gen(0.0), DensityMatrix::basis(0).unwrap().matrix(), 0.0);
        assert!((g - re(4.0)).norm() < 1e-12);
    }

    #[test]
    fn correlation_is_linear_in_anchor() {
        let rho = DensityMatrix::superposition();
        let base = two_time_correlation(&gen(2e7), rho.matrix(), 3e-7);
        let scaled = two_time_correlation(&gen(2e7), &(rho.matrix() * re(2.5)), 3e-7);
        assert!((scaled - base * 2.5).norm() < 1e-12 * base.norm().max(1.0));
    }

    #[test]
    fn superposition_zero_delay_is_three_quarters() {
        // ⟨S₊S₊S₋S₋⟩ = 4/3, ⟨S₊S₋⟩ = 4/3
        for c in [0.0, 1e7, 4e7] {
            assert!((g2(&gen(c), &superposition(), 0.0).unwrap() - 0.75).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_starts_at_three_quarters_and_is_real() {
        let taus: Vec<f64> = (0..200).map(|k| k as f64 * 1e-8).collect();
        let curve = g2_curve(&gen(2e7), &superposition(), &taus).unwrap();
        assert_eq!(curve.len(), 200);
        assert!((curve.values[0] - 0.75).abs() < 1e-9);
        assert!(curve.max_imag < 1e-9);
        assert!(curve.values.iter().all(|v| v.is_finite()));
        // uniform fast path agrees with pointwise exponentials
        for k in [1, 57, 199] {
            let direct = g2(&gen(2e7), &superposition(), taus[k]).unwrap();
            assert!((curve.values[k] - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn irregular_grid_matches_pointwise() {
        let taus = [0.0, 3e-8, 1e-7, 4.5e-7];
        let curve = g2_curve(&gen(1e7), &superposition(), &taus).unwrap();
        for (t, v) in taus.iter().zip(&curve.values) {
            assert!((g2(&gen(1e7), &superposition(), *t).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_grid_gives_empty_curve() {
        let curve = g2_curve(&gen(1e7), &Anchor::SteadyState, &[]).unwrap();
        assert!(curve.is_empty());
    }

    #[test]
    fn dark_steady_state_has_zero_excitation() {
        let err = g2_curve(&gen(0.0), &Anchor::SteadyState, &[0.0, 1e-7]).unwrap_err();
        assert!(matches!(err, CorrelationError::ZeroExcitation { .. }));
    }

    #[test]
    fn paper_mode_cannot_regress() {
        let evo = Evolution::new(gen(1e7).params, Mode::PaperDiracOde).unwrap();
        assert!(matches!(
            evo.g2_curve(&superposition(), &[0.0]),
            Err(CorrelationError::Dynamics(DynamicsError::NotApplicable(_)))
        ));
    }

    #[test]
    fn field_prefactor_cancels() {
        let g = gen(2e7);
        let l = build_liouvillian(&g);
        let a = build_spin1_ops().s_minus;
        let rho = DensityMatrix::superposition();
        let mode = FieldMode { omega0: 1e8, epsilon0: 8.8541878128e-12, volume: 1e-27, k_dot_r: 0.4 };
        let z = mode.prefactor(2e-8);
        for tau in [0.0, 2e-7, 9e-7] {
            let plain = normalized_correlation(&l, &a, rho.matrix(), tau).unwrap();
            let scaled = normalized_correlation(&l, &(a * z), rho.matrix(), tau).unwrap();
            assert!((plain - scaled).norm() < 1e-9 * plain.norm());
        }
    }

    fn oscillator(n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |i, j| if j == i + 1 { re((j as f64).sqrt()) } else { re(0.0) })
    }

    #[test]
    fn coherent_state_gives_one() {
        let n = 60;
        let alpha: f64 = 1.5;
        let mut amp = DVector::from_element(n, re(0.0));
        let mut term = (-alpha * alpha / 2.0).exp();
        for k in 0..n {
            if k > 0 {
                term *= alpha / (k as f64).sqrt();
            }
            amp[k] = re(term);
        }
        let rho = &amp * amp.adjoint();
        assert!((g2_zero_delay_dense(&oscillator(n), &rho) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_state_gives_two() {
        let n = 200;
        let nbar: f64 = 0.8;
        let q = nbar / (1.0 + nbar);
        let rho = DMatrix::from_fn(n, n, |i, j| if i == j { re((1.0 - q) * q.powi(i as i32)) } else { re(0.0) });
        assert!((g2_zero_delay_dense(&oscillator(n), &rho) - 2.0).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use crate::random::{ginibre_state, seeded_rng};
        use proptest::prelude::*;

        fn random_state(seed: u64) -> ComplexMat3 {
            ginibre_state(&mut seeded_rng(seed), 3).fixed_view::<3, 3>(0, 0).into()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn g2_is_real(c in 0.0f64..4e7, tau in 0.0f64..2e-6, seed in any::<u64>()) {
                let l = build_liouvillian(&gen(c));
                let g = normalized_correlation(&l, &build_spin1_ops().s_minus, &random_state(seed), tau).unwrap();
                prop_assert!(g.im.abs() <= 1e-9 * g.re.abs().max(1.0));
            }

            #[test]
            fn g2_ignores_lowering_scale(
                c in 0.0f64..4e7,
                tau in 0.0f64..2e-6,
                re_z in -3.0f64..3.0,
                im_z in -3.0f64..3.0,
                seed in any::<u64>(),
            ) {
                let z = C64::new(re_z, im_z);
                prop_assume!(z.norm() > 0.1);
                let l = build_liouvillian(&gen(c));
                let a = build_spin1_ops().s_minus;
                let rho = random_state(seed);
                let g = normalized_correlation(&l, &a, &rho, tau).unwrap();
                let gz = normalized_correlation(&l, &(a * z), &rho, tau).unwrap();
                prop_assert!((g - gz).norm() <= 1e-9 * g.norm().max(1.0));
            }

            #[test]
            fn correlation_is_linear(
                tau in 0.0f64..1e-6,
                alpha in -2.0f64..2.0,
                s1 in any::<u64>(),
                s2 in any::<u64>(),
            ) {
                let g = gen(2e7);
                let (r1, r2) = (random_state(s1), random_state(s2));
                let mixed = two_time_correlation(&g, &(r1 * re(alpha) + r2), tau);
                let split = two_time_correlation(&g, &r1, tau) * alpha + two_time_correlation(&g, &r2, tau);
                prop_assert!((mixed - split).norm() <= 1e-9 * split.norm().max(1.0));
            }
        }
    }
}
