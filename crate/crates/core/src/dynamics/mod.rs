//! Time evolution of the three-level model.
//!
//! Two right-hand sides are available: the lab-frame Lindblad generator
//! ([`integrate`], [`Mode::LabLindblad`]) and the literal Dirac-picture
//! system ([`integrate_paper_ode`], [`Mode::PaperDiracOde`]). For
//! time-independent generators [`propagate_expm`] gives an exponential
//! oracle and [`steady_state`] the fixed point.

mod integrator;
pub mod paper_ode;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{self, expm_super, hermiticity_defect, stack, unstack, ComplexMat3, C64};
use crate::operators::{
    build_liouvillian, dirac_transform, DensityMatrix, Generator, ModelParams, ParamError,
    StateError,
};
use integrator::{dopri_advance, rk4_step, AdaptiveControl, Rhs};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("dt = {dt:e} s exceeds the stability limit {max:e} s")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("invalid initial state: {0}")]
    InvalidState(#[from] StateError),
    #[error(transparent)]
    InvalidParams(#[from] ParamError),
    #[error("adaptive step fell to {step:e} s at t = {t:e} s (limit {min:e} s)")]
    StepSizeUnderflow { t: f64, step: f64, min: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("null space is degenerate: two smallest scaled singular values {smallest:e} and {second:e}")]
    DegenerateNullSpace { smallest: f64, second: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    LabLindblad,
    PaperDiracOde,
}

impl Mode {
    pub fn tag(self) -> &'static str {
        match self {
            Mode::LabLindblad => "lab-lindblad",
            Mode::PaperDiracOde => "paper-dirac-ode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
    /// Dormand–Prince 5(4) with relative tolerance 1e-9.
    Adaptive,
}

/// Uniform stepping grid. Samples are taken every `sample_stride` steps,
/// and the final time is always sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_stride: usize,
}

impl TimeGrid {
    pub const DEFAULT_SAMPLES: usize = 2000;
    /// `dt · max(ω₀, c, γ, 1)` may not exceed this.
    pub const STABILITY_LIMIT: f64 = 0.01;

    pub fn new(t0: f64, t_end: f64, dt: f64, sample_stride: usize) -> Result<Self, DynamicsError> {
        if !(t0.is_finite() && t_end.is_finite() && t_end > t0) {
            return Err(DynamicsError::InvalidGrid(format!("need t_end > t0, got [{t0}, {t_end}]")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(DynamicsError::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if sample_stride == 0 {
            return Err(DynamicsError::InvalidGrid("sample_stride must be at least 1".into()));
        }
        Ok(TimeGrid { t0, t_end, dt, sample_stride })
    }

    /// Grid whose stride decimates to roughly `samples` samples.
    pub fn with_samples(t0: f64, t_end: f64, dt: f64, samples: usize) -> Result<Self, DynamicsError> {
        let probe = TimeGrid::new(t0, t_end, dt, 1)?;
        let stride = (probe.n_steps() / samples.max(1)).max(1);
        TimeGrid::new(t0, t_end, dt, stride)
    }

    /// Largest stable `dt` for the given rates.
    pub fn max_dt(params: &ModelParams) -> f64 {
        Self::STABILITY_LIMIT / params.rate_scale()
    }

    pub fn n_steps(&self) -> usize {
        (((self.t_end - self.t0) / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Actual step: `dt` shrunk so the steps tile `[t0, t_end]` exactly.
    pub fn step(&self) -> f64 {
        (self.t_end - self.t0) / self.n_steps() as f64
    }

    pub fn sample_indices(&self) -> Vec<usize> {
        let n = self.n_steps();
        let mut idx: Vec<usize> = (0..=n).step_by(self.sample_stride).collect();
        if *idx.last().unwrap() != n {
            idx.push(n);
        }
        idx
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let h = self.step();
        self.sample_indices()
            .into_iter()
            .map(|k| if k == self.n_steps() { self.t_end } else { self.t0 + k as f64 * h })
            .collect()
    }

    pub fn check_stability(&self, params: &ModelParams) -> Result<(), DynamicsError> {
        let max = Self::max_dt(params);
        if self.dt > max * (1.0 + 1e-12) {
            return Err(DynamicsError::StepTooLarge { dt: self.dt, max });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub trace_error: f64,
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn of(rho: &ComplexMat3) -> Self {
        let h = linalg::hermitian_part(rho);
        Diagnostics {
            trace_error: (linalg::trace(rho) - C64::new(1.0, 0.0)).norm(),
            hermiticity_defect: hermiticity_defect(rho),
            min_eigenvalue: linalg::hermitian_eigenvalues(&linalg::to_dense(&h))[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub mode: Mode,
    pub diagnostics: Vec<Diagnostics>,
    /// Largest |Im ρ_ii| seen; populations are reported as real parts.
    pub max_imag_population: f64,
}

impl TimeSeries {
    fn from_samples(times: Vec<f64>, mats: Vec<ComplexMat3>, mode: Mode) -> Self {
        let diagnostics = mats.iter().map(Diagnostics::of).collect();
        let max_imag_population = mats
            .iter()
            .flat_map(|m| (0..3).map(move |i| m[(i, i)].im.abs()))
            .fold(0.0, f64::max);
        TimeSeries {
            times,
            states: mats.into_iter().map(DensityMatrix::new_unchecked).collect(),
            mode,
            diagnostics,
            max_imag_population,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn populations(&self) -> Vec<[f64; 3]> {
        self.states
            .iter()
            .map(|s| {
                let m = s.matrix();
                [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re]
            })
            .collect()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_error).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.hermiticity_defect).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

const ADAPTIVE_REL_TOL: f64 = 1e-9;
const UNDERFLOW_FRACTION: f64 = 1e-6;

fn run<R: Rhs>(
    f: &R,
    rho0: &ComplexMat3,
    grid: &TimeGrid,
    method: Method,
    scale: f64,
    mode: Mode,
) -> Result<TimeSeries, DynamicsError> {
    let times = grid.sample_times();
    let indices = grid.sample_indices();
    let mut states = Vec::with_capacity(times.len());
    states.push(*rho0);
    let mut rho = *rho0;
    match method {
        Method::Rk4 => {
            let h = grid.step();
            let mut k = 0usize;
            for &target in &indices[1..] {
                while k < target {
                    rho = rk4_step(f, grid.t0 + k as f64 * h, &rho, h, scale);
                    k += 1;
                }
                states.push(rho);
            }
        }
        Method::Adaptive => {
            let ctl = AdaptiveControl {
                rel_tol: ADAPTIVE_REL_TOL,
                min_step: UNDERFLOW_FRACTION * (grid.t_end - grid.t0),
            };
            let mut h = grid.dt;
            for w in times.windows(2) {
                rho = dopri_advance(f, w[0], w[1], &rho, &mut h, scale, &ctl).map_err(|u| {
                    DynamicsError::StepSizeUnderflow { t: u.t, step: u.step, min: ctl.min_step }
                })?;
                states.push(rho);
            }
        }
    }
    Ok(TimeSeries::from_samples(times, states, mode))
}

/// Integrate the lab-frame master equation `dρ/dt = −i[H, ρ] + L[ρ]`.
pub fn integrate(
    gen: &Generator,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    method: Method,
) -> Result<TimeSeries, DynamicsError> {
    rho0.validate()?;
    grid.check_stability(&gen.params)?;
    let f = |_t: f64, rho: &ComplexMat3| gen.rhs(rho);
    run(&f, rho0.matrix(), grid, method, gen.params.rate_scale(), Mode::LabLindblad)
}

/// Integrate the literal Dirac-picture equations with RK4.
pub fn integrate_paper_ode(
    params: &ModelParams,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<TimeSeries, DynamicsError> {
    integrate_paper_ode_with(params, rho0, grid, Method::Rk4)
}

pub fn integrate_paper_ode_with(
    params: &ModelParams,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    method: Method,
) -> Result<TimeSeries, DynamicsError> {
    params.validate()?;
    rho0.validate()?;
    grid.check_stability(params)?;
    let (w, c, g) = (params.omega0, params.c, params.gamma);
    let f = move |t: f64, rho: &ComplexMat3| paper_ode::rhs(t, rho, w, c, g);
    run(&f, rho0.matrix(), grid, method, params.rate_scale(), Mode::PaperDiracOde)
}

/// `unstack(exp(L t) · stack(ρ₀))`.
pub fn propagate_expm(gen: &Generator, rho0: &DensityMatrix, t: f64) -> DensityMatrix {
    let l = build_liouvillian(gen);
    let u = expm_super(&(l.mat * C64::new(t, 0.0)));
    DensityMatrix::new_unchecked(unstack(&(u * stack(rho0.matrix()))))
}

/// Fixed point of the Liouvillian, from the right singular vector with the
/// smallest singular value of `L / max(ω₀, c, γ, 1)`.
pub fn steady_state(gen: &Generator) -> Result<DensityMatrix, DynamicsError> {
    const GAP: f64 = 1e-12;
    let scaled = build_liouvillian(gen).mat / C64::new(gen.params.rate_scale(), 0.0);
    let dense = DMatrix::from_column_slice(9, 9, scaled.as_slice());
    let svd = dense.svd(false, true);
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let (smallest, second) = (svd.singular_values[order[0]], svd.singular_values[order[1]]);
    if second - smallest <= GAP {
        return Err(DynamicsError::DegenerateNullSpace { smallest, second });
    }
    let v_t = svd.v_t.expect("requested V");
    let v = linalg::Vec9::from_fn(|i, _| v_t[(order[0], i)].conj());
    let rho = unstack(&v);
    let tr = linalg::trace(&rho);
    Ok(DensityMatrix::new_unchecked(linalg::hermitian_part(&(rho / tr))))
}

/// Per-sample Frobenius distance between the Dirac-transformed lab-frame
/// trajectory and the literal Dirac-picture trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDivergence {
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
}

impl ModeDivergence {
    pub fn max(&self) -> f64 {
        self.distance.iter().copied().fold(0.0, f64::max)
    }
}

pub fn compare_modes(
    params: &ModelParams,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<ModeDivergence, DynamicsError> {
    let gen = Generator::new(*params)?;
    let lab = integrate(&gen, rho0, grid, Method::Rk4)?;
    let paper = integrate_paper_ode(params, rho0, grid)?;
    let distance = lab
        .times
        .iter()
        .zip(lab.states.iter().zip(&paper.states))
        .map(|(&t, (a, b))| {
            linalg::frobenius_distance(&dirac_transform(a.matrix(), t, params.omega0), b.matrix())
        })
        .collect();
    Ok(ModeDivergence { times: lab.times, distance })
}

/// A model paired with the equations used to evolve it.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Evolution {
    Lindblad(Generator),
    PaperOde(ModelParams),
}

impl Evolution {
    pub fn new(params: ModelParams, mode: Mode) -> Result<Self, DynamicsError> {
        Ok(match mode {
            Mode::LabLindblad => Evolution::Lindblad(Generator::new(params)?),
            Mode::PaperDiracOde => {
                params.validate()?;
                Evolution::PaperOde(params)
            }
        })
    }

    pub fn mode(&self) -> Mode {
        match self {
            Evolution::Lindblad(_) => Mode::LabLindblad,
            Evolution::PaperOde(_) => Mode::PaperDiracOde,
        }
    }

    pub fn params(&self) -> &ModelParams {
        match self {
            Evolution::Lindblad(g) => &g.params,
            Evolution::PaperOde(p) => p,
        }
    }

    pub fn generator(&self) -> Result<&Generator, DynamicsError> {
        match self {
            Evolution::Lindblad(g) => Ok(g),
            Evolution::PaperOde(_) => Err(DynamicsError::NotApplicable(
                "the literal Dirac-picture system is explicitly time dependent and has no semigroup generator",
            )),
        }
    }

    pub fn integrate(
        &self,
        rho0: &DensityMatrix,
        grid: &TimeGrid,
        method: Method,
    ) -> Result<TimeSeries, DynamicsError> {
        match self {
            Evolution::Lindblad(g) => integrate(g, rho0, grid, method),
            Evolution::PaperOde(p) => integrate_paper_ode_with(p, rho0, grid, method),
        }
    }

    pub fn propagate_expm(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix, DynamicsError> {
        Ok(propagate_expm(self.generator()?, rho0, t))
    }

    pub fn steady_state(&self) -> Result<DensityMatrix, DynamicsError> {
        steady_state(self.generator()?)
    }
}
