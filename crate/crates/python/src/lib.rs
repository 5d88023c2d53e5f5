//! Python bindings for `ionflux-core`.
//!
//! Density matrices cross the boundary as 3×3 nested lists of complex
//! numbers. Rates are in s⁻¹, times in seconds.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ionflux_core::decoherence;
use ionflux_core::io::config::DEFAULT_STEP;
use ionflux_core::io::{presets, run};
use ionflux_core::linalg::ComplexMat3;
use ionflux_core::{
    correlations, measures, Anchor, DensityMatrix, Error, Evolution, H1Variant, Method, Mode, ModelParams,
    TimeGrid,
};

type Matrix = Vec<Vec<Complex64>>;

fn to_py_err(e: impl Into<Error>) -> PyErr {
    let e: Error = e.into();
    let msg = e.to_string();
    match e.exit_code() {
        ionflux_core::EXIT_CONFIG => PyValueError::new_err(msg),
        ionflux_core::EXIT_IO => PyOSError::new_err(msg),
        _ => PyRuntimeError::new_err(msg),
    }
}

fn to_mat(rows: &Matrix) -> PyResult<ComplexMat3> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("density matrix must be 3x3"));
    }
    Ok(ComplexMat3::from_fn(|i, j| rows[i][j]))
}

fn from_mat(m: &ComplexMat3) -> Matrix {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

fn state(rows: Option<&Matrix>) -> PyResult<DensityMatrix> {
    match rows {
        None => Ok(DensityMatrix::superposition()),
        Some(r) => DensityMatrix::new(to_mat(r)?).map_err(|e| PyValueError::new_err(e.to_string())),
    }
}

fn parse_variant(s: &str) -> PyResult<H1Variant> {
    match s {
        "hermitized" => Ok(H1Variant::Hermitized),
        "paper-nonhermitian" => Ok(H1Variant::PaperNonHermitian),
        _ => Err(PyValueError::new_err(format!("h1_variant must be hermitized or paper-nonhermitian, got {s:?}"))),
    }
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    match s {
        "lab" | "lab-lindblad" => Ok(Mode::LabLindblad),
        "paper" | "paper-dirac-ode" => Ok(Mode::PaperDiracOde),
        _ => Err(PyValueError::new_err(format!("mode must be lab or paper, got {s:?}"))),
    }
}

fn variant_name(v: H1Variant) -> &'static str {
    match v {
        H1Variant::Hermitized => "hermitized",
        H1Variant::PaperNonHermitian => "paper-nonhermitian",
    }
}

/// Sampled trajectory with per-sample diagnostics.
#[pyclass(frozen, module = "ionflux")]
struct Trajectory {
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    populations: Vec<[f64; 3]>,
    #[pyo3(get)]
    max_trace_error: f64,
    #[pyo3(get)]
    max_hermiticity_defect: f64,
    #[pyo3(get)]
    min_eigenvalue: f64,
    states: Vec<ComplexMat3>,
}

#[pymethods]
impl Trajectory {
    /// Density matrix at every sample.
    #[getter]
    fn states(&self) -> Vec<Matrix> {
        self.states.iter().map(from_mat).collect()
    }

    fn __len__(&self) -> usize {
        self.times.len()
    }
}

/// Three-level hopping model.
#[pyclass(frozen, module = "ionflux")]
struct Model {
    evolution: Evolution,
}

#[pymethods]
impl Model {
    #[new]
    #[pyo3(signature = (omega0, c, gamma, h1_variant = "hermitized", mode = "lab"))]
    fn new(omega0: f64, c: f64, gamma: f64, h1_variant: &str, mode: &str) -> PyResult<Self> {
        let params = ModelParams::new(omega0, c, gamma, parse_variant(h1_variant)?)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let evolution = Evolution::new(params, parse_mode(mode)?).map_err(to_py_err)?;
        Ok(Model { evolution })
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.evolution.params().omega0
    }

    #[getter]
    fn c(&self) -> f64 {
        self.evolution.params().c
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.evolution.params().gamma
    }

    #[getter]
    fn h1_variant(&self) -> &'static str {
        variant_name(self.evolution.params().h1_variant)
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.evolution.mode().tag()
    }

    /// Largest stable fixed step in seconds.
    fn max_dt(&self) -> f64 {
        TimeGrid::max_dt(self.evolution.params())
    }

    /// Integrate from `rho0` (default: equal superposition). `dt` defaults to
    /// a quarter of the stability limit; `method` is "rk4" or "adaptive".
    #[pyo3(signature = (t_end, rho0 = None, dt = None, samples = 2000, method = "rk4"))]
    fn integrate(
        &self,
        py: Python<'_>,
        t_end: f64,
        rho0: Option<Matrix>,
        dt: Option<f64>,
        samples: usize,
        method: &str,
    ) -> PyResult<Trajectory> {
        let method = match method {
            "rk4" => Method::Rk4,
            "adaptive" => Method::Adaptive,
            _ => return Err(PyValueError::new_err(format!("method must be rk4 or adaptive, got {method:?}"))),
        };
        let rho0 = state(rho0.as_ref())?;
        let dt = dt.unwrap_or(DEFAULT_STEP / self.evolution.params().rate_scale());
        let grid = TimeGrid::with_samples(0.0, t_end, dt, samples).map_err(to_py_err)?;
        let ts = py
            .detach(|| self.evolution.integrate(&rho0, &grid, method))
            .map_err(to_py_err)?;
        Ok(Trajectory {
            populations: ts.populations(),
            max_trace_error: ts.max_trace_error(),
            max_hermiticity_defect: ts.max_hermiticity_defect(),
            min_eigenvalue: ts.min_eigenvalue(),
            states: ts.states.iter().map(|s| *s.matrix()).collect(),
            times: ts.times,
        })
    }

    /// `exp(L t) rho0` by matrix exponential.
    #[pyo3(signature = (t, rho0 = None))]
    fn propagate(&self, t: f64, rho0: Option<Matrix>) -> PyResult<Matrix> {
        let rho = self.evolution.propagate_expm(&state(rho0.as_ref())?, t).map_err(to_py_err)?;
        Ok(from_mat(rho.matrix()))
    }

    fn steady_state(&self) -> PyResult<Matrix> {
        Ok(from_mat(self.evolution.steady_state().map_err(to_py_err)?.matrix()))
    }

    /// g²(τ) over `taus`. Anchored at the steady state unless `rho0` is given,
    /// in which case the anchor is `rho0` evolved to `t0`.
    #[pyo3(signature = (taus, rho0 = None, t0 = 0.0))]
    fn g2_curve(&self, py: Python<'_>, taus: Vec<f64>, rho0: Option<Matrix>, t0: f64) -> PyResult<Vec<f64>> {
        let anchor = match rho0 {
            None => Anchor::SteadyState,
            Some(r) => Anchor::AtTime { t0, rho0: state(Some(&r))? },
        };
        let curve = py
            .detach(|| self.evolution.g2_curve(&anchor, &taus))
            .map_err(to_py_err)?;
        Ok(curve.values)
    }

    /// Unnormalized `Tr[S₊S₋ Λ_τ(S₋ ρ S₊)]`.
    fn two_time_correlation(&self, rho: Matrix, tau: f64) -> PyResult<Complex64> {
        self.evolution.two_time_correlation(&to_mat(&rho)?, tau).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        let p = self.evolution.params();
        format!(
            "Model(omega0={:e}, c={:e}, gamma={:e}, h1_variant={:?}, mode={:?})",
            p.omega0,
            p.c,
            p.gamma,
            variant_name(p.h1_variant),
            self.evolution.mode().tag()
        )
    }
}

#[pyfunction]
fn superposition() -> Matrix {
    from_mat(DensityMatrix::superposition().matrix())
}

#[pyfunction]
fn basis(index: usize) -> PyResult<Matrix> {
    let rho = DensityMatrix::basis(index).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(from_mat(rho.matrix()))
}

/// Von Neumann entropy in bits.
#[pyfunction]
fn entropy(rho: Matrix) -> PyResult<f64> {
    measures::von_neumann_entropy(&to_mat(&rho)?).map_err(to_py_err)
}

/// Entropy of the dephased state minus entropy of the state, in bits.
#[pyfunction]
fn distillable_coherence(rho: Matrix) -> PyResult<f64> {
    measures::distillable_coherence(&to_mat(&rho)?).map_err(to_py_err)
}

#[pyfunction]
fn purity(rho: Matrix) -> PyResult<f64> {
    Ok(measures::purity(&to_mat(&rho)?))
}

/// g²(0) of `rho` for the spin-1 lowering operator.
#[pyfunction]
fn g2_zero_delay(rho: Matrix) -> PyResult<f64> {
    let rho = ionflux_core::linalg::to_dense(&to_mat(&rho)?);
    let a = ionflux_core::linalg::to_dense(&ionflux_core::operators::build_spin1_ops().s_minus);
    Ok(correlations::g2_zero_delay_dense(&a, &rho))
}

/// Thermal de Broglie wavelength `ħ/√(2 m k_B T)` in metres.
#[pyfunction]
fn thermal_de_broglie(mass: f64, temperature: f64) -> f64 {
    decoherence::thermal_de_broglie(mass, temperature)
}

/// `ΔX² / (γ λ²)` in seconds.
#[pyfunction]
fn decoherence_time(delta_x: f64, mass: f64, temperature: f64, gamma: f64) -> f64 {
    decoherence::decoherence_time(delta_x, mass, temperature, gamma)
}

#[pyfunction]
fn dephasing_rate(gamma0: f64, omega: f64, cutoff: f64, temperature: f64) -> f64 {
    decoherence::dephasing_rate(gamma0, omega, cutoff, temperature)
}

/// K⁺/H₂O reduced mass in kg.
#[pyfunction]
fn potassium_water_reduced_mass() -> f64 {
    decoherence::potassium_water_reduced_mass()
}

/// Decoherence times `tau[i_omega][j_gamma]` with the default ΔX(ω) mapping
/// or a fixed `delta_x`.
#[pyfunction]
#[pyo3(signature = (gammas, omegas, mass = None, temperature = decoherence::constants::BODY_TEMPERATURE, delta_x = None))]
fn decoherence_sweep(
    gammas: Vec<f64>,
    omegas: Vec<f64>,
    mass: Option<f64>,
    temperature: f64,
    delta_x: Option<f64>,
) -> PyResult<Vec<Vec<f64>>> {
    let mass = mass.unwrap_or_else(decoherence::potassium_water_reduced_mass);
    let mapping = delta_x.map_or(decoherence::DeltaXMapping::PRESET, decoherence::DeltaXMapping::Fixed);
    let sweep = decoherence::sweep_decoherence_time(&gammas, &omegas, mass, temperature, &mapping)
        .map_err(to_py_err)?;
    Ok(sweep.tau)
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::preset_names().to_vec()
}

/// Write `<name>.csv` and `<name>.svg` into `out_dir`; returns the paths.
#[pyfunction]
fn run_preset(py: Python<'_>, name: &str, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
    py.detach(|| presets::run_preset(name, &out_dir)).map_err(to_py_err)
}

/// Run a config given as text; outputs are named after `stem`.
#[pyfunction]
#[pyo3(signature = (config, out_dir, stem = "simulation"))]
fn simulate(py: Python<'_>, config: &str, out_dir: PathBuf, stem: &str) -> PyResult<Vec<PathBuf>> {
    let cfg = ionflux_core::parse_config(config).map_err(to_py_err)?;
    py.detach(|| run::simulate(&cfg, &out_dir, stem)).map_err(to_py_err)
}

/// Parse a `key = value` config and return its resolved settings.
#[pyfunction]
fn parse_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ionflux_core::parse_config(text).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("omega0", cfg.model.omega0)?;
    d.set_item("c", cfg.model.c)?;
    d.set_item("gamma", cfg.model.gamma)?;
    d.set_item("h1_variant", variant_name(cfg.model.h1_variant))?;
    d.set_item("mode", cfg.mode.tag())?;
    d.set_item("t_end", cfg.grid.t_end)?;
    d.set_item("dt", cfg.grid.dt)?;
    d.set_item("initial_state", from_mat(cfg.initial_state.density_matrix().matrix()))?;
    d.set_item("outputs", cfg.outputs.iter().map(|o| o.as_str()).collect::<Vec<_>>())?;
    d.set_item("sweep_param", cfg.sweep.as_ref().map(|s| s.param.as_str()))?;
    d.set_item("sweep_values", cfg.sweep.as_ref().map(|s| s.values.clone()))?;
    d.set_item("preset", cfg.preset)?;
    Ok(d)
}

#[pymodule]
fn ionflux(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Model>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(superposition, m)?)?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(distillable_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    m.add_function(wrap_pyfunction!(g2_zero_delay, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_de_broglie, m)?)?;
    m.add_function(wrap_pyfunction!(decoherence_time, m)?)?;
    m.add_function(wrap_pyfunction!(dephasing_rate, m)?)?;
    m.add_function(wrap_pyfunction!(potassium_water_reduced_mass, m)?)?;
    m.add_function(wrap_pyfunction!(decoherence_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    Ok(())
}
