//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # fig3b-like run
//! omega0 = 1e8
//! gamma = 5e6
//! c = 1e7
//! initial_state = superposition
//! outputs = populations, cd
//! ```
//!
//! Blank lines and `#` comments are ignored. A `preset` line applies that
//! preset's values first; explicit keys override them regardless of order.

use std::fmt;

use nalgebra::Vector3;
use thiserror::Error;

use crate::dynamics::{DynamicsError, Mode, TimeGrid};
use crate::linalg::{ComplexMat3, C64};
use crate::operators::{DensityMatrix, H1Variant, ModelParams};

use super::fmt_num;

pub const KEYS: [&str; 12] = [
    "omega0",
    "gamma",
    "c",
    "h1_variant",
    "mode",
    "t_end",
    "dt",
    "initial_state",
    "sweep_param",
    "sweep_values",
    "outputs",
    "preset",
];

pub const PRESETS: [&str; 6] = ["fig3a", "fig3b", "fig-offdiag", "fig-dectime", "fig-cd", "fig-g2"];

pub const DEFAULT_T_END: f64 = 2e-6;

/// Default `dt · max(ω₀, c, γ, 1)`: a quarter of the stability limit, which
/// keeps RK4 drift in the eigenvalues of pure states below 1e-9 over 2 µs.
pub const DEFAULT_STEP: f64 = 2.5e-3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    UnknownKey(String),
    TypeMismatch { key: String, expected: String, found: String },
    MissingRequired(String),
    UnknownPreset(String),
    Syntax(String),
    DuplicateKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub kind: ConfigErrorKind,
}

impl ConfigError {
    fn at(line: Option<usize>, kind: ConfigErrorKind) -> Self {
        ConfigError { line, kind }
    }

    fn mismatch(line: Option<usize>, key: &str, expected: &str, found: &str) -> Self {
        ConfigError::at(
            line,
            ConfigErrorKind::TypeMismatch {
                key: key.to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            },
        )
    }

    /// Key the error is about, if any.
    pub fn key(&self) -> Option<&str> {
        match &self.kind {
            ConfigErrorKind::UnknownKey(k)
            | ConfigErrorKind::MissingRequired(k)
            | ConfigErrorKind::DuplicateKey(k)
            | ConfigErrorKind::TypeMismatch { key: k, .. } => Some(k),
            ConfigErrorKind::UnknownPreset(_) => Some("preset"),
            ConfigErrorKind::Syntax(_) => None,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.kind {
            ConfigErrorKind::UnknownKey(k) => write!(f, "unknown key `{k}` (valid keys: {})", KEYS.join(", ")),
            ConfigErrorKind::TypeMismatch { key, expected, found } => {
                write!(f, "`{key}`: expected {expected}, found `{found}`")
            }
            ConfigErrorKind::MissingRequired(k) => write!(f, "missing required key `{k}`"),
            ConfigErrorKind::UnknownPreset(p) => {
                write!(f, "unknown preset `{p}` (valid presets: {})", PRESETS.join(", "))
            }
            ConfigErrorKind::Syntax(s) => write!(f, "{s}"),
            ConfigErrorKind::DuplicateKey(k) => write!(f, "key `{k}` given twice"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Equal-weight pure superposition of the three levels.
    Superposition,
    Basis(usize),
    Explicit(ComplexMat3),
}

impl InitialState {
    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            InitialState::Superposition => DensityMatrix::superposition(),
            InitialState::Basis(i) => DensityMatrix::basis(*i).expect("index checked at parse time"),
            InitialState::Explicit(m) => DensityMatrix::new_unchecked(*m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Populations,
    Offdiag,
    Cd,
    Purity,
    G2,
    Dectime,
}

impl Output {
    pub const ALL: [Output; 6] =
        [Output::Populations, Output::Offdiag, Output::Cd, Output::Purity, Output::G2, Output::Dectime];

    pub fn as_str(self) -> &'static str {
        match self {
            Output::Populations => "populations",
            Output::Offdiag => "offdiag",
            Output::Cd => "cd",
            Output::Purity => "purity",
            Output::G2 => "g2",
            Output::Dectime => "dectime",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Output::ALL.into_iter().find(|o| o.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Omega0,
    Gamma,
    C,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Omega0 => "omega0",
            SweepParam::Gamma => "gamma",
            SweepParam::C => "c",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "omega0" => Some(SweepParam::Omega0),
            "gamma" => Some(SweepParam::Gamma),
            "c" => Some(SweepParam::C),
            _ => None,
        }
    }

    pub fn apply(self, params: &ModelParams, value: f64) -> ModelParams {
        let mut p = *params;
        match self {
            SweepParam::Omega0 => p.omega0 = value,
            SweepParam::Gamma => p.gamma = value,
            SweepParam::C => p.c = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn points(&self, base: &ModelParams) -> Vec<ModelParams> {
        self.values.iter().map(|&v| self.param.apply(base, v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub grid: TimeGrid,
    pub initial_state: InitialState,
    pub mode: Mode,
    pub outputs: Vec<Output>,
    pub sweep: Option<Sweep>,
    pub preset: Option<String>,
}

impl ExperimentConfig {
    /// Every model the run touches: the base one, or one per sweep value.
    pub fn points(&self) -> Vec<ModelParams> {
        match &self.sweep {
            Some(s) => s.points(&self.model),
            None => vec![self.model],
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Raw {
    omega0: Option<f64>,
    gamma: Option<f64>,
    c: Option<f64>,
    h1_variant: Option<H1Variant>,
    mode: Option<Mode>,
    t_end: Option<f64>,
    dt: Option<f64>,
    initial_state: Option<InitialState>,
    sweep_param: Option<Option<SweepParam>>,
    sweep_values: Option<Vec<f64>>,
    outputs: Option<Vec<Output>>,
}

fn preset_raw(name: &str) -> Option<Raw> {
    let base = |c: f64, gamma: f64| Raw {
        omega0: Some(1e8),
        gamma: Some(gamma),
        c: Some(c),
        h1_variant: Some(H1Variant::Hermitized),
        mode: Some(Mode::LabLindblad),
        t_end: Some(DEFAULT_T_END),
        initial_state: Some(InitialState::Superposition),
        ..Raw::default()
    };
    let hopping_sweep = |outputs: Vec<Output>| Raw {
        sweep_param: Some(Some(SweepParam::C)),
        sweep_values: Some(vec![0.0, 1e7, 2e7, 4e7]),
        outputs: Some(outputs),
        ..base(0.0, 5e6)
    };
    Some(match name {
        "fig3a" => Raw { outputs: Some(vec![Output::Populations]), ..base(2e7, 0.0) },
        "fig3b" => Raw { outputs: Some(vec![Output::Populations]), ..base(1e7, 5e6) },
        "fig-offdiag" => Raw { outputs: Some(vec![Output::Offdiag]), ..base(1e7, 5e6) },
        "fig-cd" => hopping_sweep(vec![Output::Cd]),
        "fig-g2" => hopping_sweep(vec![Output::G2]),
        "fig-dectime" => Raw { outputs: Some(vec![Output::Dectime]), ..base(1e7, 5e6) },
        _ => return None,
    })
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::mismatch(Some(line), key, "a finite number", v))
}

fn parse_nonneg(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = parse_f64(line, key, v)?;
    if x < 0.0 {
        return Err(ConfigError::mismatch(Some(line), key, "a non-negative number", v));
    }
    Ok(x)
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = parse_f64(line, key, v)?;
    if x <= 0.0 {
        return Err(ConfigError::mismatch(Some(line), key, "a positive number", v));
    }
    Ok(x)
}

fn parse_list<T>(
    line: usize,
    key: &str,
    v: &str,
    mut item: impl FnMut(&str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(ConfigError::mismatch(Some(line), key, "a comma-separated list", v));
    }
    items.into_iter().map(&mut item).collect()
}

/// `a`, `bi`, `a+bi`, `a-bi` with `i` alone meaning `1i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|r| C64::new(r, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        t => t.parse::<f64>().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_num(z.re), sign, fmt_num(z.im.abs()))
}

fn parse_state(line: usize, v: &str) -> Result<InitialState, ConfigError> {
    let bad = |expected: &str| ConfigError::mismatch(Some(line), "initial_state", expected, v);
    if v == "superposition" {
        return Ok(InitialState::Superposition);
    }
    if let Some(idx) = v.strip_prefix("basis(").and_then(|r| r.strip_suffix(')')) {
        return match idx.trim().parse::<usize>() {
            Ok(i) if i < 3 => Ok(InitialState::Basis(i)),
            _ => Err(bad("basis(0), basis(1) or basis(2)")),
        };
    }
    if let Some(body) = v.strip_prefix("matrix(").and_then(|r| r.strip_suffix(')')) {
        let rows: Vec<&str> = body.split(';').collect();
        let mut m = ComplexMat3::zeros();
        if rows.len() != 3 {
            return Err(bad("three `;`-separated rows"));
        }
        for (i, row) in rows.iter().enumerate() {
            let entries: Vec<&str> = row.split(',').collect();
            if entries.len() != 3 {
                return Err(bad("three entries per row"));
            }
            for (j, e) in entries.iter().enumerate() {
                m[(i, j)] = parse_complex(e).ok_or_else(|| bad("complex entries like 0.5 or 0.1-0.2i"))?;
            }
        }
        DensityMatrix::new(m).map_err(|e| bad(&format!("a density matrix ({e})")))?;
        return Ok(InitialState::Explicit(m));
    }
    Err(bad("superposition, basis(i) or matrix(...)"))
}

fn parse_mode(v: &str) -> Option<Mode> {
    match v {
        "lab" | "lab-lindblad" => Some(Mode::LabLindblad),
        "paper" | "paper-dirac-ode" => Some(Mode::PaperDiracOde),
        _ => None,
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = Raw::default();
    let mut preset: Option<(usize, String)> = None;
    let mut seen: Vec<&str> = Vec::new();

    for (idx, full_line) in text.lines().enumerate() {
        let n = idx + 1;
        let line = full_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at(Some(n), ConfigErrorKind::Syntax(format!("expected `key = value`, found `{line}`"))));
        };
        let (key, v) = (key.trim(), value.trim());
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::at(Some(n), ConfigErrorKind::UnknownKey(key.to_string())));
        };
        if seen.contains(&known) {
            return Err(ConfigError::at(Some(n), ConfigErrorKind::DuplicateKey(key.to_string())));
        }
        seen.push(known);
        match known {
            "omega0" => raw.omega0 = Some(parse_positive(n, key, v)?),
            "gamma" => raw.gamma = Some(parse_nonneg(n, key, v)?),
            "c" => raw.c = Some(parse_nonneg(n, key, v)?),
            "t_end" => raw.t_end = Some(parse_positive(n, key, v)?),
            "dt" => raw.dt = Some(parse_positive(n, key, v)?),
            "h1_variant" => {
                raw.h1_variant = Some(
                    H1Variant::parse(v)
                        .ok_or_else(|| ConfigError::mismatch(Some(n), key, "hermitized or paper-nonhermitian", v))?,
                )
            }
            "mode" => {
                raw.mode = Some(parse_mode(v).ok_or_else(|| ConfigError::mismatch(Some(n), key, "lab or paper", v))?)
            }
            "initial_state" => raw.initial_state = Some(parse_state(n, v)?),
            "sweep_param" => {
                raw.sweep_param = Some(match v {
                    "none" => None,
                    _ => Some(
                        SweepParam::parse(v)
                            .ok_or_else(|| ConfigError::mismatch(Some(n), key, "omega0, gamma, c or none", v))?,
                    ),
                })
            }
            "sweep_values" => raw.sweep_values = Some(parse_list(n, key, v, |s| parse_nonneg(n, key, s))?),
            "outputs" => {
                let names = Output::ALL.map(Output::as_str).join(", ");
                let mut outs = parse_list(n, key, v, |s| {
                    Output::parse(s).ok_or_else(|| ConfigError::mismatch(Some(n), key, &format!("one of {names}"), s))
                })?;
                outs.sort();
                outs.dedup();
                raw.outputs = Some(outs);
            }
            "preset" => preset = Some((n, v.to_string())),
            _ => unreachable!(),
        }
    }

    let base = match &preset {
        Some((n, name)) => {
            preset_raw(name).ok_or_else(|| ConfigError::at(Some(*n), ConfigErrorKind::UnknownPreset(name.clone())))?
        }
        None => Raw::default(),
    };
    let merged = Raw {
        omega0: raw.omega0.or(base.omega0),
        gamma: raw.gamma.or(base.gamma),
        c: raw.c.or(base.c),
        h1_variant: raw.h1_variant.or(base.h1_variant),
        mode: raw.mode.or(base.mode),
        t_end: raw.t_end.or(base.t_end),
        dt: raw.dt.or(base.dt),
        initial_state: raw.initial_state.or(base.initial_state),
        sweep_param: raw.sweep_param.or(base.sweep_param),
        sweep_values: raw.sweep_values.or(base.sweep_values),
        outputs: raw.outputs.or(base.outputs),
    };
    validate(merged, preset.map(|(_, p)| p))
}

fn validate(raw: Raw, preset: Option<String>) -> Result<ExperimentConfig, ConfigError> {
    let missing = |k: &str| ConfigError::at(None, ConfigErrorKind::MissingRequired(k.to_string()));
    let model = ModelParams {
        omega0: raw.omega0.ok_or_else(|| missing("omega0"))?,
        c: raw.c.ok_or_else(|| missing("c"))?,
        gamma: raw.gamma.ok_or_else(|| missing("gamma"))?,
        h1_variant: raw.h1_variant.unwrap_or_default(),
    };
    let sweep = match (raw.sweep_param, raw.sweep_values) {
        (Some(None), _) | (None, None) => None,
        (Some(Some(_)), None) => return Err(missing("sweep_values")),
        (None, Some(_)) => return Err(missing("sweep_param")),
        (Some(Some(param)), Some(values)) => {
            let monotone = values.windows(2).all(|w| w[1] > w[0]) || values.windows(2).all(|w| w[1] < w[0]);
            if !monotone {
                return Err(ConfigError::mismatch(None, "sweep_values", "strictly monotone values", &fmt_list(&values)));
            }
            if param == SweepParam::Omega0 && values.iter().any(|&v| v <= 0.0) {
                return Err(ConfigError::mismatch(None, "sweep_values", "positive omega0 values", &fmt_list(&values)));
            }
            Some(Sweep { param, values })
        }
    };
    let scale = match &sweep {
        Some(s) => s.points(&model).iter().map(ModelParams::rate_scale).fold(1.0, f64::max),
        None => model.rate_scale(),
    };
    let t_end = raw.t_end.unwrap_or(DEFAULT_T_END);
    let dt = raw.dt.unwrap_or(DEFAULT_STEP / scale);
    let grid = TimeGrid::with_samples(0.0, t_end, dt, TimeGrid::DEFAULT_SAMPLES).map_err(|e| match e {
        DynamicsError::InvalidGrid(msg) => ConfigError::mismatch(None, "dt", "a step below t_end", &msg),
        other => ConfigError::at(None, ConfigErrorKind::Syntax(other.to_string())),
    })?;
    Ok(ExperimentConfig {
        model,
        grid,
        initial_state: raw.initial_state.unwrap_or(InitialState::Superposition),
        mode: raw.mode.unwrap_or_default(),
        outputs: raw
            .outputs
            .unwrap_or_else(|| vec![Output::Populations, Output::Offdiag, Output::Cd, Output::Purity]),
        sweep,
        preset,
    })
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(", ")
}

/// Text that parses back to `config`. Every key is written explicitly.
pub fn render_config(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    if let Some(p) = &config.preset {
        kv("preset", p.clone());
    }
    kv("omega0", fmt_num(config.model.omega0));
    kv("gamma", fmt_num(config.model.gamma));
    kv("c", fmt_num(config.model.c));
    kv("h1_variant", config.model.h1_variant.as_str().to_string());
    kv("mode", config.mode.tag().to_string());
    kv("t_end", fmt_num(config.grid.t_end));
    kv("dt", fmt_num(config.grid.dt));
    let state = match &config.initial_state {
        InitialState::Superposition => "superposition".to_string(),
        InitialState::Basis(i) => format!("basis({i})"),
        InitialState::Explicit(m) => {
            let rows: Vec<String> = (0..3)
                .map(|i| (0..3).map(|j| fmt_complex(m[(i, j)])).collect::<Vec<_>>().join(","))
                .collect();
            format!("matrix({})", rows.join(";"))
        }
    };
    kv("initial_state", state);
    match &config.sweep {
        Some(s) => {
            kv("sweep_param", s.param.as_str().to_string());
            kv("sweep_values", fmt_list(&s.values));
        }
        None if config.preset.is_some() => kv("sweep_param", "none".to_string()),
        None => {}
    }
    kv("outputs", config.outputs.iter().map(|o| o.as_str()).collect::<Vec<_>>().join(", "));
    out
}

/// Real symmetric 3×3 state from populations and real coherences, for tests.
pub fn explicit_state(p: [f64; 3], coherences: [C64; 3]) -> ComplexMat3 {
    let [a, b, c] = coherences;
    let mut m = ComplexMat3::from_diagonal(&Vector3::new(C64::new(p[0], 0.0), C64::new(p[1], 0.0), C64::new(p[2], 0.0)));
    m[(0, 1)] = a;
    m[(1, 0)] = a.conj();
    m[(0, 2)] = b;
    m[(2, 0)] = b.conj();
    m[(1, 2)] = c;
    m[(2, 1)] = c.conj();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kind(r: Result<ExperimentConfig, ConfigError>) -> ConfigErrorKind {
        r.unwrap_err().kind
    }

    #[test]
    fn explicit_rates() {
        let cfg = parse_config("omega0 = 1e8\ngamma = 5e6\nc = 1e7\n").unwrap();
        assert_eq!(cfg.model.omega0, 1e8);
        assert_eq!(cfg.model.gamma, 5e6);
        assert_eq!(cfg.model.c, 1e7);
        assert_eq!(cfg.model.h1_variant, H1Variant::Hermitized);
        assert_eq!(cfg.mode, Mode::LabLindblad);
        assert_eq!(cfg.grid.t_end, DEFAULT_T_END);
        assert_eq!(cfg.grid.dt, 2.5e-11);
    }

    #[test]
    fn negative_rate_names_the_key() {
        let err = parse_config("omega0 = 1e8\nc = 1\ngamma = -1").unwrap_err();
        assert_eq!(err.key(), Some("gamma"));
        assert_eq!(err.line, Some(3));
        assert!(matches!(err.kind, ConfigErrorKind::TypeMismatch { .. }));
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn lone_negative_gamma_is_rejected() {
        assert_eq!(parse_config("gamma = -1").unwrap_err().key(), Some("gamma"));
    }

    #[test]
    fn fig3b_preset_expands() {
        let cfg = parse_config("preset = fig3b").unwrap();
        assert_eq!(cfg.model.omega0, 1e8);
        assert_eq!(cfg.model.gamma, 0.5e7);
        assert_eq!(cfg.model.c, 2.0 * cfg.model.gamma);
        assert_eq!(cfg.initial_state, InitialState::Superposition);
        assert_eq!(cfg.preset.as_deref(), Some("fig3b"));
    }

    #[test]
    fn explicit_keys_override_preset() {
        let cfg = parse_config("c = 3e7\npreset = fig3b\n").unwrap();
        assert_eq!(cfg.model.c, 3e7);
        assert_eq!(cfg.model.gamma, 5e6);
    }

    #[test]
    fn error_kinds() {
        assert_eq!(kind(parse_config("omega = 1")), ConfigErrorKind::UnknownKey("omega".into()));
        assert_eq!(kind(parse_config("omega0 = 1\ngamma = 1")), ConfigErrorKind::MissingRequired("c".into()));
        assert_eq!(kind(parse_config("preset = fig9")), ConfigErrorKind::UnknownPreset("fig9".into()));
        assert!(matches!(kind(parse_config("omega0 1e8")), ConfigErrorKind::Syntax(_)));
        assert!(matches!(kind(parse_config("c = 1\nc = 2")), ConfigErrorKind::DuplicateKey(_)));
        assert!(matches!(kind(parse_config("omega0 = fast")), ConfigErrorKind::TypeMismatch { .. }));
        let e = parse_config("preset = fig9").unwrap_err().to_string();
        for p in PRESETS {
            assert!(e.contains(p));
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# header\n\nomega0 = 2e8 # inline\ngamma = 0\nc = 0\n").unwrap();
        assert_eq!(cfg.model.omega0, 2e8);
    }

    #[test]
    fn sweep_requires_monotone_values() {
        let base = "omega0 = 1e8\ngamma = 5e6\nc = 0\nsweep_param = c\n";
        assert!(parse_config(&format!("{base}sweep_values = 0, 1e7, 4e7")).is_ok());
        assert_eq!(
            parse_config(&format!("{base}sweep_values = 0, 4e7, 1e7")).unwrap_err().key(),
            Some("sweep_values")
        );
        assert_eq!(parse_config(base).unwrap_err().kind, ConfigErrorKind::MissingRequired("sweep_values".into()));
    }

    #[test]
    fn states() {
        let base = "omega0 = 1e8\ngamma = 5e6\nc = 0\n";
        let cfg = parse_config(&format!("{base}initial_state = basis(2)")).unwrap();
        assert_eq!(cfg.initial_state, InitialState::Basis(2));
        assert!(parse_config(&format!("{base}initial_state = basis(3)")).is_err());
        let cfg = parse_config(&format!("{base}initial_state = matrix(0.5,0.1-0.2i,0;0.1+0.2i,0.5,0;0,0,0)")).unwrap();
        let InitialState::Explicit(m) = cfg.initial_state else { panic!() };
        assert_eq!(m[(0, 1)], C64::new(0.1, -0.2));
        assert!(parse_config(&format!("{base}initial_state = matrix(1,0,0;0,1,0;0,0,0)")).is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2"), Some(C64::new(2.0, 0.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3-2.5e-4i"), Some(C64::new(1e-3, -2.5e-4)));
        assert_eq!(parse_complex("-1e-3+i"), Some(C64::new(-1e-3, 1.0)));
        assert_eq!(parse_complex("3e+2i"), Some(C64::new(0.0, 300.0)));
        assert_eq!(parse_complex("x"), None);
    }

    fn rate() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), 1e3f64..1e9]
    }

    fn state() -> impl Strategy<Value = InitialState> {
        prop_oneof![
            Just(InitialState::Superposition),
            (0usize..3).prop_map(InitialState::Basis),
            (0.05f64..0.9, 0.0f64..1.0, -0.02f64..0.02, -0.02f64..0.02).prop_map(|(a, f, x, y)| {
                let b = (1.0 - a) * f;
                InitialState::Explicit(explicit_state([a, b, 1.0 - a - b], [C64::new(x, y), C64::new(y, 0.0), C64::new(0.0, x)]))
            }),
        ]
    }

    prop_compose! {
        fn config()(
            omega0 in 1e6f64..1e9,
            gamma in rate(),
            c in rate(),
            variant in prop_oneof![Just(H1Variant::Hermitized), Just(H1Variant::PaperNonHermitian)],
            mode in prop_oneof![Just(Mode::LabLindblad), Just(Mode::PaperDiracOde)],
            t_end in 1e-7f64..1e-5,
            dt_frac in 1e-4f64..1e-2,
            initial_state in state(),
            outputs in proptest::sample::subsequence(Output::ALL.to_vec(), 1..=6),
            sweep in proptest::option::of((0usize..3, proptest::collection::btree_set(1u32..1_000_000, 1..5))),
            preset in proptest::option::of(proptest::sample::select(PRESETS.to_vec())),
        ) -> ExperimentConfig {
            let sweep = sweep.map(|(p, vals)| Sweep {
                param: [SweepParam::Omega0, SweepParam::Gamma, SweepParam::C][p],
                values: vals.into_iter().map(|v| v as f64 * 1e3).collect(),
            });
            ExperimentConfig {
                model: ModelParams { omega0, c, gamma, h1_variant: variant },
                grid: TimeGrid::with_samples(0.0, t_end, t_end * dt_frac, TimeGrid::DEFAULT_SAMPLES).unwrap(),
                initial_state,
                mode,
                outputs,
                sweep,
                preset: preset.map(String::from),
            }
        }
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(cfg in config()) {
            let text = render_config(&cfg);
            prop_assert_eq!(parse_config(&text).unwrap(), cfg);
        }
    }
}
