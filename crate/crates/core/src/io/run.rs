//! Running a parsed configuration and turning results into files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::correlations::{Anchor, G2Curve};
use crate::decoherence::{self, constants, DecoherenceSweep, DeltaXMapping};
use crate::dynamics::{Evolution, Method, TimeSeries};
use crate::operators::ModelParams;
use crate::Error;

use super::config::{ExperimentConfig, Output, Sweep};
use super::csv::{timeseries_table, write_csv_with_comments, Table, TIMESERIES_COLUMNS};
use super::fmt_num;
use super::svg::{emit_svg, Curve, PlotStyle, Scale};

/// Number of delay points in g² curves.
pub const G2_POINTS: usize = 1001;

/// Time series for each point of an (optional) parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Empty when the run was not a sweep.
    pub axis: String,
    pub values: Vec<f64>,
    pub series: Vec<TimeSeries>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2Sweep {
    pub axis: String,
    pub values: Vec<f64>,
    pub curves: Vec<G2Curve>,
}

/// Table, comment lines and plot for one output file pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub table: Table,
    pub comments: Vec<String>,
    pub curves: Vec<Curve>,
    pub style: PlotStyle,
}

impl Artifact {
    pub fn write_csv(&self, path: &Path) -> Result<PathBuf, Error> {
        write_csv_with_comments(&self.table, &self.comments, path)?;
        Ok(path.to_path_buf())
    }

    pub fn write_svg(&self, path: &Path) -> Result<PathBuf, Error> {
        emit_svg(&self.curves, &self.style, path)?;
        Ok(path.to_path_buf())
    }

    /// `<dir>/<stem>.csv` and `<dir>/<stem>.svg`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, Error> {
        Ok(vec![
            self.write_csv(&dir.join(format!("{stem}.csv")))?,
            self.write_svg(&dir.join(format!("{stem}.svg")))?,
        ])
    }
}

/// Compact legend number: `0`, `1e7`, `2.5e6`.
pub fn label_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:e}")
    }
}

fn points(cfg: &ExperimentConfig) -> (String, Vec<f64>, Vec<ModelParams>) {
    match &cfg.sweep {
        Some(Sweep { param, values }) => (param.as_str().into(), values.clone(), cfg.points()),
        None => (String::new(), Vec::new(), vec![cfg.model]),
    }
}

pub fn run_series(cfg: &ExperimentConfig) -> Result<SweepResult, Error> {
    let (axis, values, models) = points(cfg);
    let rho0 = cfg.initial_state.density_matrix();
    let series = models
        .par_iter()
        .map(|p| Ok(Evolution::new(*p, cfg.mode)?.integrate(&rho0, &cfg.grid, Method::Rk4)?))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(SweepResult { axis, values, series })
}

/// Uniform delays from 0 to the configured end time.
pub fn g2_taus(cfg: &ExperimentConfig) -> Vec<f64> {
    let span = cfg.grid.t_end - cfg.grid.t0;
    (0..G2_POINTS).map(|k| span * k as f64 / (G2_POINTS - 1) as f64).collect()
}

/// g² anchored at the configured initial state at `t = 0`.
pub fn run_g2(cfg: &ExperimentConfig) -> Result<G2Sweep, Error> {
    let (axis, values, models) = points(cfg);
    let anchor = Anchor::AtTime { t0: 0.0, rho0: cfg.initial_state.density_matrix() };
    let taus = g2_taus(cfg);
    let curves = models
        .par_iter()
        .map(|p| Ok(Evolution::new(*p, cfg.mode)?.g2_curve(&anchor, &taus)?))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(G2Sweep { axis, values, curves })
}

/// Preset decoherence-time sweep: γ over [1e6, 1e8] s⁻¹ at four
/// frequencies, K⁺/H₂O reduced mass at 310 K.
pub fn run_dectime_preset() -> Result<DecoherenceSweep, Error> {
    Ok(decoherence::sweep_decoherence_time(
        &decoherence::log_grid(1e6, 1e8, 41),
        &[1e9, 1e10, 1e11, 1e12],
        decoherence::potassium_water_reduced_mass(),
        constants::BODY_TEMPERATURE,
        &DeltaXMapping::PRESET,
    )?)
}

pub fn dectime_preset_artifact() -> Result<Artifact, Error> {
    Ok(dectime_artifact(
        &run_dectime_preset()?,
        decoherence::potassium_water_reduced_mass(),
        constants::BODY_TEMPERATURE,
        &DeltaXMapping::PRESET,
    ))
}

fn param_comments(cfg: &ExperimentConfig) -> Vec<String> {
    let m = &cfg.model;
    let mut out = vec![
        format!("mode_tag: {}", cfg.mode.tag()),
        format!(
            "omega0 = {}, gamma = {}, c = {}, h1_variant = {}",
            fmt_num(m.omega0),
            fmt_num(m.gamma),
            fmt_num(m.c),
            m.h1_variant.as_str()
        ),
        format!("t_end = {}, dt = {}", fmt_num(cfg.grid.t_end), fmt_num(cfg.grid.dt)),
    ];
    if let Some(s) = &cfg.sweep {
        out.push(format!(
            "sweep {} = {}",
            s.param.as_str(),
            s.values.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(", ")
        ));
    }
    if let Some(p) = &cfg.preset {
        out.push(format!("preset = {p}"));
    }
    out
}

fn time_style(title: &str, y_label: &str) -> PlotStyle {
    PlotStyle {
        title: title.into(),
        x_label: "t (µs)".into(),
        y_label: y_label.into(),
        x_factor: 1e6,
        ..PlotStyle::default()
    }
}

/// Full time-series table; sweeps prepend the swept parameter column.
pub fn series_table(result: &SweepResult) -> Table {
    let tables: Vec<Table> = result.series.par_iter().map(timeseries_table).collect();
    combine(result, tables)
}

fn combine(result: &SweepResult, mut tables: Vec<Table>) -> Table {
    if result.axis.is_empty() {
        return tables.swap_remove(0);
    }
    let mut header = vec![result.axis.clone()];
    header.extend(TIMESERIES_COLUMNS.iter().map(|s| s.to_string()));
    let mut table = Table::new(&header);
    for (&v, t) in result.values.iter().zip(tables) {
        for row in t.rows {
            let mut r = Vec::with_capacity(row.len() + 1);
            r.push(v);
            r.extend(row);
            table.push(r);
        }
    }
    table
}

/// Plot of one time-series output kind.
pub fn series_artifact(cfg: &ExperimentConfig, result: &SweepResult, kind: Output) -> Artifact {
    let (cols, title, y_label): (&[&str], &str, &str) = match kind {
        Output::Populations => (&["P0", "P1", "P2"], "Populations", "P"),
        Output::Offdiag => (
            &["re01", "re02", "re12", "im01", "im02", "im12"],
            "Off-diagonal elements",
            "ρ_mn",
        ),
        Output::Cd => (&["cd"], "Distillable coherence", "C_d (bits)"),
        Output::Purity => (&["purity"], "Purity", "Tr ρ²"),
        Output::G2 | Output::Dectime => unreachable!("not a time-series output"),
    };
    let mut curves = Vec::new();
    let swept = !result.axis.is_empty();
    let tables: Vec<Table> = result.series.par_iter().map(timeseries_table).collect();
    for (k, t) in tables.iter().enumerate() {
        let times = t.column("t").expect("time column");
        for col in cols {
            let label = match (swept, cols.len()) {
                (false, _) => col.to_string(),
                (true, 1) => format!("{} = {}", result.axis, label_num(result.values[k])),
                (true, _) => format!("{col}, {} = {}", result.axis, label_num(result.values[k])),
            };
            curves.push(Curve::new(label, &times, &t.column(col).expect("known column")));
        }
    }
    Artifact {
        table: combine(result, tables),
        comments: param_comments(cfg),
        curves,
        style: time_style(title, y_label),
    }
}

pub fn g2_artifact(cfg: &ExperimentConfig, g2: &G2Sweep) -> Artifact {
    let swept = !g2.axis.is_empty();
    let mut header = Vec::new();
    if swept {
        header.push(g2.axis.clone());
    }
    header.extend(["tau".to_string(), "g2".to_string()]);
    let mut table = Table::new(&header);
    let mut curves = Vec::new();
    for (k, curve) in g2.curves.iter().enumerate() {
        for (&tau, &g) in curve.taus.iter().zip(&curve.values) {
            let mut row = if swept { vec![g2.values[k]] } else { Vec::new() };
            row.extend([tau, g]);
            table.push(row);
        }
        let label = if swept { format!("{} = {}", g2.axis, label_num(g2.values[k])) } else { "g2".into() };
        curves.push(Curve::new(label, &curve.taus, &curve.values));
    }
    let mut comments = param_comments(cfg);
    comments.push("anchor: initial state at t = 0".into());
    Artifact {
        table,
        comments,
        curves,
        style: PlotStyle {
            x_label: "τ (µs)".into(),
            ..time_style("Second-order coherence", "g²(τ)")
        },
    }
}

pub fn dectime_artifact(sweep: &DecoherenceSweep, mass: f64, temperature: f64, mapping: &DeltaXMapping) -> Artifact {
    let mut table = Table::new(&["omega", "delta_x", "gamma", "tau_d"]);
    let mut curves = Vec::new();
    for (i, (&w, &dx)) in sweep.omegas.iter().zip(&sweep.delta_x).enumerate() {
        for (&g, &tau) in sweep.gammas.iter().zip(&sweep.tau[i]) {
            table.push(vec![w, dx, g, tau]);
        }
        curves.push(Curve::new(format!("ω = {} s⁻¹", label_num(w)), &sweep.gammas, &sweep.tau[i]));
    }
    let dx = match *mapping {
        DeltaXMapping::Fixed(dx) => format!("delta_x = {} m", fmt_num(dx)),
        DeltaXMapping::PowerLaw { reference, omega_ref, exponent } => format!(
            "delta_x = {} m * (omega / {} s^-1)^{}",
            fmt_num(reference),
            fmt_num(omega_ref),
            fmt_num(exponent)
        ),
    };
    Artifact {
        table,
        comments: vec![
            "tau_d = delta_x^2 / (gamma * lambda_dB^2)".into(),
            dx,
            format!("mass = {} kg, temperature = {} K", fmt_num(mass), fmt_num(temperature)),
        ],
        curves,
        style: PlotStyle {
            title: "Decoherence time".into(),
            x_label: "γ (s⁻¹)".into(),
            y_label: "τ_D (s)".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            x_factor: 1.0,
        },
    }
}

/// Runs every requested output of `cfg` and writes the files into `dir`.
///
/// Time-series outputs share `<stem>.csv`, each with its own
/// `<stem>_<output>.svg`; g² and decoherence-time outputs get their own
/// `<stem>_g2.*` and `<stem>_dectime.*` pairs.
pub fn simulate(cfg: &ExperimentConfig, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, Error> {
    let mut files = Vec::new();
    let series_kinds: Vec<Output> = cfg
        .outputs
        .iter()
        .copied()
        .filter(|o| !matches!(o, Output::G2 | Output::Dectime))
        .collect();
    if !series_kinds.is_empty() {
        let result = run_series(cfg)?;
        for (k, &kind) in series_kinds.iter().enumerate() {
            let art = series_artifact(cfg, &result, kind);
            if k == 0 {
                files.push(art.write_csv(&dir.join(format!("{stem}.csv")))?);
            }
            files.push(art.write_svg(&dir.join(format!("{stem}_{}.svg", kind.as_str())))?);
        }
    }
    if cfg.outputs.contains(&Output::G2) {
        files.extend(g2_artifact(cfg, &run_g2(cfg)?).write(dir, &format!("{stem}_g2"))?);
    }
    if cfg.outputs.contains(&Output::Dectime) {
        files.extend(dectime_preset_artifact()?.write(dir, &format!("{stem}_dectime"))?);
    }
    Ok(files)
}
