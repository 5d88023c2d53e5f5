use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ionflux_core::decoherence::{self, constants, DeltaXMapping};
use ionflux_core::io::config::PRESETS;
use ionflux_core::io::{presets, run};
use ionflux_core::{parse_config, Error, IoError, Mode};

#[derive(Parser)]
#[command(name = "ionflux", version, about = "Three-level open-system model of ion-channel hopping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lab,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a `key = value` config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config's `mode`.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Sweep points run concurrently (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Reproduce one figure as `<name>.csv` and `<name>.svg`.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Decoherence time over a log-spaced dephasing-rate grid.
    Dectime {
        #[arg(long, default_value_t = 1e6)]
        gamma_min: f64,
        #[arg(long, default_value_t = 1e8)]
        gamma_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Angular frequencies in s⁻¹, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1e9, 1e10, 1e11, 1e12])]
        omega: Vec<f64>,
        /// Fixed position spread in m; defaults to the frequency-dependent preset mapping.
        #[arg(long)]
        delta_x: Option<f64>,
        /// Reduced mass in atomic mass units (default: K⁺ with H₂O).
        #[arg(long)]
        mass_u: Option<f64>,
        #[arg(long, default_value_t = constants::BODY_TEMPERATURE)]
        temp_k: f64,
        /// Write dectime.csv and dectime.svg here instead of printing CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn simulate(config: &Path, out: &Path, mode: Option<ModeArg>, jobs: Option<usize>) -> Result<Vec<PathBuf>, Error> {
    let text = std::fs::read_to_string(config).map_err(|source| IoError { path: config.to_path_buf(), source })?;
    let mut cfg = parse_config(&text)?;
    if let Some(m) = mode {
        cfg.mode = match m {
            ModeArg::Lab => Mode::LabLindblad,
            ModeArg::Paper => Mode::PaperDiracOde,
        };
    }
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("simulation");
    with_jobs(jobs, || run::simulate(&cfg, out, stem))
}

#[allow(clippy::too_many_arguments)]
fn dectime(
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
    omega: &[f64],
    delta_x: Option<f64>,
    mass_u: Option<f64>,
    temp_k: f64,
    out: Option<&Path>,
) -> Result<Vec<PathBuf>, Error> {
    let mass = match mass_u {
        Some(u) => u * constants::ATOMIC_MASS,
        None => decoherence::potassium_water_reduced_mass(),
    };
    let mapping = delta_x.map_or(DeltaXMapping::PRESET, DeltaXMapping::Fixed);
    let gammas = decoherence::log_grid(gamma_min, gamma_max, points);
    let sweep = decoherence::sweep_decoherence_time(&gammas, omega, mass, temp_k, &mapping)?;
    let art = run::dectime_artifact(&sweep, mass, temp_k, &mapping);
    match out {
        Some(dir) => art.write(dir, "dectime"),
        None => {
            print!("{}", art.table.render(&art.comments)?);
            Ok(Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out, mode, jobs } => simulate(config, out, *mode, *jobs),
        Command::Preset { name, out, jobs } => with_jobs(*jobs, || presets::run_preset(name, out)),
        Command::Dectime { gamma_min, gamma_max, points, omega, delta_x, mass_u, temp_k, out } => {
            dectime(*gamma_min, *gamma_max, *points, omega, *delta_x, *mass_u, *temp_k, out.as_deref())
        }
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
