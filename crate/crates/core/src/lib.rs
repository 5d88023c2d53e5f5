//! Three-level open-system model of ion hopping through a channel
//! selectivity filter.
//!
//! The state is a 3×3 density matrix over the spin-1 basis `m = +1, 0, −1`
//! (indices 0, 1, 2). Evolution is Lindblad with Hamiltonian `ω₀ S_z + H₁`,
//! where `H₁` is a cyclic hopping term of strength `c`, and amplitude
//! damping through `S₋` at rate `γ`.
//!
//! - [`operators`]: spin operators, Hamiltonian, dissipator, Liouvillian
//! - [`dynamics`]: time integration, matrix-exponential propagation, steady state
//! - [`measures`]: populations, entropy, distillable coherence, purity
//! - [`correlations`]: g²(τ) by the quantum regression theorem
//! - [`decoherence`]: thermal decoherence-time estimates
//! - [`io`]: configuration files, figure presets, CSV and SVG output

pub mod correlations;
pub mod decoherence;
pub mod dynamics;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod random;

use thiserror::Error;

pub use correlations::{Anchor, CorrelationError, G2Curve};
pub use decoherence::DecoherenceError;
pub use dynamics::{DynamicsError, Evolution, Method, Mode, TimeGrid, TimeSeries};
pub use io::config::{parse_config, ConfigError, ExperimentConfig};
pub use io::IoError;
pub use measures::MeasureError;
pub use operators::{DensityMatrix, Generator, H1Variant, ModelParams};

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Decoherence(#[from] DecoherenceError),
    #[error(transparent)]
    Csv(#[from] io::csv::CsvError),
    #[error(transparent)]
    Svg(#[from] io::svg::SvgError),
    #[error(transparent)]
    Io(#[from] IoError),
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

fn dynamics_exit(e: &DynamicsError) -> i32 {
    match e {
        DynamicsError::InvalidGrid(_)
        | DynamicsError::StepTooLarge { .. }
        | DynamicsError::InvalidState(_)
        | DynamicsError::InvalidParams(_)
        | DynamicsError::NotApplicable(_) => EXIT_CONFIG,
        DynamicsError::StepSizeUnderflow { .. } | DynamicsError::DegenerateNullSpace { .. } => EXIT_NUMERIC,
    }
}

impl Error {
    /// Process exit status: 2 for bad input, 3 for numeric failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Decoherence(_) => EXIT_CONFIG,
            Error::Dynamics(e) | Error::Correlation(CorrelationError::Dynamics(e)) => dynamics_exit(e),
            Error::Correlation(_) | Error::Measure(_) => EXIT_NUMERIC,
            Error::Csv(io::csv::CsvError::Io(_)) | Error::Svg(io::svg::SvgError::Io(_)) | Error::Io(_) => EXIT_IO,
            Error::Csv(_) | Error::Svg(_) => EXIT_NUMERIC,
        }
    }
}
