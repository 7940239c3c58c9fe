use thiserror::Error;

/// Errors produced by the simulation, optimization, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter was non-finite or outside its allowed range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A time argument fell outside the pulse window.
    #[error("time {t:.6e} outside pulse window [{lo:.6e}, {hi:.6e}]")]
    OutOfWindow { t: f64, lo: f64, hi: f64 },

    /// The instantaneous Hamiltonian has a degenerate spectrum (Omega = Delta = 0),
    /// so eigenvectors and the mixing angle are undefined.
    #[error("degenerate spectrum: Omega = Delta = 0 at t = {t:.6e}")]
    DegenerateSpectrum { t: f64 },

    /// An operation that only supports two-level systems received something else.
    #[error("unsupported dimension {dim} for {op}")]
    UnsupportedDimension { dim: usize, op: &'static str },

    /// Matrix dimensions do not agree.
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    /// IQ synthesis would alias: the intermediate frequency exceeds Nyquist.
    #[error(
        "aliasing at t = {t:.6e}: |omega_d - omega_lo| = {frequency:.6e} rad/s exceeds the \
         Nyquist angular frequency {nyquist:.6e}"
    )]
    Aliasing { t: f64, frequency: f64, nyquist: f64 },

    /// Step-doubling check failed; the time grid is too coarse.
    #[error(
        "propagation not converged: doubling {steps} steps changed the result by {delta:.3e} \
         (tolerance {tol:.1e}); increase the step count"
    )]
    NotConverged { steps: usize, delta: f64, tol: f64 },

    /// Interpolation was queried outside the anchor range.
    #[error("extrapolation: query {query:.6} outside anchor range [{lo:.6}, {hi:.6}]")]
    Extrapolation { query: f64, lo: f64, hi: f64 },

    /// A numerical procedure failed (singular system, failed fit, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// One or more configuration errors; every violation is listed.
    #[error("configuration errors:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// numerical/propagation failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) => 2,
            Error::Io(_) | Error::Serialization(_) => 1,
            _ => 3,
        }
    }
}
