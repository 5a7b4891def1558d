use thiserror::Error;

/// Errors raised by construction, evolution and trajectory operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("massless zero mode: spinor solutions degenerate at m=0, k=0")]
    MasslessZeroMode,

    #[error("mode not present in basis: {0}")]
    UnknownMode(String),

    #[error("current has imaginary residue {residue:.3e} above tolerance {tol:.3e}")]
    NonRealCurrent { residue: f64, tol: f64 },

    #[error("guidance density j0={j0:.3e} at or below node threshold {eps:.3e}")]
    NodeRegion { j0: f64, eps: f64 },

    #[error("step size underflow at t={t}")]
    StepUnderflow { t: f64 },

    #[error("field trajectory left the configuration grid at t={t}")]
    GridExit { t: f64 },

    #[error("Fock basis dimension {dim} exceeds guard {guard}")]
    DimensionGuard { dim: usize, guard: usize },

    #[error("Hamiltonian spec is not hermitian: {0}")]
    NonHermitian(String),

    #[error("sector (n_P={n_p}, n_A={n_a}) not supported: {reason}")]
    UnsupportedSector { n_p: usize, n_a: usize, reason: String },

    #[error("grid range lambda={lambda} below {required} oscillator lengths")]
    GridRangeTooSmall { lambda: f64, required: f64 },

    #[error("source quadrature |integral J| = {value:.3e} exceeds solvability tolerance {tol:.3e}")]
    SourceNotSolvable { value: f64, tol: f64 },

    #[error("all sector amplitudes underflow at the requested point")]
    IndeterminateEffectivity,

    #[error("scenario invalid:\n{}", .0.join("\n"))]
    InvalidScenario(Vec<String>),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
