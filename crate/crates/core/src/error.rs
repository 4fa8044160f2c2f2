use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unimodular: det = {det}")]
    NotUnimodular { det: String },

    #[error("matrix is not hyperbolic: an eigenvalue lies on the unit circle (trace {trace}, det {det})")]
    NotHyperbolic { trace: String, det: i8 },

    #[error("cap exceeded: {what} = {count} exceeds cap {cap}")]
    CapExceeded { what: &'static str, count: String, cap: u64 },

    #[error("degenerate parallelogram: area is zero")]
    DegenerateParallelogram,

    #[error("matrix entry b is zero; closed-form area is undefined")]
    ZeroB,

    #[error("layer {n} is too coarse: r_n = {rate} is not below 1/4")]
    CoarseLayer { n: u32, rate: f64 },

    #[error("degenerate layer: total area is zero")]
    DegenerateLayer,

    #[error("slice is empty: no interval passes the length filter")]
    EmptySlice,

    #[error("self-energy diverges for s = {s} >= 1")]
    SelfEnergyDiverges { s: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error("outside supported envelope: {0} (use --force to override)")]
    EnvelopeExceeded(String),

    #[error("estimated runtime {seconds:.0} s exceeds the guardrail (use --force to override)")]
    RuntimeGuard { seconds: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code: 1 usage, 2 domain, 3 cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } | Error::RuntimeGuard { .. } | Error::EnvelopeExceeded(_) => 3,
            Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
