use thiserror::Error;

/// Invalid input: bad quantum numbers, parameters or shapes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("projection 2m = {twice_m} is not valid in {manifold}")]
    InvalidProjection {
        manifold: &'static str,
        twice_m: i32,
    },
    #[error("no coupling L = {l}, S = {twice_s}/2 to J = {twice_j}/2")]
    InvalidCoupling { l: i32, twice_s: i32, twice_j: i32 },
    #[error("magnetic field must be finite and non-negative, got {0} mT")]
    NegativeField(f64),
    #[error("Fock truncation must be at least 1, got {0}")]
    InvalidTruncation(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not Hermitian (max |H - H†| = {0:e})")]
    NotHermitian(f64),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("visibility must lie in (0, 1], got {0}")]
    InvalidVisibility(f64),
    #[error("{0}")]
    Other(String),
}

/// Failure of a numerical procedure on otherwise valid input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericalError {
    #[error("steady state is not unique: constrained Liouvillian is singular ({0})")]
    SingularSteadyState(String),
    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("step size underflow at t = {t} us (h = {h:e}, error estimate {error:e})")]
    StepUnderflow { t: f64, h: f64, error: f64 },
    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),
    #[error(
        "quadrature did not converge: {nodes} vs {doubled} nodes differ by {relative_change:.3e}"
    )]
    QuadratureNotConverged {
        nodes: usize,
        doubled: usize,
        relative_change: f64,
    },
    #[error("least-squares fit is rank deficient")]
    RankDeficientFit,
    #[error("solve failed at detuning {detuning_mhz} MHz: {source}")]
    SweepPoint {
        detuning_mhz: f64,
        #[source]
        source: Box<Error>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerical(#[from] NumericalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
