use thiserror::Error;

/// Everything that can go wrong in the analysis and stepping code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispersionError {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("permittivity pole at w_hat = {w_hat} (lossless resonance)")]
    PoleAtResonance { w_hat: f64 },
    #[error("negative frequency {0} is not supported")]
    NegativeFrequency(f64),
    #[error("tan pole at W = {0}")]
    TanPole(f64),
    #[error("exact wavenumber vanishes; relative error undefined")]
    ZeroExactWavenumber,
    #[error("stencil order M = {0} outside 1..=16")]
    OrderTooLarge(usize),
    #[error("polynomial degree p = {0} outside 0..=8")]
    DegreeTooLarge(usize),
    #[error("root solve failed: {0}")]
    RootSolveFailed(String),
    #[error("expected {expected} modes, found {found}")]
    ModeCountMismatch { expected: usize, found: usize },
    #[error("Laurent extraction ill-conditioned (condition {0:e})")]
    IllConditionedExtraction(f64),
    #[error("CFL number {0} outside (0, 1]")]
    InvalidCfl(f64),
    #[error("CFL number {nu} exceeds stability limit {limit}")]
    CflViolation { nu: f64, limit: f64 },
    #[error("frequency must be positive")]
    ZeroFrequency,
    #[error("exact phase velocity is degenerate")]
    DegenerateExact,
    #[error("refraction index degenerate for energy velocity")]
    DegeneratePsi,
    #[error("eigenvalue solve failed")]
    EigenFailed,
    #[error("ambiguous branch pairing between exact and discrete roots")]
    BranchMismatch,
    #[error("CFL bisection failed: {0}")]
    BisectionFailed(String),
    #[error("implicit system is singular")]
    SingularImplicitSystem,
    #[error("phase fit failed: {0}")]
    FitFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DispersionError>;
