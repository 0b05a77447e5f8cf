use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("grid needs an even number of points >= 8, got {0}")]
    InvalidPointCount(usize),
    #[error("domain length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("dimension mismatch: grid has {expected} points, input has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("derivative order {order} exceeds N/4 = {limit}")]
    DerivativeOrder { order: u32, limit: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dispersion symbol needs degree >= 2 with a nonzero leading coefficient")]
    InvalidDegree,
    #[error("dispersion symbol may not contain terms of order {0} (only orders >= 2)")]
    LowOrderTerm(usize),
    #[error("coefficient of order {order} is not finite: {value}")]
    NonFiniteCoefficient { order: usize, value: f64 },
    #[error(
        "unknown equation preset `{0}` (expected viscous-burgers, kdv, benney-lin or kawahara)"
    )]
    UnknownPreset(String),
    #[error("benney-lin requires beta >= 0, got {0}")]
    InvalidBeta(f64),
    #[error("sobolev indices need r >= 1 and ell >= 2, got r = {r}, ell = {ell}")]
    InvalidIndices { r: u32, ell: u32 },
    #[error(
        "dissipativity violated: Re P(ik) = {max_real_part:e} > 0 at mode {worst_mode} \
         (violating modes: {modes:?})"
    )]
    Dissipativity {
        worst_mode: i64,
        max_real_part: f64,
        modes: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("negative flow time {0}")]
    NegativeTime(f64),
    #[error(
        "linear flow would amplify mode {mode}: t * Re P(ik) = {exponent:e} \
         (symbol fails dissipativity; allow growth explicitly to proceed)"
    )]
    Amplification { mode: i64, exponent: f64 },
    #[error(
        "burgers step too large: t = {t} exceeds {safety_fraction} x shock_time = {shock_time}"
    )]
    StepTooLarge {
        t: f64,
        shock_time: f64,
        safety_fraction: f64,
    },
    #[error("characteristic fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("burgers solution blew up (non-finite values) at substep {substep}")]
    BlowUp { substep: usize },
    #[error("field is not band-limited to |m| <= {limit} (found mode {found})")]
    NotBandLimited { limit: i64, found: i64 },
    #[error("invalid burgers options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("step {step}: {source} (shock_time = {shock_time}, H^q norm = {hq_norm})")]
    Guard {
        step: usize,
        shock_time: f64,
        hq_norm: f64,
        source: FlowError,
    },
    #[error("step {step}: non-finite values in the solution")]
    NonFinite { step: usize },
    #[error("invalid step plan: {0}")]
    InvalidPlan(String),
    #[error(
        "reference solution failed self-convergence: halving ref_dt changed H^{norm_index} by {delta:e} > {tolerance:e}"
    )]
    ReferenceInvalid {
        norm_index: u32,
        delta: f64,
        tolerance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("order fit needs at least 3 admissible points, got {0}")]
    InsufficientPoints(usize),
    #[error("invalid study: {0}")]
    InvalidStudy(String),
}
