//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FbsqError {
    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("negative power |D|^{s} applied to a field with nonzero mean (|c0| = {zero_mode:.3e})")]
    NegativePowerOnNonzeroMean { s: f64, zero_mode: f64 },

    #[error("negative Sobolev index s = {s} on a field with nonzero mean")]
    NegativeIndexOnNonzeroMean { s: f64 },

    #[error("grid too coarse for a dyadic partition: only {shells} shells fit below the dealias cutoff (need >= {needed})")]
    GridTooCoarse { shells: usize, needed: usize },

    #[error("dyadic block index {j} outside the partition range [{j_min}, {j_max}]")]
    IndexOutOfRange { j: i32, j_min: i32, j_max: i32 },

    #[error("time series is empty")]
    EmptySeries,

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("velocity field is not divergence-free (residual {residual:.3e} > {tol:.0e})")]
    NotDivergenceFree { residual: f64, tol: f64 },

    #[error("CFL violation: dt = {dt:.3e} exceeds the stable step {limit:.3e}")]
    CFLViolation { dt: f64, limit: f64 },

    #[error("non-finite state at t = {t}: first bad coefficient in {component}")]
    NonFiniteState { t: f64, component: String },

    #[error("L^p maximum principle violated at t = {t}, p = {p}: {value:.12e} > {bound:.12e}")]
    MaxPrincipleViolation { t: f64, p: f64, value: f64, bound: f64 },

    #[error("decay-fit window [{t_a}, {t_b}] not resolvable: g(t_b) = {g:.3e} < {threshold:.3e}")]
    WindowUnresolvable { t_a: f64, t_b: f64, g: f64, threshold: f64 },

    #[error("gamma exponent precondition violated: need p > {bound:.6} (= 4/(3a-2)), got p = {p}")]
    GammaPrecondition { p: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("missing CSV column `{0}`")]
    MissingColumn(String),

    #[error("checkpoint format error: {0}")]
    CheckpointFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FbsqError>;
