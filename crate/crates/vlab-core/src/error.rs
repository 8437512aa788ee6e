use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Numerical operations fail loudly instead of
/// returning poisoned values.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("argument {z} is within guard radius {guard:e} of a Gamma pole (factor {factor})")]
    PoleProximity { z: Complex64, guard: f64, factor: usize },

    #[error("scaled value with binary exponent {exp2} does not fit in f64 range")]
    RangeOverflow { exp2: i64 },

    #[error("|t| = {t} is below the asymptotic threshold {threshold} for the Stirling estimate")]
    AsymptoticThreshold { t: f64, threshold: f64 },

    #[error("contour line Re s = {a} passes within {dist:e} of integrand pole at {pole}")]
    PoleOnLine { a: f64, pole: Complex64, dist: f64 },

    #[error("strip edge {edge} lies within guard radius of pole at {pole}")]
    PoleOnBoundary { edge: f64, pole: Complex64 },

    #[error("tail bound {bound:e} at t_max = {t_max} exceeds the requested tolerance {tol:e}")]
    TailBound { t_max: f64, bound: f64, tol: f64 },

    #[error("quadrature needs {needed} nodes, above the configured budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("nested kernel oracle supports r <= 3, got r = {r}")]
    DimensionLimit { r: usize },

    #[error("shifted line requires non-integer c < -1/2, got c = {c}")]
    IntegerC { c: f64 },

    #[error("circle quadrature did not converge after {doublings} doublings at pole {pole}")]
    NonConvergence { pole: Complex64, doublings: usize },

    #[error("decay condition violated: rho = {rho} must exceed (2a-delta)d' - 1 = {bound}")]
    DecayCondition { rho: f64, bound: f64 },

    #[error("Perron quadrature requires rho >= 1 for absolute decay, got rho = {rho}")]
    SlowDecay { rho: f64 },

    #[error("rho = {rho} violates the identity bound rho > {bound}")]
    RhoBound { rho: f64, bound: f64 },

    #[error("series truncation infeasible: needs {needed} terms, cap is {cap}")]
    TruncationInfeasible { needed: usize, cap: usize },

    #[error("Re s = {sigma} is outside the convergence strip of the reconstruction")]
    ConvergenceStrip { sigma: f64 },

    #[error("decay-bound calibration failed: kernel samples underflowed at x = {x}")]
    CalibrationFailure { x: f64 },

    #[error("asymptotic term table has no fitted coefficient for n = {n} (m_max = {m_max})")]
    FitUnavailable { n: usize, m_max: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid functional-equation data: {0}")]
    InvalidData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("phi values are not available for this series at s = {s}: {reason}")]
    PhiUnavailable { s: Complex64, reason: String },

    #[error("integer coefficient overflow while generating tau({n})")]
    CoefficientOverflow { n: usize },
}
