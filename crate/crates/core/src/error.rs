use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("solver failure: {reason} (relative residual {residual:e})")]
    Solver { reason: String, residual: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("airy evaluation overflows at |z| = {modulus}, arg z = {arg} ({sector})")]
    AiryOverflow {
        modulus: f64,
        arg: f64,
        sector: &'static str,
    },

    #[error("layer profile does not decay before rho_max = {rho_max}; increase rho_max")]
    LayerDecay { rho_max: f64, envelope: f64 },

    #[error("matching system is degenerate: |denominator| = {denominator:e}")]
    Degenerate { denominator: f64 },

    #[error("contour integral tail did not converge (last |integrand| = {tail:e})")]
    Contour { tail: f64 },

    #[error("picard iteration diverged at iteration {iteration}")]
    Divergence { iteration: usize, history: Vec<f64> },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
