use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} needs {required} states but the budget is {budget}")]
    Capacity {
        what: &'static str,
        required: u128,
        budget: usize,
    },

    #[error("{what} index {index} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("baryon number {b} out of range -{n}..={n}")]
    SectorOutOfRange { b: i32, n: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("four-velocity {index} is not unit timelike (v.v - 1 = {defect:e})")]
    InvalidVelocity { index: usize, defect: f64 },

    #[error("boson mode {mode} has kappa * v0 = {value}; the shift automorphism divides by it")]
    MasslessMode { mode: usize, value: f64 },

    #[error("energy {index} must be positive, got {value}")]
    NonPositiveEnergy { index: usize, value: f64 },

    #[error("operator is not hermitian (max |M - M^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("iteration did not converge: achieved residual {achieved:e}, tolerance {tolerance:e}")]
    NoConvergence { achieved: f64, tolerance: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
