use thiserror::Error;

/// Errors raised by the numerical routines and the batch front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("decoherence factor {re}{im:+}i has modulus {modulus} > 1")]
    UnphysicalFactor { re: f64, im: f64, modulus: f64 },

    #[error("amplitudes are not normalized: |a|^2 + |b|^2 = {0}")]
    NotNormalized(f64),

    #[error("vector {name} is not a unit vector (norm {norm})")]
    NotUnit { name: &'static str, norm: f64 },

    #[error("vectors are not orthogonal (dot product {0:e})")]
    NotOrthogonal(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("time grid must be ascending and nonnegative (index {0})")]
    BadTimeGrid(usize),

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("cannot parse complex number {0:?}")]
    ParseComplex(String),
}

pub type Result<T> = std::result::Result<T, Error>;
