//! Numerical tolerances shared by every module.

/// Entry-wise Hermiticity tolerance (max modulus of `M - M†`).
pub const HERMITIAN: f64 = 1e-12;

/// Symmetry tolerance for real 3x3 input to the eigensolver.
pub const SYMMETRIC: f64 = 1e-12;

/// Unit-norm tolerance for measurement directions.
pub const UNIT_NORM: f64 = 1e-12;

/// Allowed excess of |r| over one.
pub const FACTOR_MODULUS: f64 = 1e-12;

/// Trace-one tolerance for density matrices.
pub const TRACE: f64 = 1e-12;

/// Smallest eigenvalue accepted when validating a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

/// Largest imaginary part tolerated when a real expectation is expected.
pub const IMAG_RESIDUAL: f64 = 1e-12;

/// Normalization tolerance for single-particle amplitudes.
pub const AMPLITUDE_NORM: f64 = 1e-12;

/// Orthogonality tolerance for the analytic maximizing family.
pub const ORTHOGONAL: f64 = 1e-10;

/// Weight-pair sum tolerance in a spin-bath description.
pub const BATH_WEIGHT: f64 = 1e-12;

/// Discriminant threshold below which the closed-form 3x3 eigensolver
/// hands over to Jacobi rotations.
pub const EIGEN_DEGENERATE: f64 = 1e-14;

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
