//! Centralized numerical tolerances.
//!
//! Every comparison threshold used by the library and its test suites is
//! named here so that tests reference tolerances by role rather than by
//! magic number.

/// Exact-arithmetic comparisons: Pauli algebra, state norms, expectation
/// values of Hermitian observables.
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Unitarity of operators assembled from several exact factors.
pub const TOL_UNITARITY: f64 = 1e-11;

/// Gate-decomposition equivalence checks (circuit vs. matrix exponential).
pub const TOL_DECOMPOSITION: f64 = 1e-10;

/// Hermiticity guard on inputs to the matrix exponential.
pub const TOL_HERMITICITY: f64 = 1e-10;

/// Simulated network output vs. the exact-diagonalization oracles.
pub const TOL_NETWORK: f64 = 1e-9;

/// Pulse-level verification of a fully refocused compiled sequence,
/// as infidelity (1 - F).
pub const TOL_COMPILED_INFIDELITY: f64 = 1e-8;

/// Coefficients below this magnitude are dropped when simplifying
/// operator sums.
pub const TOL_COEFF_PRUNE: f64 = 1e-14;
