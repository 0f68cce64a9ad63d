//! Pauli-string algebra.
//!
//! Operators are represented as sums of products of single-qubit Pauli
//! factors,
//!
//!   O = Σ_k  c_k · φ_k · σ_{α1}^{q1} σ_{α2}^{q2} ⋯
//!
//! with complex coefficients c_k and a quarter-turn phase φ ∈ {±1, ±i}
//! tracked per string. Qubits not listed in a string carry the identity.
//! Multiplication closes on this form, which is what makes the
//! fermion-to-spin mapping and the gate generators exactly representable.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::tol::TOL_COEFF_PRUNE;

/// Single-qubit Pauli axis. Identity factors are never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "X"),
            Axis::Y => write!(f, "Y"),
            Axis::Z => write!(f, "Z"),
        }
    }
}

/// Phase restricted to the quarter turns {1, i, -1, -i}, stored as the
/// exponent of i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuarterPhase(u8);

impl QuarterPhase {
    pub const ONE: Self = QuarterPhase(0);
    pub const I: Self = QuarterPhase(1);
    pub const MINUS_ONE: Self = QuarterPhase(2);
    pub const MINUS_I: Self = QuarterPhase(3);

    pub fn mul(self, other: Self) -> Self {
        QuarterPhase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> Self {
        QuarterPhase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// Product of two single-qubit Paulis: returns (phase, remaining axis).
/// `None` for the axis means the product is the identity.
fn axis_product(a: Axis, b: Axis) -> (QuarterPhase, Option<Axis>) {
    use Axis::*;
    if a == b {
        return (QuarterPhase::ONE, None);
    }
    match (a, b) {
        (X, Y) => (QuarterPhase::I, Some(Z)),
        (Y, Z) => (QuarterPhase::I, Some(X)),
        (Z, X) => (QuarterPhase::I, Some(Y)),
        (Y, X) => (QuarterPhase::MINUS_I, Some(Z)),
        (Z, Y) => (QuarterPhase::MINUS_I, Some(X)),
        (X, Z) => (QuarterPhase::MINUS_I, Some(Y)),
        _ => unreachable!(),
    }
}

/// A tensor product of Pauli factors on distinct qubits, with a
/// quarter-turn phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    factors: BTreeMap<usize, Axis>,
    phase: QuarterPhase,
}

impl PauliString {
    /// The identity string (no factors, phase +1).
    pub fn identity() -> Self {
        PauliString {
            factors: BTreeMap::new(),
            phase: QuarterPhase::ONE,
        }
    }

    /// A single Pauli factor on one qubit.
    pub fn single(qubit: usize, axis: Axis) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(qubit, axis);
        PauliString {
            factors,
            phase: QuarterPhase::ONE,
        }
    }

    /// Build from (qubit, axis) pairs. Later entries for the same qubit are
    /// multiplied in, so the result is always canonical.
    pub fn from_factors<I: IntoIterator<Item = (usize, Axis)>>(iter: I) -> Self {
        let mut s = PauliString::identity();
        for (q, a) in iter {
            s = s.mul(&PauliString::single(q, a));
        }
        s
    }

    pub fn factors(&self) -> &BTreeMap<usize, Axis> {
        &self.factors
    }

    pub fn phase(&self) -> QuarterPhase {
        self.phase
    }

    pub fn with_phase(mut self, phase: QuarterPhase) -> Self {
        self.phase = phase;
        self
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest qubit index referenced, or `None` for the identity.
    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    /// Product of two strings; closes on canonical strings with phase in
    /// {±1, ±i}.
    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        let mut phase = self.phase.mul(other.phase);
        for (&q, &b) in &other.factors {
            match factors.remove(&q) {
                None => {
                    factors.insert(q, b);
                }
                Some(a) => {
                    let (ph, rest) = axis_product(a, b);
                    phase = phase.mul(ph);
                    if let Some(ax) = rest {
                        factors.insert(q, ax);
                    }
                }
            }
        }
        PauliString { factors, phase }
    }

    /// Hermitian adjoint: the factors are self-adjoint, only the phase
    /// conjugates.
    pub fn adjoint(&self) -> Self {
        PauliString {
            factors: self.factors.clone(),
            phase: self.phase.conj(),
        }
    }

    /// Split into (complex phase, phase-free string). Used when folding
    /// string phases into sum coefficients.
    pub fn take_phase(&self) -> (Complex64, PauliString) {
        (
            self.phase.to_complex(),
            PauliString {
                factors: self.factors.clone(),
                phase: QuarterPhase::ONE,
            },
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            QuarterPhase::ONE => {}
            QuarterPhase::I => write!(f, "i·")?,
            QuarterPhase::MINUS_ONE => write!(f, "-")?,
            _ => write!(f, "-i·")?,
        }
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (q, a) in &self.factors {
            write!(f, "{a}{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: operator on {op} qubits, state on {state}")]
    DimensionMismatch { op: usize, state: usize },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
}

/// A linear combination of Pauli strings. Terms are kept canonical: string
/// phases are folded into the coefficients and no two terms share the same
/// factor map.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        PauliSum::from_term(Complex64::new(1.0, 0.0), PauliString::identity())
    }

    pub fn from_term(coeff: Complex64, string: PauliString) -> Self {
        let mut s = PauliSum::zero();
        s.add_term(coeff, string);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Complex64, PauliString)>>(iter: I) -> Self {
        let mut s = PauliSum::zero();
        for (c, p) in iter {
            s.add_term(c, p);
        }
        s
    }

    /// σ₊ = (X + iY)/2 on one qubit.
    pub fn sigma_plus(qubit: usize) -> Self {
        PauliSum::from_terms([
            (Complex64::new(0.5, 0.0), PauliString::single(qubit, Axis::X)),
            (Complex64::new(0.0, 0.5), PauliString::single(qubit, Axis::Y)),
        ])
    }

    /// σ₋ = (X - iY)/2 on one qubit.
    pub fn sigma_minus(qubit: usize) -> Self {
        PauliSum::from_terms([
            (Complex64::new(0.5, 0.0), PauliString::single(qubit, Axis::X)),
            (Complex64::new(0.0, -0.5), PauliString::single(qubit, Axis::Y)),
        ])
    }

    /// Add one term, folding the string phase into the coefficient and
    /// merging with an existing term on the same string.
    pub fn add_term(&mut self, coeff: Complex64, string: PauliString) {
        let (phase, bare) = string.take_phase();
        let c = coeff * phase;
        if let Some(entry) = self
            .terms
            .iter_mut()
            .find(|(_, s)| s.factors == bare.factors)
        {
            entry.0 += c;
        } else {
            self.terms.push((c, bare));
        }
        self.terms.retain(|(c, _)| c.norm() > TOL_COEFF_PRUNE);
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string (zero if absent). This is the
    /// trace of the operator divided by 2^N.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, s)| s.is_identity())
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    /// Largest qubit index referenced by any term.
    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(_, s)| s.max_qubit()).max()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        PauliSum::from_terms(self.terms.iter().map(|(c, s)| (c * factor, s.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, s) in &other.terms {
            out.add_term(*c, s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = PauliSum::zero();
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                out.add_term(ca * cb, sa.mul(sb));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        PauliSum::from_terms(self.terms.iter().map(|(c, s)| (c.conj(), s.adjoint())))
    }

    /// True when the operator equals its adjoint within `tol` on every
    /// coefficient.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint())
            .terms
            .iter()
            .all(|(c, _)| c.norm() < tol)
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Anticommutator {self, other}.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, s)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)·{}", c.re, c.im, s)?;
        }
        Ok(())
    }
}
