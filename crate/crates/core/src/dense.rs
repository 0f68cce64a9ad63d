//! Dense operators and state vectors.
//!
//! Register convention, fixed artifact-wide: qubit 0 is the most
//! significant bit of the basis index, so |q0 q1 ⋯⟩ reads left to right.
//! Everything here is small (N ≤ 7 qubits throughout), so dense storage
//! and eigendecomposition are the honest brute-force substrate that the
//! circuit decompositions are checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{Axis, OperatorError, PauliString, PauliSum};
use crate::tol::{TOL_ALGEBRAIC, TOL_HERMITICITY};

/// Bit value of `qubit` inside basis index `idx` of an `n`-qubit register.
#[inline]
pub fn bit_of(idx: usize, qubit: usize, n_qubits: usize) -> usize {
    (idx >> (n_qubits - 1 - qubit)) & 1
}

/// A 2^N x 2^N complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<Complex64>,
    n_qubits: usize,
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        DenseOperator {
            mat: DMatrix::zeros(dim, dim),
            n_qubits,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        DenseOperator {
            mat: DMatrix::identity(dim, dim),
            n_qubits,
        }
    }

    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self, OperatorError> {
        let dim = mat.nrows();
        if !dim.is_power_of_two() || mat.ncols() != dim {
            return Err(OperatorError::NotPowerOfTwo { len: dim });
        }
        Ok(DenseOperator {
            mat,
            n_qubits: dim.trailing_zeros() as usize,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn add_at(&mut self, row: usize, col: usize, value: Complex64) {
        self.mat[(row, col)] += value;
    }

    pub fn mul(&self, other: &Self) -> Self {
        DenseOperator {
            mat: &self.mat * &other.mat,
            n_qubits: self.n_qubits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        DenseOperator {
            mat: &self.mat + &other.mat,
            n_qubits: self.n_qubits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        DenseOperator {
            mat: &self.mat - &other.mat,
            n_qubits: self.n_qubits,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        DenseOperator {
            mat: self.mat.scale(1.0).map(|x| x * factor),
            n_qubits: self.n_qubits,
        }
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            mat: self.mat.adjoint(),
            n_qubits: self.n_qubits,
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// ‖self − self†‖.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).norm()
    }

    /// ‖U†U − I‖ below `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .mul(self)
            .sub(&DenseOperator::identity(self.n_qubits))
            .norm()
            < tol
    }

    /// min over global phases φ of ‖self − e^{iφ}·other‖.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let tr = (other.mat.adjoint() * &self.mat).trace();
        if tr.norm() < TOL_ALGEBRAIC {
            return self.sub(other).norm();
        }
        let phase = tr / tr.norm();
        self.sub(&other.scale(phase)).norm()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector, OperatorError> {
        if state.n_qubits() != self.n_qubits {
            return Err(OperatorError::DimensionMismatch {
                op: self.n_qubits,
                state: state.n_qubits(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        let out = &self.mat * v;
        Ok(StateVector::from_amplitudes_unchecked(
            out.as_slice().to_vec(),
        ))
    }
}

/// Exact Kronecker expansion of a Pauli sum into a dense matrix.
pub fn to_dense(op: &PauliSum, n_qubits: usize) -> Result<DenseOperator, OperatorError> {
    if let Some(q) = op.max_qubit() {
        if q >= n_qubits {
            return Err(OperatorError::QubitOutOfRange { qubit: q, n_qubits });
        }
    }
    let dim = 1usize << n_qubits;
    let mut out = DenseOperator::zeros(n_qubits);
    for (coeff, string) in op.terms() {
        // Each string is a signed permutation: column j maps to a single
        // row with a phase, so the expansion is O(2^N) per term.
        for col in 0..dim {
            let mut row = col;
            let mut amp = *coeff * string.phase().to_complex();
            for (&q, &axis) in string.factors() {
                let mask = 1usize << (n_qubits - 1 - q);
                let bit = (col & mask) != 0;
                match axis {
                    Axis::X => row ^= mask,
                    Axis::Y => {
                        row ^= mask;
                        // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = -i|0⟩
                        amp *= if bit {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                    Axis::Z => {
                        if bit {
                            amp = -amp;
                        }
                    }
                }
            }
            out.add_at(row, col, amp);
        }
    }
    Ok(out)
}

/// exp(-i·scale·H) for Hermitian H, via eigendecomposition. This is the
/// brute-force oracle every circuit decomposition is checked against.
pub fn exp_hermitian(op: &DenseOperator, scale: f64) -> Result<DenseOperator, OperatorError> {
    let dev = op.hermiticity_deviation();
    if dev >= TOL_HERMITICITY {
        return Err(OperatorError::NotHermitian { deviation: dev });
    }
    let eig = op.mat.clone().symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|ev| Complex64::from_polar(1.0, -scale * ev));
    let mat = &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
    Ok(DenseOperator {
        mat,
        n_qubits: op.n_qubits,
    })
}

/// A normalized pure state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_qubits: usize,
}

impl StateVector {
    /// Computational basis state |index⟩.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { amps, n_qubits }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, OperatorError> {
        if !amps.len().is_power_of_two() {
            return Err(OperatorError::NotPowerOfTwo { len: amps.len() });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() >= TOL_ALGEBRAIC {
            return Err(OperatorError::NotNormalized { norm });
        }
        Ok(StateVector::from_amplitudes_unchecked(amps))
    }

    pub(crate) fn from_amplitudes_unchecked(amps: Vec<Complex64>) -> Self {
        let n_qubits = amps.len().trailing_zeros() as usize;
        StateVector { amps, n_qubits }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn overlap_fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Apply one Pauli string (a signed permutation) to the state.
    pub fn apply_pauli_string(&self, string: &PauliString) -> Result<Self, OperatorError> {
        if let Some(q) = string.max_qubit() {
            if q >= self.n_qubits {
                return Err(OperatorError::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let mut out = vec![Complex64::default(); self.amps.len()];
        let phase = string.phase().to_complex();
        for (col, &a) in self.amps.iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            let mut row = col;
            let mut amp = a * phase;
            for (&q, &axis) in string.factors() {
                let mask = 1usize << (self.n_qubits - 1 - q);
                let bit = (col & mask) != 0;
                match axis {
                    Axis::X => row ^= mask,
                    Axis::Y => {
                        row ^= mask;
                        amp *= if bit {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                    Axis::Z => {
                        if bit {
                            amp = -amp;
                        }
                    }
                }
            }
            out[row] += amp;
        }
        Ok(StateVector::from_amplitudes_unchecked(out))
    }
}

/// ⟨ψ|obs|ψ⟩. Real within `TOL_ALGEBRAIC` when `obs` is Hermitian.
pub fn expectation(state: &StateVector, obs: &PauliSum) -> Result<Complex64, OperatorError> {
    if let Some(q) = obs.max_qubit() {
        if q >= state.n_qubits() {
            return Err(OperatorError::DimensionMismatch {
                op: q + 1,
                state: state.n_qubits(),
            });
        }
    }
    let mut total = Complex64::default();
    for (coeff, string) in obs.terms() {
        let applied = state.apply_pauli_string(string)?;
        total += coeff * state.inner(&applied);
    }
    Ok(total)
}
