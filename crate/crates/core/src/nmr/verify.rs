//! Pulse-level verification: evolve the full spin register under the
//! internal Hamiltonian during delays and under the RF terms during
//! pulses, then compare against the ideal circuit output.
//!
//! Internal Hamiltonian between pulses (offsets ν̃ and couplings J in Hz):
//!
//!   H = Σ_j 2πν̃_j σ_z^j/2 + Σ_{j<k} 2πJ_jk σ_z^jσ_z^k/4
//!
//! Spins are tracked in their own rotating frames, so the offsets default
//! to zero. Pulses are instantaneous by default; the finite-duration
//! option integrates the pulse term together with the internal
//! Hamiltonian.

use num_complex::Complex64;
use thiserror::Error;

use crate::dense::{bit_of, exp_hermitian, DenseOperator, StateVector};
use crate::nmr::molecule::Molecule;
use crate::nmr::sequence::{PulseEvent, PulseSequence};
use crate::pauli::OperatorError;

/// Largest register the dense verifier accepts.
pub const MAX_VERIFY_SPINS: usize = 7;

/// Pulse-sequence budget from the experimental protocol: at most ~1000
/// single-qubit rotations and ~100 Ising blocks fit into the coherence
/// window.
pub const SINGLE_QUBIT_GATE_BUDGET: usize = 1000;
pub const ISING_GATE_BUDGET: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("register of {0} spins exceeds the dense verifier limit of {MAX_VERIFY_SPINS}")]
    TooManySpins(usize),
    #[error("sequence has {seq} spins, molecule has {molecule}")]
    SpinCountMismatch { seq: usize, molecule: usize },
    #[error("initial state has {state} qubits, register has {register}")]
    StateSizeMismatch { state: usize, register: usize },
    #[error("offsets vector has {got} entries, register has {want}")]
    BadOffsets { got: usize, want: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSimOptions {
    /// Treat RF pulses as delta pulses (couplings frozen while pulsing).
    pub instantaneous_pulses: bool,
    /// Rotating-frame offsets ν̃ per spin, Hz. `None` means on resonance
    /// in every spin's own frame.
    pub frame_offsets_hz: Option<Vec<f64>>,
}

impl Default for PulseSimOptions {
    fn default() -> Self {
        PulseSimOptions {
            instantaneous_pulses: true,
            frame_offsets_hz: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub final_state: StateVector,
    pub fidelity: f64,
}

/// Diagonal phase rates (rad/s) of the internal Hamiltonian per basis
/// state.
fn internal_rates(m: &Molecule, offsets: &[f64]) -> Vec<f64> {
    let n = m.n_spins();
    let dim = 1usize << n;
    let mut rates = vec![0.0; dim];
    let tau = 2.0 * std::f64::consts::PI;
    for (idx, rate) in rates.iter_mut().enumerate() {
        let z = |s: usize| if bit_of(idx, s, n) == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for j in 0..n {
            e += tau * offsets[j] * z(j) / 2.0;
            for k in (j + 1)..n {
                e += tau * m.j(j, k) * z(j) * z(k) / 4.0;
            }
        }
        *rate = e;
    }
    rates
}

fn apply_diagonal_phases(state: &mut StateVector, rates: &[f64], duration: f64) {
    for (amp, rate) in state.amplitudes_mut().iter_mut().zip(rates) {
        *amp *= Complex64::from_polar(1.0, -rate * duration);
    }
}

/// Rotation by `angle` about the axis at `phase` in the x-y plane, applied
/// to one spin.
fn apply_xy_rotation(state: &mut StateVector, spin: usize, phase: f64, angle: f64) {
    let n = state.n_qubits();
    let mask = 1usize << (n - 1 - spin);
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let e_minus = Complex64::from_polar(1.0, -phase);
    let e_plus = Complex64::from_polar(1.0, phase);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = Complex64::new(c, 0.0) * a0 - Complex64::new(0.0, s) * e_minus * a1;
            amps[j] = Complex64::new(c, 0.0) * a1 - Complex64::new(0.0, s) * e_plus * a0;
        }
    }
}

/// Finite-duration pulse: integrate internal + RF Hamiltonian exactly via
/// the dense exponential.
fn apply_finite_pulse(
    state: &StateVector,
    m: &Molecule,
    rates: &[f64],
    spin: usize,
    phase: f64,
    amplitude: f64,
    duration: f64,
) -> Result<StateVector, VerifyError> {
    let n = m.n_spins();
    let dim = 1usize << n;
    let mut h = DenseOperator::zeros(n);
    for (idx, &rate) in rates.iter().enumerate() {
        h.add_at(idx, idx, Complex64::new(rate, 0.0));
    }
    // A(cos φ σ_x + sin φ σ_y) on `spin`
    let mask = 1usize << (n - 1 - spin);
    for i in 0..dim {
        if i & mask == 0 {
            let j = i | mask;
            h.add_at(i, j, Complex64::from_polar(amplitude, -phase));
            h.add_at(j, i, Complex64::from_polar(amplitude, phase));
        }
    }
    let u = exp_hermitian(&h, duration)?;
    Ok(u.apply(state)?)
}

/// Evolve `init` under the sequence. The pending virtual frame is applied
/// at the end, so the result is directly comparable to the ideal circuit
/// output.
pub fn evolve_sequence(
    seq: &PulseSequence,
    m: &Molecule,
    init: &StateVector,
    opts: &PulseSimOptions,
) -> Result<StateVector, VerifyError> {
    let n = m.n_spins();
    if n > MAX_VERIFY_SPINS {
        return Err(VerifyError::TooManySpins(n));
    }
    if seq.n_spins() != n {
        return Err(VerifyError::SpinCountMismatch {
            seq: seq.n_spins(),
            molecule: n,
        });
    }
    if init.n_qubits() != n {
        return Err(VerifyError::StateSizeMismatch {
            state: init.n_qubits(),
            register: n,
        });
    }
    let offsets = match &opts.frame_offsets_hz {
        None => vec![0.0; n],
        Some(v) => {
            if v.len() != n {
                return Err(VerifyError::BadOffsets {
                    got: v.len(),
                    want: n,
                });
            }
            v.clone()
        }
    };
    let rates = internal_rates(m, &offsets);
    let mut state = init.clone();
    for event in seq.events() {
        match event {
            PulseEvent::Delay { duration } => {
                apply_diagonal_phases(&mut state, &rates, *duration)
            }
            PulseEvent::Pulse {
                spin,
                phase,
                amplitude,
                duration,
            } => {
                if opts.instantaneous_pulses {
                    apply_xy_rotation(&mut state, *spin, *phase, 2.0 * amplitude * duration);
                } else {
                    state = apply_finite_pulse(
                        &state, m, &rates, *spin, *phase, *amplitude, *duration,
                    )?;
                }
            }
            PulseEvent::VirtualZ { .. } => {}
        }
    }
    // realize the pending reference frames as z rotations
    for (spin, gamma) in seq.frame().iter().enumerate() {
        if *gamma == 0.0 {
            continue;
        }
        let mask = 1usize << (n - 1 - spin);
        for (idx, amp) in state.amplitudes_mut().iter_mut().enumerate() {
            let half = if idx & mask == 0 { -gamma / 2.0 } else { gamma / 2.0 };
            *amp *= Complex64::from_polar(1.0, half);
        }
    }
    Ok(state)
}

/// Evolve and compare against the ideal target state.
pub fn verify(
    seq: &PulseSequence,
    m: &Molecule,
    init: &StateVector,
    ideal: &StateVector,
    opts: &PulseSimOptions,
) -> Result<VerifyOutcome, VerifyError> {
    let final_state = evolve_sequence(seq, m, init, opts)?;
    let fidelity = ideal.overlap_fidelity(&final_state);
    Ok(VerifyOutcome {
        final_state,
        fidelity,
    })
}

/// Ancilla-coherence attenuation factor of the optional dephasing hook:
/// exp(-T/T₂*) over the sequence duration.
pub fn coherence_attenuation(seq: &PulseSequence, m: &Molecule, spin: usize) -> f64 {
    (-seq.total_duration() / m.spin(spin).t2_star_s).exp()
}

/// Duration and gate-count report against the protocol budget. Warnings
/// only; nothing here fails hard.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub pulse_count: usize,
    pub ising_blocks: usize,
    pub total_duration: f64,
    pub min_t2: f64,
    pub warnings: Vec<String>,
}

impl BudgetReport {
    pub fn passes(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn budget_check(seq: &PulseSequence, m: &Molecule) -> BudgetReport {
    let pulse_count = seq.pulse_count();
    let ising_blocks = seq.ising_block_count();
    let total_duration = seq.total_duration();
    let min_t2 = m.min_t2();
    let mut warnings = Vec::new();
    if pulse_count > SINGLE_QUBIT_GATE_BUDGET {
        warnings.push(format!(
            "{pulse_count} pulses exceed the budget of {SINGLE_QUBIT_GATE_BUDGET}"
        ));
    }
    if ising_blocks > ISING_GATE_BUDGET {
        warnings.push(format!(
            "{ising_blocks} Ising blocks exceed the budget of {ISING_GATE_BUDGET}"
        ));
    }
    if total_duration > min_t2 {
        warnings.push(format!(
            "duration {total_duration:.4} s exceeds the shortest T2* of {min_t2:.4} s"
        ));
    }
    BudgetReport {
        pulse_count,
        ising_blocks,
        total_duration,
        min_t2,
        warnings,
    }
}
