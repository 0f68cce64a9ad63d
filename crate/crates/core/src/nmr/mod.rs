//! Pulse-level backend: molecule descriptions, timed pulse sequences, the
//! circuit-to-sequence compiler with refocusing and phase tracking, the
//! delay optimizer, and the dense pulse-level verifier.

pub mod compile;
pub mod molecule;
pub mod sequence;
pub mod verify;

pub use compile::{
    compile, coupling_objective, embed_circuit, map_circuit_spins, optimize_delays,
    CompileError, CompileOptions, OptimizationReport, Refocusing,
};
pub use molecule::{Molecule, MoleculeError, Spin, SpinRole};
pub use sequence::{IsingBlock, PulseEvent, PulseSequence, SequenceError};
pub use verify::{
    budget_check, coherence_attenuation, evolve_sequence, verify, BudgetReport, PulseSimOptions,
    VerifyError, VerifyOutcome, ISING_GATE_BUDGET, MAX_VERIFY_SPINS, SINGLE_QUBIT_GATE_BUDGET,
};
