//! Software reproduction of a liquid-state NMR quantum simulation of the
//! fermionic Fano-Anderson model.
//!
//! The toolkit covers the whole chain: Pauli-string operator algebra, the
//! Jordan-Wigner fermion-to-spin mapping, the model Hamiltonian and its
//! exact two-qubit reduction, ancilla measurement networks for the
//! dynamical correlation G(t) and the spectral signal S(t), compilation of
//! those networks to timed NMR pulse sequences with refocusing and phase
//! tracking, a dense pulse-level verifier, and DFT-based eigenvalue
//! extraction with propagated error bars.
//!
//! Everything is small by construction (at most seven spins), so dense
//! linear algebra is used throughout and doubles as the brute-force oracle
//! for every circuit decomposition.
//!
//! Grid-parallel experiment drivers run on rayon when the `parallel`
//! feature (default) is enabled; disabling it yields a fully sequential
//! build with the same results.

pub mod builders;
pub mod circuit;
pub mod dense;
pub mod jw;
pub mod model;
pub mod nmr;
pub mod par;
pub mod pauli;
pub mod plot;
pub mod sim;
pub mod spectral;
pub mod tol;

pub use builders::{
    build_cnot_a0, build_cnot_b1, build_correlation_network, build_evolution,
    build_spectrum_network, build_u, hoist_gate, hoist_time_dependence, HoistError,
};
pub use circuit::{Circuit, CircuitError, Gate, GateKind, Roles};
pub use dense::{exp_hermitian, expectation, to_dense, DenseOperator, StateVector};
pub use jw::{jw_map, jw_state, FermionOp, JwError, OccupationState, OpKind};
pub use model::{
    build_full_hamiltonian, closed_form_g, derive, one_particle_spectrum, oracle_g, oracle_s,
    reduce_two_qubit, DerivedParams, ModelError, ModelParams, OneParticleSpectrum,
    PhaseConvention,
};
pub use pauli::{Axis, OperatorError, PauliString, PauliSum, QuarterPhase};
pub use sim::{
    expectation_pseudo_pure, measure_ancilla, network_input_state, prepare_initial, run,
    run_correlation_experiment, run_pseudo_pure, run_spectrum_experiment, reference_signal,
    ExperimentError, ExperimentPoint, ExperimentResult, NoiseSpec, PreparedInitial,
    PseudoPureState, PulseLevelConfig, RunMode, SimError, TimeGrid,
};
pub use spectral::{dft, find_peaks, propagate_errors, Peak, PeakReport, Spectrum, SpectrumBin};
