//! Circuit constructions for the measurement networks: the diagonalizing
//! unitary U, the two-qubit evolution e^{-iH̄t}, the controlled-NOT
//! decompositions, the ancilla networks for G(t) and S(t), and the hoisting
//! pass that moves all simulation-time dependence into virtual z angles.
//!
//! Qubit layout of the three-qubit networks: index 0 is the ancilla "a",
//! index 1 the impurity qubit "1", index 2 the k₀-mode qubit "2".

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, Roles};
use crate::model::{DerivedParams, ModelParams, PhaseConvention};

pub const ANCILLA_LABEL: &str = "a";
pub const IMPURITY_LABEL: &str = "1";
pub const MODE_LABEL: &str = "2";

fn two_qubit_circuit() -> Circuit {
    Circuit::new([IMPURITY_LABEL, MODE_LABEL])
        .expect("static labels")
        .with_roles(Roles {
            ancilla: None,
            impurity: Some(0),
            mode: Some(1),
        })
}

fn network_circuit() -> Circuit {
    Circuit::new([ANCILLA_LABEL, IMPURITY_LABEL, MODE_LABEL])
        .expect("static labels")
        .with_roles(Roles {
            ancilla: Some(0),
            impurity: Some(1),
            mode: Some(2),
        })
}

/// Gate sequence of the diagonalizing unitary U(θ) on qubits (q1, q2):
/// ten elementary gates, two of them Ising couplings at ±θ. Satisfies
/// H̄ = U (λ₁σ_z¹ + λ₂σ_z²) U†.
fn u_gates(theta: f64, q1: usize, q2: usize) -> Vec<Gate> {
    vec![
        Gate::rot_y(q2, -FRAC_PI_2),
        Gate::rot_x(q1, FRAC_PI_2),
        Gate::ising_zz(q1, q2, -theta),
        Gate::rot_y(q2, FRAC_PI_2),
        Gate::rot_x(q2, FRAC_PI_2),
        Gate::rot_x(q1, -FRAC_PI_2),
        Gate::rot_y(q1, -FRAC_PI_2),
        Gate::ising_zz(q1, q2, theta),
        Gate::rot_y(q1, FRAC_PI_2),
        Gate::rot_x(q2, -FRAC_PI_2),
    ]
}

fn inverted(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// The unitary U(θ) as a standalone two-qubit circuit.
pub fn build_u(theta: f64) -> Circuit {
    let mut c = two_qubit_circuit();
    c.extend(u_gates(theta, 0, 1)).expect("static gate list");
    c
}

/// e^{-iH̄t} = U · R_z¹(2λ₁t) R_z²(2λ₂t) · U†, exact for every t.
pub fn build_evolution(t: f64, d: &DerivedParams) -> Circuit {
    let mut c = two_qubit_circuit();
    c.extend(evolution_gates(t, d, 0, 1)).expect("static gate list");
    c
}

fn evolution_gates(t: f64, d: &DerivedParams, q1: usize, q2: usize) -> Vec<Gate> {
    let u = u_gates(d.theta, q1, q2);
    let mut gates = inverted(&u);
    gates.push(Gate::rot_z(q1, 2.0 * d.lambda1 * t).time_dependent());
    gates.push(Gate::rot_z(q2, 2.0 * d.lambda2 * t).time_dependent());
    gates.extend(u);
    gates
}

/// CNOT controlled on |1⟩ of `control`, acting on `target`, as the five
/// elementary gates
///
///   e^{iπ/4 σ_x^t} e^{iπ/4 σ_z^tσ_z^c} e^{-iπ/4 σ_y^t}
///   e^{-iπ/4 σ_z^tσ_z^c} e^{iπ/4 σ_z^c},
///
/// equal to the controlled gate up to the global phase e^{iπ/4}.
fn cnot_on_one_gates(control: usize, target: usize) -> Vec<Gate> {
    vec![
        Gate::rot_z(control, -FRAC_PI_2),
        Gate::ising_zz(target, control, FRAC_PI_2),
        Gate::rot_y(target, FRAC_PI_2),
        Gate::ising_zz(target, control, -FRAC_PI_2),
        Gate::rot_x(target, -FRAC_PI_2),
    ]
}

/// CNOT controlled on |0⟩ of `control` (the Ising signs and the ancilla
/// z-rotation flip relative to the |1⟩-controlled form).
fn cnot_on_zero_gates(control: usize, target: usize) -> Vec<Gate> {
    vec![
        Gate::rot_z(control, FRAC_PI_2),
        Gate::ising_zz(target, control, -FRAC_PI_2),
        Gate::rot_y(target, FRAC_PI_2),
        Gate::ising_zz(target, control, FRAC_PI_2),
        Gate::rot_x(target, -FRAC_PI_2),
    ]
}

/// A^{|0⟩_a}: σ_x on the impurity qubit when the ancilla is |0⟩, as a
/// circuit on (a, 1).
pub fn build_cnot_a0() -> Circuit {
    let mut c = Circuit::new([ANCILLA_LABEL, IMPURITY_LABEL])
        .expect("static labels")
        .with_roles(Roles {
            ancilla: Some(0),
            impurity: Some(1),
            mode: None,
        });
    c.extend(cnot_on_zero_gates(0, 1)).expect("static gate list");
    c
}

/// B^{|1⟩_a}: σ_x on the impurity qubit when the ancilla is |1⟩, as a
/// circuit on (a, 1).
pub fn build_cnot_b1() -> Circuit {
    let mut c = Circuit::new([ANCILLA_LABEL, IMPURITY_LABEL])
        .expect("static labels")
        .with_roles(Roles {
            ancilla: Some(0),
            impurity: Some(1),
            mode: None,
        });
    c.extend(cnot_on_one_gates(0, 1)).expect("static gate list");
    c
}

/// Ancilla network for the correlation function: x-basis preparation on
/// the ancilla, B^{|1⟩_a}, the evolution e^{-iH̄t}, then A^{|0⟩_a}.
/// Applied to |0⟩_a ⊗ |1₁0₂⟩, the ancilla polarization ⟨2σ₊^a⟩ of the
/// output equals G(t).
pub fn build_correlation_network(t: f64, d: &DerivedParams) -> Circuit {
    let mut c = network_circuit();
    c.push(Gate::rot_y(0, FRAC_PI_2)).expect("valid");
    c.extend(cnot_on_one_gates(0, 1)).expect("static gate list");
    c.extend(evolution_gates(t, d, 1, 2)).expect("static gate list");
    c.extend(cnot_on_zero_gates(0, 1)).expect("static gate list");
    c
}

/// Ancilla network for the spectral signal: x-basis preparation, then
/// e^{iHσ_z^a t/2} decomposed as U, two ancilla-controlled phase couplings
/// at λ₁t and λ₂t, U†, and a final ancilla z-rotation carrying the
/// constant part of H. Applied to |0⟩_a ⊗ |1₁0₂⟩, ⟨2σ₊^a⟩ of the output
/// equals S(t) under the given phase convention.
///
/// The constant-term rotation commutes with everything else acting on the
/// ancilla, so its position is free; it is placed last.
pub fn build_spectrum_network(
    t: f64,
    p: &ModelParams,
    d: &DerivedParams,
    convention: PhaseConvention,
) -> Circuit {
    let mut c = network_circuit();
    c.push(Gate::rot_y(0, FRAC_PI_2)).expect("valid");
    let u = u_gates(d.theta, 1, 2);
    c.extend(u.clone()).expect("static gate list");
    c.push(Gate::ising_zz(1, 0, -d.lambda1 * t).time_dependent())
        .expect("valid");
    c.push(Gate::ising_zz(2, 0, -d.lambda2 * t).time_dependent())
        .expect("valid");
    c.extend(inverted(&u)).expect("static gate list");
    let e_mean = (p.epsilon + p.epsilon_k0) / 2.0;
    let constant_angle = match convention {
        PhaseConvention::EigenvalueConsistent => -e_mean * t,
        PhaseConvention::DoubledConstant => -2.0 * e_mean * t,
    };
    c.push(Gate::rot_z(0, constant_angle).time_dependent())
        .expect("valid");
    c
}

#[derive(Debug, Error, PartialEq)]
pub enum HoistError {
    #[error("gate is not marked as a time-dependent Ising coupling")]
    NotHoistable,
}

/// Replace one time-dependent Ising gate by the fixed-angle construction:
/// a CNOT conjugation moving the variable angle onto a virtual z rotation,
///
///   R_{zz}(ω) = F · R_z^k(ω) · F†,   F = CNOT(j → k),
///
/// exactly (the CNOT global phases cancel in the conjugation). Only the
/// virtual z carries the time dependence; the Ising couplings inside F are
/// fixed at ±π/2.
pub fn hoist_gate(gate: &Gate) -> Result<Vec<Gate>, HoistError> {
    if gate.kind != GateKind::IsingZZ || !gate.time_dependent {
        return Err(HoistError::NotHoistable);
    }
    let j = gate.targets.0;
    let k = gate.targets.1.expect("ising has two targets");
    let f = cnot_on_one_gates(j, k);
    let mut out = inverted(&f);
    out.push(Gate::rot_z(k, gate.angle).time_dependent());
    out.extend(f);
    Ok(out)
}

/// Rewrite every time-dependent Ising gate through `hoist_gate`, leaving
/// all other gates untouched. After this pass, circuits built for
/// different t share one physical gate skeleton and differ only in
/// virtual-z angles.
pub fn hoist_time_dependence(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(circuit.qubit_labels().iter().cloned())
        .expect("labels already validated")
        .with_roles(circuit.roles());
    for gate in circuit.gates() {
        match hoist_gate(gate) {
            Ok(replacement) => out.extend(replacement).expect("same register"),
            Err(HoistError::NotHoistable) => out.push(gate.clone()).expect("same register"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{exp_hermitian, expectation, to_dense, DenseOperator, StateVector};
    use crate::model::{derive, reduce_two_qubit};
    use crate::pauli::{Axis, PauliString, PauliSum};
    use crate::tol::{TOL_ALGEBRAIC, TOL_DECOMPOSITION, TOL_UNITARITY};
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn set_a() -> ModelParams {
        ModelParams::single_mode(-8.0, -2.0, 4.0)
    }

    fn set_s() -> ModelParams {
        ModelParams::single_mode(-8.0, -2.0, 0.5)
    }

    fn random_params(rng: &mut StdRng) -> ModelParams {
        ModelParams::single_mode(
            rng.gen_range(-9.0..9.0),
            rng.gen_range(-9.0..9.0),
            rng.gen_range(0.1..5.0),
        )
    }

    #[test]
    fn u_at_zero_theta_is_unitary_product_of_rotations() {
        let u = build_u(0.0);
        assert!(u.to_dense().is_unitary(TOL_UNITARITY));
        assert!(u
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::IsingZZ)
            .all(|g| g.angle == 0.0));
    }

    #[test]
    fn u_adjoint_equals_reversed_negated() {
        let d = derive(&set_a()).unwrap();
        let u = build_u(d.theta);
        let diff = u.to_dense().adjoint().sub(&u.inverse().to_dense()).norm();
        assert!(diff < TOL_ALGEBRAIC);
    }

    #[test]
    fn u_diagonalizes_hbar() {
        // H̄ = U (λ₁Z¹ + λ₂Z²) U†
        for p in [set_a(), set_s()] {
            let d = derive(&p).unwrap();
            let u = build_u(d.theta).to_dense();
            let diag = to_dense(
                &PauliSum::from_terms([
                    (c(d.lambda1, 0.0), PauliString::single(0, Axis::Z)),
                    (c(d.lambda2, 0.0), PauliString::single(1, Axis::Z)),
                ]),
                2,
            )
            .unwrap();
            let hbar = to_dense(&reduce_two_qubit(&p), 2).unwrap();
            let recon = u.mul(&diag).mul(&u.adjoint());
            assert!(recon.sub(&hbar).norm() < TOL_DECOMPOSITION);
        }
    }

    #[test]
    fn evolution_at_zero_is_identity() {
        let d = derive(&set_a()).unwrap();
        let u = build_evolution(0.0, &d).to_dense();
        assert!(u.distance_up_to_phase(&DenseOperator::identity(2)) < TOL_DECOMPOSITION);
    }

    #[test]
    fn evolution_matches_exponential_on_both_sets() {
        for (p, t) in [(set_a(), 0.3), (set_s(), 1.0)] {
            let d = derive(&p).unwrap();
            let circuit = build_evolution(t, &d).to_dense();
            let hbar = to_dense(&reduce_two_qubit(&p), 2).unwrap();
            let exact = exp_hermitian(&hbar, t).unwrap();
            assert!(circuit.distance_up_to_phase(&exact) < TOL_DECOMPOSITION);
        }
    }

    #[test]
    fn evolution_matches_exponential_random() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let t = rng.gen_range(-2.0..2.0);
            let d = derive(&p).unwrap();
            let circuit = build_evolution(t, &d).to_dense();
            let exact =
                exp_hermitian(&to_dense(&reduce_two_qubit(&p), 2).unwrap(), t).unwrap();
            assert!(circuit.distance_up_to_phase(&exact) < TOL_DECOMPOSITION);
        }
    }

    #[test]
    fn evolution_group_property() {
        let mut rng = StdRng::seed_from_u64(202);
        let d = derive(&set_a()).unwrap();
        for _ in 0..10 {
            let (t1, t2) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let lhs = build_evolution(t1 + t2, &d).to_dense();
            let rhs = build_evolution(t1, &d)
                .to_dense()
                .mul(&build_evolution(t2, &d).to_dense());
            assert!(lhs.distance_up_to_phase(&rhs) < TOL_NETWORK_SUM);
        }
    }

    const TOL_NETWORK_SUM: f64 = 1e-9;

    fn controlled_x_on(control_value: usize) -> DenseOperator {
        // |v⟩⟨v|_a ⊗ X¹ + |1-v⟩⟨1-v|_a ⊗ I on (a, 1)
        let mut m = DenseOperator::zeros(2);
        for a in 0..2usize {
            for q in 0..2usize {
                let col = (a << 1) | q;
                if a == control_value {
                    m.add_at((a << 1) | (q ^ 1), col, c(1.0, 0.0));
                } else {
                    m.add_at(col, col, c(1.0, 0.0));
                }
            }
        }
        m
    }

    #[test]
    fn cnot_a0_matches_definition_up_to_phase() {
        let a = build_cnot_a0().to_dense();
        assert!(a.distance_up_to_phase(&controlled_x_on(0)) < TOL_DECOMPOSITION);
    }

    #[test]
    fn cnot_b1_matches_definition_up_to_phase() {
        let b = build_cnot_b1().to_dense();
        assert!(b.distance_up_to_phase(&controlled_x_on(1)) < TOL_DECOMPOSITION);
    }

    #[test]
    fn cnot_b1_leaves_control_zero_untouched() {
        let b = build_cnot_b1().to_dense();
        for q in 0..2usize {
            let state = StateVector::basis(2, q); // ancilla |0⟩
            let out = b.apply(&state).unwrap();
            assert!((out.inner(&state).norm() - 1.0).abs() < TOL_DECOMPOSITION);
        }
    }

    #[test]
    fn composed_cnots_give_unconditional_flip() {
        // A then B with no evolution between: σ_x¹ applied unconditionally
        let prod = build_cnot_a0().to_dense().mul(&build_cnot_b1().to_dense());
        let x1 = to_dense(
            &PauliSum::from_term(c(1.0, 0.0), PauliString::single(1, Axis::X)),
            2,
        )
        .unwrap();
        assert!(prod.distance_up_to_phase(&x1) < TOL_DECOMPOSITION);
    }

    fn network_input() -> StateVector {
        // |0⟩_a ⊗ |1₁0₂⟩ on (a, 1, 2)
        StateVector::basis(3, 0b010)
    }

    fn measured_coherence(circuit: &Circuit, input: &StateVector) -> Complex64 {
        let out = circuit.to_dense().apply(input).unwrap();
        let obs = PauliSum::sigma_plus(0).scale(c(2.0, 0.0));
        expectation(&out, &obs).unwrap()
    }

    #[test]
    fn correlation_network_at_zero_measures_one() {
        let d = derive(&set_a()).unwrap();
        let net = build_correlation_network(0.0, &d);
        let g = measured_coherence(&net, &network_input());
        assert!((g - c(1.0, 0.0)).norm() < TOL_NETWORK_SUM);
    }

    #[test]
    fn correlation_network_matches_oracle_over_grids() {
        for (p, steps) in [(set_a(), 15), (ModelParams::single_mode(0.0, -2.0, 4.0), 31)] {
            let d = derive(&p).unwrap();
            for k in 1..=steps {
                let t = 0.1 * k as f64;
                let net = build_correlation_network(t, &d);
                let g = measured_coherence(&net, &network_input());
                let oracle = crate::model::oracle_g(&p, t).unwrap();
                assert!((g - oracle).norm() < TOL_NETWORK_SUM, "t={t}");
            }
        }
    }

    #[test]
    fn spectrum_network_matches_oracle() {
        let p = set_s();
        let d = derive(&p).unwrap();
        for convention in [
            PhaseConvention::EigenvalueConsistent,
            PhaseConvention::DoubledConstant,
        ] {
            for k in [0, 1, 10, 64, 128] {
                let t = 0.1 * k as f64;
                let net = build_spectrum_network(t, &p, &d, convention);
                let s = measured_coherence(&net, &network_input());
                let oracle = crate::model::oracle_s(&p, t, convention).unwrap();
                assert!((s - oracle).norm() < TOL_NETWORK_SUM, "t={t} {convention:?}");
            }
        }
    }

    #[test]
    fn global_pi_half_rotation_symmetry() {
        // The global π/2 z-rotation commutes with H̄ and leaves |φ⟩
        // invariant up to a phase, forcing ⟨xy⟩ = -⟨yx⟩ and ⟨xx⟩ = ⟨yy⟩
        // for the conjugated impurity operators. Together with
        // σ₋¹|φ⟩ = 0 this reduces G(t) to the unitary form
        // ⟨φ|T̄†σ_x¹T̄σ_x¹|φ⟩.
        let mut rng = StdRng::seed_from_u64(303);
        let p = set_a();
        let d = derive(&p).unwrap();
        let phi = StateVector::basis(2, 0b10);
        let pauli = |axis| {
            to_dense(
                &PauliSum::from_term(c(1.0, 0.0), PauliString::single(0, axis)),
                2,
            )
            .unwrap()
        };
        let (sx, sy) = (pauli(Axis::X), pauli(Axis::Y));
        let sandwich = |tbar: &DenseOperator, a: &DenseOperator, b: &DenseOperator| {
            let op = tbar.adjoint().mul(a).mul(tbar).mul(b);
            phi.inner(&op.apply(&phi).unwrap())
        };
        for _ in 0..10 {
            let t = rng.gen_range(0.0..3.0);
            let tbar = build_evolution(t, &d).to_dense();
            let xy = sandwich(&tbar, &sx, &sy);
            let yx = sandwich(&tbar, &sy, &sx);
            let xx = sandwich(&tbar, &sx, &sx);
            let yy = sandwich(&tbar, &sy, &sy);
            assert!((xy + yx).norm() < TOL_DECOMPOSITION, "t={t}");
            assert!((xx - yy).norm() < TOL_DECOMPOSITION, "t={t}");
            let g = crate::model::oracle_g(&p, t).unwrap();
            assert!((xx - g).norm() < TOL_DECOMPOSITION, "t={t}");
        }
    }

    #[test]
    fn hoisted_gate_at_zero_angle_is_identity() {
        let gate = Gate::ising_zz(0, 1, 0.0).time_dependent();
        let mut c2 = Circuit::new(["a", "b"]).unwrap();
        c2.extend(hoist_gate(&gate).unwrap()).unwrap();
        assert!(c2.to_dense().sub(&DenseOperator::identity(2)).norm() < TOL_DECOMPOSITION);
    }

    #[test]
    fn hoist_rejects_unmarked_gates() {
        assert_eq!(
            hoist_gate(&Gate::ising_zz(0, 1, 0.3)),
            Err(HoistError::NotHoistable)
        );
        assert_eq!(
            hoist_gate(&Gate::rot_x(0, 0.3).time_dependent()),
            Err(HoistError::NotHoistable)
        );
    }

    #[test]
    fn hoisted_spectrum_network_is_dense_equal() {
        let p = set_s();
        let d = derive(&p).unwrap();
        for t in [0.0, 0.7, 5.3] {
            let net = build_spectrum_network(t, &p, &d, PhaseConvention::EigenvalueConsistent);
            let hoisted = hoist_time_dependence(&net);
            assert!(
                hoisted.to_dense().sub(&net.to_dense()).norm() < TOL_DECOMPOSITION,
                "t={t}"
            );
            assert!(hoisted
                .gates()
                .iter()
                .filter(|g| g.kind == GateKind::IsingZZ)
                .all(|g| !g.time_dependent));
        }
    }

    #[test]
    fn hoisted_grid_differs_only_in_virtual_z() {
        let p = set_s();
        let d = derive(&p).unwrap();
        let reference = hoist_time_dependence(&build_spectrum_network(
            0.1,
            &p,
            &d,
            PhaseConvention::EigenvalueConsistent,
        ));
        for k in 2..=128 {
            let t = 0.1 * k as f64;
            let hoisted = hoist_time_dependence(&build_spectrum_network(
                t,
                &p,
                &d,
                PhaseConvention::EigenvalueConsistent,
            ));
            assert!(reference.equal_up_to_virtual_z(&hoisted), "t={t}");
        }
    }

    #[test]
    fn hoist_is_semantics_preserving_for_correlation_network() {
        let d = derive(&set_a()).unwrap();
        for t in [0.2, 1.1] {
            let net = build_correlation_network(t, &d);
            let hoisted = hoist_time_dependence(&net);
            // no time-dependent Ising gates here: pass-through
            assert_eq!(net, hoisted);
        }
    }

    #[test]
    fn all_builders_are_unitary() {
        let p = set_s();
        let d = derive(&p).unwrap();
        let circuits = [
            build_u(d.theta),
            build_evolution(0.8, &d),
            build_cnot_a0(),
            build_cnot_b1(),
            build_correlation_network(0.8, &d),
            build_spectrum_network(0.8, &p, &d, PhaseConvention::EigenvalueConsistent),
        ];
        for c in circuits {
            assert!(c.to_dense().is_unitary(TOL_UNITARITY));
        }
    }
}
