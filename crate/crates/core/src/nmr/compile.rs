//! Lowering circuits to timed pulse sequences.
//!
//! Single-qubit x/y rotations become RF pulses (1 ms by default), z
//! rotations become zero-duration virtual frame advances, and each Ising
//! gate becomes a refocused delay block: two free-evolution segments with a
//! π-flip on one spin of the target pair between them, so the effective
//! coupling angle is π·J·(Δt₁ - Δt₂). Spins outside the target pair are
//! decoupled with π-pulse pairs at segment midpoints when full refocusing
//! is requested; with target-only refocusing their couplings stay exposed
//! and the residual error is estimated by a quadratic objective over the
//! exposed coupling angles.

use std::f64::consts::PI;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind};
use crate::nmr::molecule::{Molecule, MoleculeError, SpinRole};
use crate::nmr::sequence::{IsingBlock, PulseEvent, PulseSequence, SequenceError};

/// How aggressively unwanted couplings are refocused inside Ising blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refocusing {
    /// Decouple every spin coupled to the target pair with π-pulse pairs.
    #[default]
    FullDecoupling,
    /// Refocus only the target pair; third-spin couplings stay exposed.
    TargetPairOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileOptions {
    /// Physical duration of one RF pulse.
    pub pulse_duration: f64,
    pub refocusing: Refocusing,
    /// Extra slack added to both delay segments of every Ising block.
    /// Keeps the effective angle unchanged; the delay optimizer can remove
    /// it again.
    pub block_padding: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            pulse_duration: 1e-3,
            refocusing: Refocusing::FullDecoupling,
            block_padding: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("circuit qubit {0:?} has no matching molecule spin")]
    UnmappedQubit(String),
    #[error("two circuit qubits map to molecule spin {0:?}")]
    DuplicateSpinAssignment(String),
    #[error("no J-coupling between spins {a:?} and {b:?}; Ising gate unrealizable")]
    NoCoupling { a: String, b: String },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Molecule(#[from] MoleculeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Resolve which molecule spin realizes each circuit qubit: role
/// assignments take precedence, then exact label match.
pub fn map_circuit_spins(circuit: &Circuit, m: &Molecule) -> Result<Vec<usize>, CompileError> {
    let roles = circuit.roles();
    let mut mapping = Vec::with_capacity(circuit.n_qubits());
    for (qi, label) in circuit.qubit_labels().iter().enumerate() {
        let by_role = if roles.ancilla == Some(qi) {
            m.ancilla_index()
        } else if roles.impurity == Some(qi) {
            m.impurity_index()
        } else if roles.mode == Some(qi) {
            m.mode_index()
        } else {
            None
        };
        let spin = by_role
            .or_else(|| m.label_index(label))
            .ok_or_else(|| CompileError::UnmappedQubit(label.clone()))?;
        if mapping.contains(&spin) {
            return Err(CompileError::DuplicateSpinAssignment(
                m.spin(spin).label.clone(),
            ));
        }
        mapping.push(spin);
    }
    Ok(mapping)
}

/// Re-target a circuit onto the full molecule register (identity on all
/// unused spins), for ideal-output comparison against a compiled sequence.
pub fn embed_circuit(circuit: &Circuit, m: &Molecule) -> Result<Circuit, CompileError> {
    let mapping = map_circuit_spins(circuit, m)?;
    let mut out = Circuit::new(m.spins().iter().map(|s| s.label.clone()))?;
    for gate in circuit.gates() {
        let mut g = gate.clone();
        g.targets.0 = mapping[g.targets.0];
        g.targets.1 = g.targets.1.map(|b| mapping[b]);
        out.push(g)?;
    }
    Ok(out)
}

struct Emitter<'m> {
    seq: PulseSequence,
    frame: Vec<f64>,
    molecule: &'m Molecule,
    opts: CompileOptions,
}

impl<'m> Emitter<'m> {
    /// Physical pulse realizing a rotation by `angle` about the axis at
    /// `nominal_phase`, corrected for the spin's accumulated virtual frame.
    fn pulse(&mut self, spin: usize, nominal_phase: f64, angle: f64) -> Result<(), CompileError> {
        if angle.abs() < 1e-15 {
            return Ok(());
        }
        let (mut phase, magnitude) = if angle < 0.0 {
            (nominal_phase + PI, -angle)
        } else {
            (nominal_phase, angle)
        };
        phase -= self.frame[spin];
        phase = phase.rem_euclid(2.0 * PI);
        self.seq.push(PulseEvent::Pulse {
            spin,
            phase,
            amplitude: magnitude / (2.0 * self.opts.pulse_duration),
            duration: self.opts.pulse_duration,
        })?;
        Ok(())
    }

    fn virtual_z(&mut self, spin: usize, angle: f64) -> Result<(), CompileError> {
        self.frame[spin] += angle;
        self.seq.push(PulseEvent::VirtualZ { spin, angle })?;
        Ok(())
    }

    /// One delay segment of an Ising block. Decoupled spins carry π-pair
    /// flip patterns that integrate to zero against the constant pattern
    /// of the target pair; when both groups are present they use mutually
    /// orthogonal Walsh patterns (midpoint pair vs. quarter-point pair) so
    /// their cross couplings cancel too. Records the Delay event indices.
    fn segment(
        &mut self,
        length: f64,
        group_a: &[usize],
        group_b: &[usize],
        delays: &mut Vec<usize>,
    ) -> Result<(), CompileError> {
        if length <= 0.0 {
            return Ok(());
        }
        if group_a.is_empty() && group_b.is_empty() {
            delays.push(self.seq.push(PulseEvent::Delay { duration: length })?);
            return Ok(());
        }
        if group_a.is_empty() || group_b.is_empty() {
            let group = if group_a.is_empty() { group_b } else { group_a };
            delays.push(self.seq.push(PulseEvent::Delay {
                duration: length / 2.0,
            })?);
            for &s in group {
                self.pulse(s, 0.0, PI)?;
            }
            delays.push(self.seq.push(PulseEvent::Delay {
                duration: length / 2.0,
            })?);
            for &s in group {
                self.pulse(s, 0.0, PI)?;
            }
            return Ok(());
        }
        // quarter grid: group A flips at L/2 and L (signs + + - -),
        // group B at L/4 and 3L/4 (signs + - - +)
        let quarter = length / 4.0;
        for step in 0..4 {
            delays.push(self.seq.push(PulseEvent::Delay { duration: quarter })?);
            let group = if step % 2 == 0 { group_b } else { group_a };
            for &s in group {
                self.pulse(s, 0.0, PI)?;
            }
        }
        Ok(())
    }

    fn ising_block(&mut self, sa: usize, sb: usize, omega: f64) -> Result<(), CompileError> {
        let j = self.molecule.j(sa, sb);
        if j == 0.0 {
            return Err(CompileError::NoCoupling {
                a: self.molecule.spin(sa).label.clone(),
                b: self.molecule.spin(sb).label.clone(),
            });
        }
        // effective angle ω = π·J·(Δt₁ - Δt₂); a negative difference is
        // realized by making the second segment the longer one
        let d = omega / (PI * j);
        let l1 = d.max(0.0) + self.opts.block_padding;
        let l2 = (-d).max(0.0) + self.opts.block_padding;

        // exposure over l1+l2 lands on the couplings of the non-flipped
        // spin, so flip the spin whose third-party couplings are stronger
        let third_party_cost = |x: usize, other: usize| -> f64 {
            (0..self.molecule.n_spins())
                .filter(|&s| s != x && s != other)
                .map(|s| (2.0 * PI * self.molecule.j(x, s)).powi(2))
                .sum()
        };
        let flip = if third_party_cost(sa, sb) >= third_party_cost(sb, sa) {
            sa
        } else {
            sb
        };

        let decouple: Vec<usize> = match self.opts.refocusing {
            Refocusing::TargetPairOnly => Vec::new(),
            Refocusing::FullDecoupling => (0..self.molecule.n_spins())
                .filter(|&s| s != sa && s != sb)
                .filter(|&s| self.molecule.j(s, sa) != 0.0 || self.molecule.j(s, sb) != 0.0)
                .collect(),
        };
        // held spectators flip together (their mutual couplings only add a
        // scalar phase); everything else gets the orthogonal pattern
        let (spectators, actives): (Vec<usize>, Vec<usize>) =
            decouple.iter().partition(|&&s| {
                matches!(
                    self.molecule.spin(s).role,
                    Some(SpinRole::Spectator { .. })
                )
            });

        let start = self.seq.events().len();
        let mut seg1 = Vec::new();
        let mut seg2 = Vec::new();
        self.segment(l1, &actives, &spectators, &mut seg1)?;
        self.pulse(flip, 0.0, PI)?;
        self.segment(l2, &actives, &spectators, &mut seg2)?;
        self.pulse(flip, 0.0, PI)?;
        let span = (start, self.seq.events().len());
        self.seq.blocks.push(IsingBlock {
            target: (sa, sb),
            flip,
            seg1_delays: seg1,
            seg2_delays: seg2,
            span,
        });
        Ok(())
    }
}

/// Lower a circuit to a pulse sequence against a molecule.
pub fn compile(
    circuit: &Circuit,
    m: &Molecule,
    opts: &CompileOptions,
) -> Result<PulseSequence, CompileError> {
    let mapping = map_circuit_spins(circuit, m)?;
    let mut em = Emitter {
        seq: PulseSequence::new(m.spins().iter().map(|s| s.label.clone()).collect()),
        frame: vec![0.0; m.n_spins()],
        molecule: m,
        opts: opts.clone(),
    };
    for gate in circuit.gates() {
        let spin = mapping[gate.targets.0];
        match gate.kind {
            GateKind::RotX => em.pulse(spin, 0.0, gate.angle)?,
            GateKind::RotY => em.pulse(spin, PI / 2.0, gate.angle)?,
            GateKind::RotZ => em.virtual_z(spin, gate.angle)?,
            GateKind::IsingZZ => {
                let other = mapping[gate.targets.1.expect("validated")];
                em.ising_block(spin, other, gate.angle)?;
            }
        }
    }
    let mut seq = em.seq;
    seq.residual_coupling_error = coupling_objective(&seq, m);
    Ok(seq)
}

fn is_pi_pulse(amplitude: f64, duration: f64) -> bool {
    (2.0 * amplitude * duration - PI).abs() < 1e-9
}

/// Quadratic residual-coupling objective: within every Ising block, walk
/// the events tracking the z-parity each π-pulse flips, accumulate the
/// signed coupling exposure of every pair, and sum (2πJ · exposure)² over
/// all pairs except the block's target. Couplings between two held
/// spectators only contribute a scalar phase and are skipped.
pub fn coupling_objective(seq: &PulseSequence, m: &Molecule) -> f64 {
    let n = m.n_spins();
    let both_spectators = |a: usize, b: usize| {
        matches!(m.spin(a).role, Some(SpinRole::Spectator { .. }))
            && matches!(m.spin(b).role, Some(SpinRole::Spectator { .. }))
    };
    let mut total = 0.0;
    for block in seq.blocks() {
        let mut parity = vec![1.0f64; n];
        let mut exposure = vec![vec![0.0f64; n]; n];
        for ev in &seq.events()[block.span.0..block.span.1] {
            match ev {
                PulseEvent::Delay { duration } => {
                    for a in 0..n {
                        for b in (a + 1)..n {
                            if m.j(a, b) != 0.0 {
                                exposure[a][b] += parity[a] * parity[b] * duration;
                            }
                        }
                    }
                }
                PulseEvent::Pulse {
                    spin,
                    amplitude,
                    duration,
                    ..
                } => {
                    if is_pi_pulse(*amplitude, *duration) {
                        parity[*spin] = -parity[*spin];
                    }
                }
                PulseEvent::VirtualZ { .. } => {}
            }
        }
        let target = (
            block.target.0.min(block.target.1),
            block.target.0.max(block.target.1),
        );
        for a in 0..n {
            for b in (a + 1)..n {
                if (a, b) == target || m.j(a, b) == 0.0 || both_spectators(a, b) {
                    continue;
                }
                total += (2.0 * PI * m.j(a, b) * exposure[a][b]).powi(2);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationReport {
    pub objective_before: f64,
    pub objective_after: f64,
}

/// Shrink the slack in every Ising block to minimize the residual-coupling
/// objective, holding each block's effective angle fixed (both segments
/// shrink together, so Δt₁ - Δt₂ never moves). Per-block exact line
/// search on the quadratic objective; deterministic.
pub fn optimize_delays(seq: &PulseSequence, m: &Molecule) -> (PulseSequence, OptimizationReport) {
    let before = coupling_objective(seq, m);
    let mut out = seq.clone();
    let n = m.n_spins();
    for bi in 0..out.blocks().len() {
        let block = out.blocks()[bi].clone();
        let seg_total = |s: &PulseSequence, idxs: &[usize]| -> f64 {
            idxs.iter()
                .map(|&i| s.events()[i].duration())
                .sum()
        };
        let l1 = seg_total(&out, &block.seg1_delays);
        let l2 = seg_total(&out, &block.seg2_delays);
        let slack = l1.min(l2);
        if slack <= 0.0 {
            continue;
        }
        // Linear exposure model e_p(δ) = e0_p - δ·c_p per coupled pair,
        // where c_p sums each segment's signed contribution per unit of
        // segment length.
        let mut parity = vec![1.0f64; n];
        let mut e0 = vec![vec![0.0f64; n]; n];
        let mut seg_signed = [vec![vec![0.0f64; n]; n], vec![vec![0.0f64; n]; n]];
        for (idx, ev) in seq.events()[block.span.0..block.span.1]
            .iter()
            .enumerate()
        {
            let abs_idx = block.span.0 + idx;
            match ev {
                PulseEvent::Delay { duration } => {
                    let seg = if block.seg1_delays.contains(&abs_idx) {
                        Some(0)
                    } else if block.seg2_delays.contains(&abs_idx) {
                        Some(1)
                    } else {
                        None
                    };
                    for a in 0..n {
                        for b in (a + 1)..n {
                            if m.j(a, b) == 0.0 {
                                continue;
                            }
                            let contrib = parity[a] * parity[b] * duration;
                            e0[a][b] += contrib;
                            if let Some(s) = seg {
                                seg_signed[s][a][b] += contrib;
                            }
                        }
                    }
                }
                PulseEvent::Pulse {
                    spin,
                    amplitude,
                    duration,
                    ..
                } => {
                    if is_pi_pulse(*amplitude, *duration) {
                        parity[*spin] = -parity[*spin];
                    }
                }
                PulseEvent::VirtualZ { .. } => {}
            }
        }
        let target = (
            block.target.0.min(block.target.1),
            block.target.0.max(block.target.1),
        );
        let both_spectators = |a: usize, b: usize| {
            matches!(m.spin(a).role, Some(SpinRole::Spectator { .. }))
                && matches!(m.spin(b).role, Some(SpinRole::Spectator { .. }))
        };
        let mut num = 0.0;
        let mut den = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                if (a, b) == target || m.j(a, b) == 0.0 || both_spectators(a, b) {
                    continue;
                }
                let mut c = 0.0;
                if l1 > 0.0 {
                    c += seg_signed[0][a][b] / l1;
                }
                if l2 > 0.0 {
                    c += seg_signed[1][a][b] / l2;
                }
                let w = (2.0 * PI * m.j(a, b)).powi(2);
                num += w * e0[a][b] * c;
                den += w * c * c;
            }
        }
        if den == 0.0 {
            continue;
        }
        let delta = (num / den).clamp(0.0, slack);
        if delta <= 0.0 {
            continue;
        }
        let rescale = |s: &mut PulseSequence, idxs: &[usize], old: f64, new: f64| {
            if old <= 0.0 {
                return;
            }
            for &i in idxs {
                if let PulseEvent::Delay { duration } = &mut s.events_mut()[i] {
                    *duration *= new / old;
                }
            }
        };
        rescale(&mut out, &block.seg1_delays, l1, l1 - delta);
        rescale(&mut out, &block.seg2_delays, l2, l2 - delta);
    }
    let after = coupling_objective(&out, m);
    out.residual_coupling_error = after;
    (
        out,
        OptimizationReport {
            objective_before: before,
            objective_after: after,
        },
    )
}
