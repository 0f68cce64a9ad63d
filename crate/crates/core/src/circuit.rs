//! Gate-level intermediate representation.
//!
//! The elementary set is the native NMR one: single-qubit rotations
//! R_μ(ϑ) = e^{-i(ϑ/2)σ_μ} around x, y and (virtual) z, and the two-qubit
//! Ising gate R_{zz}(ω) = e^{-i(ω/2)σ_zσ_z}. Circuits are ordered gate
//! lists over named qubits; gates marked `time_dependent` carry a
//! simulation-parameter dependence in their angle, which the hoisting pass
//! and the pulse compiler care about.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::dense::{to_dense, DenseOperator};
use crate::pauli::{Axis, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    RotX,
    RotY,
    /// Virtual z rotation: zero physical duration, realized by phase
    /// tracking in the compiler.
    RotZ,
    IsingZZ,
}

impl GateKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::RotX => "rx",
            GateKind::RotY => "ry",
            GateKind::RotZ => "rz",
            GateKind::IsingZZ => "zz",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Rotation angle ϑ (or Ising angle ω), radians.
    pub angle: f64,
    pub targets: (usize, Option<usize>),
    /// True when the angle is a function of the simulation parameter t.
    pub time_dependent: bool,
}

impl Gate {
    pub fn rot_x(qubit: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::RotX,
            angle,
            targets: (qubit, None),
            time_dependent: false,
        }
    }

    pub fn rot_y(qubit: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::RotY,
            angle,
            targets: (qubit, None),
            time_dependent: false,
        }
    }

    pub fn rot_z(qubit: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::RotZ,
            angle,
            targets: (qubit, None),
            time_dependent: false,
        }
    }

    pub fn ising_zz(a: usize, b: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::IsingZZ,
            angle,
            targets: (a, Some(b)),
            time_dependent: false,
        }
    }

    pub fn time_dependent(mut self) -> Self {
        self.time_dependent = true;
        self
    }

    /// The inverse gate (negated angle).
    pub fn inverse(&self) -> Self {
        let mut g = self.clone();
        g.angle = -g.angle;
        g
    }

    /// The Pauli string generating this gate: the gate equals
    /// cos(angle/2)·I - i·sin(angle/2)·P.
    pub fn generator(&self) -> PauliString {
        match self.kind {
            GateKind::RotX => PauliString::single(self.targets.0, Axis::X),
            GateKind::RotY => PauliString::single(self.targets.0, Axis::Y),
            GateKind::RotZ => PauliString::single(self.targets.0, Axis::Z),
            GateKind::IsingZZ => PauliString::from_factors([
                (self.targets.0, Axis::Z),
                (self.targets.1.expect("ising has two targets"), Axis::Z),
            ]),
        }
    }
}

/// Which qubit plays which role in the measurement networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Roles {
    pub ancilla: Option<usize>,
    pub impurity: Option<usize>,
    pub mode: Option<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("gate targets qubit {index}, circuit has {n_qubits} qubits")]
    TargetOutOfRange { index: usize, n_qubits: usize },
    #[error("Ising gate requires two distinct targets")]
    DegenerateIsing,
    #[error("gate angle is not finite")]
    NonFiniteAngle,
    #[error("qubit label {0:?} contains whitespace or is empty")]
    BadLabel(String),
    #[error("duplicate qubit label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown qubit label {0:?}")]
    UnknownLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An ordered list of elementary gates over a named qubit register.
/// Qubit 0 is the most significant bit of the simulated register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: Vec<String>,
    roles: Roles,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(
        labels: I,
    ) -> Result<Self, CircuitError> {
        let qubits: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in qubits.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(CircuitError::BadLabel(l.clone()));
            }
            if qubits[..i].contains(l) {
                return Err(CircuitError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Circuit {
            qubits,
            roles: Roles::default(),
            gates: Vec::new(),
        })
    }

    pub fn with_roles(mut self, roles: Roles) -> Self {
        self.roles = roles;
        self
    }

    pub fn roles(&self) -> Roles {
        self.roles
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit_labels(&self) -> &[String] {
        &self.qubits
    }

    pub fn qubit_index(&self, label: &str) -> Option<usize> {
        self.qubits.iter().position(|l| l == label)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if !gate.angle.is_finite() {
            return Err(CircuitError::NonFiniteAngle);
        }
        let check = |q: usize| {
            if q >= self.qubits.len() {
                Err(CircuitError::TargetOutOfRange {
                    index: q,
                    n_qubits: self.qubits.len(),
                })
            } else {
                Ok(())
            }
        };
        check(gate.targets.0)?;
        if let Some(b) = gate.targets.1 {
            check(b)?;
            if b == gate.targets.0 {
                return Err(CircuitError::DegenerateIsing);
            }
        } else if gate.kind == GateKind::IsingZZ {
            return Err(CircuitError::DegenerateIsing);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// The inverse circuit: gates reversed, angles negated.
    pub fn inverse(&self) -> Self {
        Circuit {
            qubits: self.qubits.clone(),
            roles: self.roles,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Dense unitary of the whole circuit (last gate leftmost).
    pub fn to_dense(&self) -> DenseOperator {
        let n = self.n_qubits();
        let mut u = DenseOperator::identity(n);
        for gate in &self.gates {
            let p = to_dense(
                &PauliSum::from_term(Complex64::new(1.0, 0.0), gate.generator()),
                n,
            )
            .expect("gate targets validated on push");
            let half = gate.angle / 2.0;
            let g = DenseOperator::identity(n)
                .scale(Complex64::new(half.cos(), 0.0))
                .add(&p.scale(Complex64::new(0.0, -half.sin())));
            u = g.mul(&u);
        }
        u
    }

    /// Structural equality that ignores the angles of virtual-z gates:
    /// true when both circuits have identical gate sequences except
    /// possibly differing RotZ angles.
    pub fn equal_up_to_virtual_z(&self, other: &Self) -> bool {
        if self.qubits != other.qubits || self.gates.len() != other.gates.len() {
            return false;
        }
        self.gates.iter().zip(&other.gates).all(|(a, b)| {
            a.kind == b.kind
                && a.targets == b.targets
                && (a.kind == GateKind::RotZ || a.angle == b.angle)
        })
    }

    /// Line-oriented text form: one gate per line after a `qubits` header.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# circuit v1\n");
        out.push_str(&format!("qubits {}\n", self.qubits.join(" ")));
        let mut role_parts = Vec::new();
        if let Some(a) = self.roles.ancilla {
            role_parts.push(format!("ancilla={}", self.qubits[a]));
        }
        if let Some(i) = self.roles.impurity {
            role_parts.push(format!("impurity={}", self.qubits[i]));
        }
        if let Some(m) = self.roles.mode {
            role_parts.push(format!("mode={}", self.qubits[m]));
        }
        if !role_parts.is_empty() {
            out.push_str(&format!("roles {}\n", role_parts.join(" ")));
        }
        for g in &self.gates {
            out.push_str(&format!("{} {:.17e} {}", g.kind.mnemonic(), g.angle, self.qubits[g.targets.0]));
            if let Some(b) = g.targets.1 {
                out.push_str(&format!(" {}", self.qubits[b]));
            }
            if g.time_dependent {
                out.push_str(" td");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty line");
            match head {
                "qubits" => {
                    if circuit.is_some() {
                        return Err(CircuitError::Parse {
                            line: n,
                            message: "duplicate qubits header".into(),
                        });
                    }
                    circuit = Some(Circuit::new(parts.map(str::to_owned))?);
                }
                "roles" => {
                    let c = circuit.as_mut().ok_or(CircuitError::Parse {
                        line: n,
                        message: "roles before qubits header".into(),
                    })?;
                    let mut roles = Roles::default();
                    for kv in parts {
                        let (key, value) = kv.split_once('=').ok_or(CircuitError::Parse {
                            line: n,
                            message: format!("bad role entry {kv:?}"),
                        })?;
                        let idx = c
                            .qubit_index(value)
                            .ok_or(CircuitError::UnknownLabel(value.into()))?;
                        match key {
                            "ancilla" => roles.ancilla = Some(idx),
                            "impurity" => roles.impurity = Some(idx),
                            "mode" => roles.mode = Some(idx),
                            _ => {
                                return Err(CircuitError::Parse {
                                    line: n,
                                    message: format!("unknown role {key:?}"),
                                })
                            }
                        }
                    }
                    c.roles = roles;
                }
                kind @ ("rx" | "ry" | "rz" | "zz") => {
                    let c = circuit.as_mut().ok_or(CircuitError::Parse {
                        line: n,
                        message: "gate before qubits header".into(),
                    })?;
                    let angle: f64 = parts
                        .next()
                        .ok_or(CircuitError::Parse {
                            line: n,
                            message: "missing angle".into(),
                        })?
                        .parse()
                        .map_err(|e| CircuitError::Parse {
                            line: n,
                            message: format!("bad angle: {e}"),
                        })?;
                    let mut targets = Vec::new();
                    let mut td = false;
                    for tok in parts {
                        if tok == "td" {
                            td = true;
                        } else {
                            targets.push(
                                c.qubit_index(tok)
                                    .ok_or(CircuitError::UnknownLabel(tok.into()))?,
                            );
                        }
                    }
                    let mut gate = match (kind, targets.as_slice()) {
                        ("rx", [q]) => Gate::rot_x(*q, angle),
                        ("ry", [q]) => Gate::rot_y(*q, angle),
                        ("rz", [q]) => Gate::rot_z(*q, angle),
                        ("zz", [a, b]) => Gate::ising_zz(*a, *b, angle),
                        _ => {
                            return Err(CircuitError::Parse {
                                line: n,
                                message: format!("wrong target count for {kind}"),
                            })
                        }
                    };
                    gate.time_dependent = td;
                    c.push(gate)?;
                }
                other => {
                    return Err(CircuitError::Parse {
                        line: n,
                        message: format!("unknown directive {other:?}"),
                    })
                }
            }
        }
        circuit.ok_or(CircuitError::Parse {
            line: 0,
            message: "missing qubits header".into(),
        })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
