//! Spin-register descriptions: chemical shifts, J-couplings, relaxation
//! times and the role map that ties molecule spins to circuit qubits.
//!
//! The shipped fixtures are synthetic. Their values are order-of-magnitude
//! faithful for a liquid-state setting (shifts of a few kHz, J-couplings of
//! 7–70 Hz, T₂* between 0.3 s and 1.5 s) but none of them is a measured
//! molecular constant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::StateVector;

#[derive(Debug, Error, PartialEq)]
pub enum MoleculeError {
    #[error("spin label {0:?} is empty or contains whitespace")]
    BadLabel(String),
    #[error("duplicate spin label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown spin label {0:?}")]
    UnknownLabel(String),
    #[error("chemical shifts must be distinct for selective addressing ({0:?} repeats)")]
    DegenerateShift(String),
    #[error("T2* must be positive for spin {0:?}")]
    BadRelaxation(String),
    #[error("coupling listed twice for pair ({0:?}, {1:?})")]
    DuplicateCoupling(String, String),
    #[error("coupling pairs a spin with itself: {0:?}")]
    SelfCoupling(String),
    #[error("coupling strength for ({0:?}, {1:?}) is not finite")]
    BadCoupling(String, String),
    #[error("role {0:?} assigned to more than one spin")]
    DuplicateRole(&'static str),
    #[error("spectator held state must be 0 or 1, got {0}")]
    BadHeldState(u8),
    #[error("molecule has no spin with role {0:?}")]
    MissingRole(&'static str),
    #[error("spin {0:?} has no role; every spin must be ancilla, impurity, mode or spectator")]
    UnassignedSpin(String),
    #[error("config parse error: {0}")]
    Parse(String),
}

/// What a spin does during an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinRole {
    Ancilla,
    Impurity,
    Mode,
    /// Held in a fixed logical state for the whole experiment.
    Spectator { held: u8 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spin {
    pub label: String,
    pub shift_hz: f64,
    pub t2_star_s: f64,
    pub role: Option<SpinRole>,
}

/// A validated spin register with a symmetric J-coupling matrix (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub name: String,
    spins: Vec<Spin>,
    j_hz: Vec<Vec<f64>>,
}

impl Molecule {
    pub fn new(
        name: impl Into<String>,
        spins: Vec<Spin>,
        couplings: &[(String, String, f64)],
    ) -> Result<Self, MoleculeError> {
        for (i, s) in spins.iter().enumerate() {
            if s.label.is_empty() || s.label.chars().any(char::is_whitespace) {
                return Err(MoleculeError::BadLabel(s.label.clone()));
            }
            if spins[..i].iter().any(|o| o.label == s.label) {
                return Err(MoleculeError::DuplicateLabel(s.label.clone()));
            }
            if spins[..i].iter().any(|o| o.shift_hz == s.shift_hz) {
                return Err(MoleculeError::DegenerateShift(s.label.clone()));
            }
            if !(s.t2_star_s > 0.0) {
                return Err(MoleculeError::BadRelaxation(s.label.clone()));
            }
        }
        for role in ["ancilla", "impurity", "mode"] {
            let count = spins
                .iter()
                .filter(|s| match (role, s.role) {
                    ("ancilla", Some(SpinRole::Ancilla)) => true,
                    ("impurity", Some(SpinRole::Impurity)) => true,
                    ("mode", Some(SpinRole::Mode)) => true,
                    _ => false,
                })
                .count();
            if count > 1 {
                return Err(MoleculeError::DuplicateRole(match role {
                    "ancilla" => "ancilla",
                    "impurity" => "impurity",
                    _ => "mode",
                }));
            }
        }
        for s in &spins {
            if let Some(SpinRole::Spectator { held }) = s.role {
                if held > 1 {
                    return Err(MoleculeError::BadHeldState(held));
                }
            }
        }
        let n = spins.len();
        let mut j_hz = vec![vec![0.0; n]; n];
        let index = |label: &str| {
            spins
                .iter()
                .position(|s| s.label == label)
                .ok_or_else(|| MoleculeError::UnknownLabel(label.to_string()))
        };
        for (a, b, j) in couplings {
            let (ia, ib) = (index(a)?, index(b)?);
            if ia == ib {
                return Err(MoleculeError::SelfCoupling(a.clone()));
            }
            if !j.is_finite() {
                return Err(MoleculeError::BadCoupling(a.clone(), b.clone()));
            }
            if j_hz[ia][ib] != 0.0 {
                return Err(MoleculeError::DuplicateCoupling(a.clone(), b.clone()));
            }
            j_hz[ia][ib] = *j;
            j_hz[ib][ia] = *j;
        }
        Ok(Molecule {
            name: name.into(),
            spins,
            j_hz,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn spin(&self, index: usize) -> &Spin {
        &self.spins[index]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.spins.iter().position(|s| s.label == label)
    }

    pub fn j(&self, a: usize, b: usize) -> f64 {
        self.j_hz[a][b]
    }

    pub fn min_t2(&self) -> f64 {
        self.spins
            .iter()
            .map(|s| s.t2_star_s)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn role_index(&self, role: SpinRole) -> Option<usize> {
        self.spins.iter().position(|s| match (s.role, role) {
            (Some(SpinRole::Ancilla), SpinRole::Ancilla) => true,
            (Some(SpinRole::Impurity), SpinRole::Impurity) => true,
            (Some(SpinRole::Mode), SpinRole::Mode) => true,
            _ => false,
        })
    }

    pub fn ancilla_index(&self) -> Option<usize> {
        self.role_index(SpinRole::Ancilla)
    }

    pub fn impurity_index(&self) -> Option<usize> {
        self.role_index(SpinRole::Impurity)
    }

    pub fn mode_index(&self) -> Option<usize> {
        self.role_index(SpinRole::Mode)
    }

    pub fn spectators(&self) -> Vec<(usize, u8)> {
        self.spins
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s.role {
                Some(SpinRole::Spectator { held }) => Some((i, held)),
                _ => None,
            })
            .collect()
    }

    /// The register state the measurement networks start from: ancilla |0⟩,
    /// impurity |1⟩, mode |0⟩, spectators in their held states. Returns the
    /// state and the ancilla spin index. Every spin must carry a role.
    pub fn network_initial_state(&self) -> Result<(StateVector, usize), MoleculeError> {
        let ancilla = self
            .ancilla_index()
            .ok_or(MoleculeError::MissingRole("ancilla"))?;
        let impurity = self
            .impurity_index()
            .ok_or(MoleculeError::MissingRole("impurity"))?;
        let _ = self.mode_index().ok_or(MoleculeError::MissingRole("mode"))?;
        let n = self.n_spins();
        let mut index = 0usize;
        for (i, s) in self.spins.iter().enumerate() {
            let bit = match s.role {
                Some(SpinRole::Ancilla) | Some(SpinRole::Mode) => 0,
                Some(SpinRole::Impurity) => 1,
                Some(SpinRole::Spectator { held }) => held as usize,
                None => return Err(MoleculeError::UnassignedSpin(s.label.clone())),
            };
            index |= bit << (n - 1 - i);
        }
        let _ = impurity;
        Ok((StateVector::basis(n, index), ancilla))
    }

    pub fn to_toml(&self) -> String {
        let cfg = MoleculeConfig::from(self);
        toml::to_string_pretty(&cfg).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, MoleculeError> {
        let cfg: MoleculeConfig =
            toml::from_str(text).map_err(|e| MoleculeError::Parse(e.to_string()))?;
        cfg.build()
    }

    /// Two-spin fixture: enough for a single Ising pair. Roles map the
    /// spins to the impurity and mode qubits.
    pub fn fixture_two_spin() -> Self {
        Molecule::new(
            "fixture-2spin",
            vec![
                Spin {
                    label: "s1".into(),
                    shift_hz: 1200.0,
                    t2_star_s: 1.1,
                    role: Some(SpinRole::Impurity),
                },
                Spin {
                    label: "s2".into(),
                    shift_hz: -3400.0,
                    t2_star_s: 0.8,
                    role: Some(SpinRole::Mode),
                },
            ],
            &[("s1".into(), "s2".into(), 40.0)],
        )
        .expect("fixture is valid")
    }

    /// Three-spin fixture carrying the full ancilla/impurity/mode role map
    /// used by the measurement networks.
    pub fn fixture_three_spin() -> Self {
        Molecule::new(
            "fixture-3spin",
            vec![
                Spin {
                    label: "a".into(),
                    shift_hz: 2500.0,
                    t2_star_s: 0.9,
                    role: Some(SpinRole::Ancilla),
                },
                Spin {
                    label: "q1".into(),
                    shift_hz: -1800.0,
                    t2_star_s: 1.2,
                    role: Some(SpinRole::Impurity),
                },
                Spin {
                    label: "q2".into(),
                    shift_hz: 650.0,
                    t2_star_s: 0.6,
                    role: Some(SpinRole::Mode),
                },
            ],
            &[
                ("a".into(), "q1".into(), 52.0),
                ("a".into(), "q2".into(), 9.0),
                ("q1".into(), "q2".into(), 38.0),
            ],
        )
        .expect("fixture is valid")
    }

    /// Three-spin fixture with one spectator whose coupling to the impurity
    /// is ten times its coupling to the mode spin. Exercises the trade-off
    /// the delay optimizer makes when refocusing is incomplete.
    pub fn fixture_three_spin_spectator() -> Self {
        Molecule::new(
            "fixture-3spin-spectator",
            vec![
                Spin {
                    label: "q1".into(),
                    shift_hz: 1200.0,
                    t2_star_s: 1.1,
                    role: Some(SpinRole::Impurity),
                },
                Spin {
                    label: "q2".into(),
                    shift_hz: -3400.0,
                    t2_star_s: 0.8,
                    role: Some(SpinRole::Mode),
                },
                Spin {
                    label: "sp".into(),
                    shift_hz: 800.0,
                    t2_star_s: 0.5,
                    role: Some(SpinRole::Spectator { held: 1 }),
                },
            ],
            &[
                ("q1".into(), "q2".into(), 40.0),
                ("q1".into(), "sp".into(), 50.0),
                ("q2".into(), "sp".into(), 5.0),
            ],
        )
        .expect("fixture is valid")
    }

    /// Seven-spin fixture: three active spins plus four held spectators,
    /// mirroring the register size the pulse-level verifier must handle.
    pub fn fixture_seven_spin() -> Self {
        let mk = |label: &str, shift: f64, t2: f64, role: Option<SpinRole>| Spin {
            label: label.into(),
            shift_hz: shift,
            t2_star_s: t2,
            role,
        };
        Molecule::new(
            "fixture-7spin",
            vec![
                mk("s1", -4300.0, 0.35, Some(SpinRole::Spectator { held: 1 })),
                mk("s2", -2100.0, 0.55, Some(SpinRole::Spectator { held: 1 })),
                mk("s3", 2500.0, 0.9, Some(SpinRole::Ancilla)),
                mk("s4", -1800.0, 1.2, Some(SpinRole::Impurity)),
                mk("s5", 650.0, 0.6, Some(SpinRole::Mode)),
                mk("s6", 3900.0, 1.5, Some(SpinRole::Spectator { held: 0 })),
                mk("s7", 5200.0, 0.3, Some(SpinRole::Spectator { held: 1 })),
            ],
            &[
                ("s3".into(), "s4".into(), 55.0),
                ("s4".into(), "s5".into(), 42.0),
                ("s3".into(), "s5".into(), 7.0),
                ("s1".into(), "s4".into(), 12.0),
                ("s1".into(), "s2".into(), 34.0),
                ("s2".into(), "s3".into(), 15.0),
                ("s2".into(), "s5".into(), 2.5),
                ("s6".into(), "s5".into(), 8.0),
                ("s6".into(), "s3".into(), 1.2),
                ("s7".into(), "s4".into(), 6.5),
                ("s7".into(), "s6".into(), 19.0),
            ],
        )
        .expect("fixture is valid")
    }
}

/// Serde mirror of the structured text config.
#[derive(Debug, Serialize, Deserialize)]
struct MoleculeConfig {
    name: String,
    spins: Vec<SpinConfig>,
    #[serde(default)]
    couplings: Vec<CouplingConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpinConfig {
    label: String,
    shift_hz: f64,
    t2_star_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    held: Option<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CouplingConfig {
    a: String,
    b: String,
    j_hz: f64,
}

impl MoleculeConfig {
    fn build(self) -> Result<Molecule, MoleculeError> {
        let mut spins = Vec::with_capacity(self.spins.len());
        for sc in self.spins {
            let role = match sc.role.as_deref() {
                None => None,
                Some("ancilla") => Some(SpinRole::Ancilla),
                Some("impurity") => Some(SpinRole::Impurity),
                Some("mode") => Some(SpinRole::Mode),
                Some("spectator") => Some(SpinRole::Spectator {
                    held: sc.held.unwrap_or(0),
                }),
                Some(other) => {
                    return Err(MoleculeError::Parse(format!("unknown role {other:?}")))
                }
            };
            spins.push(Spin {
                label: sc.label,
                shift_hz: sc.shift_hz,
                t2_star_s: sc.t2_star_s,
                role,
            });
        }
        let couplings: Vec<(String, String, f64)> = self
            .couplings
            .into_iter()
            .map(|c| (c.a, c.b, c.j_hz))
            .collect();
        Molecule::new(self.name, spins, &couplings)
    }
}

impl From<&Molecule> for MoleculeConfig {
    fn from(m: &Molecule) -> Self {
        MoleculeConfig {
            name: m.name.clone(),
            spins: m
                .spins
                .iter()
                .map(|s| SpinConfig {
                    label: s.label.clone(),
                    shift_hz: s.shift_hz,
                    t2_star_s: s.t2_star_s,
                    role: s.role.map(|r| {
                        match r {
                            SpinRole::Ancilla => "ancilla",
                            SpinRole::Impurity => "impurity",
                            SpinRole::Mode => "mode",
                            SpinRole::Spectator { .. } => "spectator",
                        }
                        .to_string()
                    }),
                    held: match s.role {
                        Some(SpinRole::Spectator { held }) => Some(held),
                        _ => None,
                    },
                })
                .collect(),
            couplings: (0..m.n_spins())
                .flat_map(|a| ((a + 1)..m.n_spins()).map(move |b| (a, b)))
                .filter(|&(a, b)| m.j_hz[a][b] != 0.0)
                .map(|(a, b)| CouplingConfig {
                    a: m.spins[a].label.clone(),
                    b: m.spins[b].label.clone(),
                    j_hz: m.j_hz[a][b],
                })
                .collect(),
        }
    }
}
