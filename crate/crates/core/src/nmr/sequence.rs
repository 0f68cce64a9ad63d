//! Timed pulse sequences.
//!
//! A sequence is an ordered list of RF pulses, free-evolution delays and
//! virtual z-rotations over the spins of one molecule. Virtual z gates
//! cost no time; they advance the reference phase frame of their spin and
//! every later pulse on that spin is emitted with its phase shifted
//! accordingly. The frame table is derived from the event list, so it can
//! never drift out of sync with the history.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum PulseEvent {
    /// RF pulse: rotation by 2·amplitude·duration about the axis at
    /// `phase` in the x-y plane (amplitude in rad/s).
    Pulse {
        spin: usize,
        phase: f64,
        amplitude: f64,
        duration: f64,
    },
    /// Free evolution under the internal Hamiltonian.
    Delay { duration: f64 },
    /// Zero-duration reference-frame advance.
    VirtualZ { spin: usize, angle: f64 },
}

impl PulseEvent {
    pub fn duration(&self) -> f64 {
        match self {
            PulseEvent::Pulse { duration, .. } | PulseEvent::Delay { duration } => *duration,
            PulseEvent::VirtualZ { .. } => 0.0,
        }
    }
}

/// Compile metadata for one Ising block: where its two delay segments live
/// in the event list, which pair it couples and which spin is flipped.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingBlock {
    pub target: (usize, usize),
    pub flip: usize,
    /// Indices of the Delay events forming segment 1 / segment 2.
    pub seg1_delays: Vec<usize>,
    pub seg2_delays: Vec<usize>,
    /// Event index span [start, end) of the whole block.
    pub span: (usize, usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum SequenceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("event references spin {spin}, register has {n_spins}")]
    SpinOutOfRange { spin: usize, n_spins: usize },
    #[error("negative duration {0}")]
    NegativeDuration(f64),
}

/// An ordered, timed event list over a named spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    spins: Vec<String>,
    events: Vec<PulseEvent>,
    /// Ising-block metadata (compile output; not serialized).
    pub(crate) blocks: Vec<IsingBlock>,
    /// Residual-coupling objective estimated at compile time.
    pub residual_coupling_error: f64,
}

impl PulseSequence {
    pub fn new(spins: Vec<String>) -> Self {
        PulseSequence {
            spins,
            events: Vec::new(),
            blocks: Vec::new(),
            residual_coupling_error: 0.0,
        }
    }

    pub fn spins(&self) -> &[String] {
        &self.spins
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub(crate) fn events_mut(&mut self) -> &mut [PulseEvent] {
        &mut self.events
    }

    pub fn blocks(&self) -> &[IsingBlock] {
        &self.blocks
    }

    pub fn push(&mut self, event: PulseEvent) -> Result<usize, SequenceError> {
        match &event {
            PulseEvent::Pulse { spin, duration, .. } => {
                self.check_spin(*spin)?;
                self.check_duration(*duration)?;
            }
            PulseEvent::Delay { duration } => self.check_duration(*duration)?,
            PulseEvent::VirtualZ { spin, .. } => self.check_spin(*spin)?,
        }
        self.events.push(event);
        Ok(self.events.len() - 1)
    }

    fn check_spin(&self, spin: usize) -> Result<(), SequenceError> {
        if spin >= self.spins.len() {
            Err(SequenceError::SpinOutOfRange {
                spin,
                n_spins: self.spins.len(),
            })
        } else {
            Ok(())
        }
    }

    fn check_duration(&self, d: f64) -> Result<(), SequenceError> {
        if d < 0.0 || !d.is_finite() {
            Err(SequenceError::NegativeDuration(d))
        } else {
            Ok(())
        }
    }

    /// Total wall-clock duration (virtual z gates are free).
    pub fn total_duration(&self) -> f64 {
        self.events.iter().map(PulseEvent::duration).sum()
    }

    pub fn pulse_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, PulseEvent::Pulse { .. }))
            .count()
    }

    pub fn ising_block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Accumulated reference-frame angle per spin, derived from the
    /// virtual-z history.
    pub fn frame(&self) -> Vec<f64> {
        let mut frame = vec![0.0; self.spins.len()];
        for e in &self.events {
            if let PulseEvent::VirtualZ { spin, angle } = e {
                frame[*spin] += angle;
            }
        }
        frame
    }

    /// Frame angles accumulated strictly before event `index`.
    pub fn frame_before(&self, index: usize) -> Vec<f64> {
        let mut frame = vec![0.0; self.spins.len()];
        for e in &self.events[..index.min(self.events.len())] {
            if let PulseEvent::VirtualZ { spin, angle } = e {
                frame[*spin] += angle;
            }
        }
        frame
    }

    /// Line-oriented timed-event format: a `spins` header then one event
    /// per line (`pulse`, `delay` or `vz`).
    pub fn to_text(&self) -> String {
        let mut out = String::from("# pulse sequence v1\n");
        out.push_str(&format!("spins {}\n", self.spins.join(" ")));
        for e in &self.events {
            match e {
                PulseEvent::Pulse {
                    spin,
                    phase,
                    amplitude,
                    duration,
                } => out.push_str(&format!(
                    "pulse {} {:.17e} {:.17e} {:.17e}\n",
                    self.spins[*spin], phase, amplitude, duration
                )),
                PulseEvent::Delay { duration } => {
                    out.push_str(&format!("delay {:.17e}\n", duration))
                }
                PulseEvent::VirtualZ { spin, angle } => out.push_str(&format!(
                    "vz {} {:.17e}\n",
                    self.spins[*spin], angle
                )),
            }
        }
        out
    }

    /// Parse the text form. Block metadata is compile-time information and
    /// is not reconstructed.
    pub fn from_text(text: &str) -> Result<Self, SequenceError> {
        let mut seq: Option<PulseSequence> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| SequenceError::Parse { line: n, message };
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty");
            if head == "spins" {
                if seq.is_some() {
                    return Err(parse_err("duplicate spins header".into()));
                }
                seq = Some(PulseSequence::new(parts.map(str::to_owned).collect()));
                continue;
            }
            let seq_ref = seq
                .as_mut()
                .ok_or_else(|| parse_err("event before spins header".into()))?;
            let number = |field: &str, tok: Option<&str>| -> Result<f64, SequenceError> {
                tok.ok_or_else(|| SequenceError::Parse {
                    line: n,
                    message: format!("missing {field}"),
                })?
                .parse()
                .map_err(|e| SequenceError::Parse {
                    line: n,
                    message: format!("bad {field}: {e}"),
                })
            };
            match head {
                "pulse" => {
                    let label = parts.next().ok_or_else(|| SequenceError::Parse {
                        line: n,
                        message: "missing spin".into(),
                    })?;
                    let spin = seq_ref
                        .spins
                        .iter()
                        .position(|s| s == label)
                        .ok_or_else(|| SequenceError::Parse {
                            line: n,
                            message: format!("unknown spin {label:?}"),
                        })?;
                    let phase = number("phase", parts.next())?;
                    let amplitude = number("amplitude", parts.next())?;
                    let duration = number("duration", parts.next())?;
                    seq_ref.push(PulseEvent::Pulse {
                        spin,
                        phase,
                        amplitude,
                        duration,
                    })?;
                }
                "delay" => {
                    let duration = number("duration", parts.next())?;
                    seq_ref.push(PulseEvent::Delay { duration })?;
                }
                "vz" => {
                    let label = parts.next().ok_or_else(|| SequenceError::Parse {
                        line: n,
                        message: "missing spin".into(),
                    })?;
                    let spin = seq_ref
                        .spins
                        .iter()
                        .position(|s| s == label)
                        .ok_or_else(|| SequenceError::Parse {
                            line: n,
                            message: format!("unknown spin {label:?}"),
                        })?;
                    let angle = number("angle", parts.next())?;
                    seq_ref.push(PulseEvent::VirtualZ { spin, angle })?;
                }
                other => return Err(parse_err(format!("unknown event {other:?}"))),
            }
        }
        seq.ok_or(SequenceError::Parse {
            line: 0,
            message: "missing spins header".into(),
        })
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
