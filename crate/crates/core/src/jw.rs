//! Jordan-Wigner mapping between spinless-fermion mode operators and
//! Pauli strings.
//!
//! Mode numbering: mode 0 is the impurity (operator b), modes 1..n are the
//! conduction modes k₀..k_{n-1}. Mode m maps onto qubit m. The string
//! convention keeps the explicit minus signs on the z-factors,
//!
//!   b = σ₋⁰,   c_{k₀} = (-σ_z⁰)σ₋¹,   c_{k_l} = (∏_{j<l+1} -σ_z^j)σ₋^{l+1},
//!
//! and creation operators use σ₊ in place of σ₋. A logical |0⟩ (spin up)
//! on a qubit means the corresponding mode is occupied; the fermionic
//! vacuum is therefore |11⋯1⟩.

use std::collections::BTreeSet;

use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{Axis, PauliString, PauliSum};

/// Creation or annihilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Create,
    Annihilate,
}

/// A single fermionic mode operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionOp {
    /// 0 = impurity, 1..=n = conduction mode k_{mode-1}.
    pub mode: usize,
    pub kind: OpKind,
}

impl FermionOp {
    pub fn create(mode: usize) -> Self {
        FermionOp {
            mode,
            kind: OpKind::Create,
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        FermionOp {
            mode,
            kind: OpKind::Annihilate,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum JwError {
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
}

/// Map one fermionic operator onto its Pauli-string form (a two-term sum,
/// the expansion of σ∓ times the z-string).
pub fn jw_map(op: FermionOp, n_modes: usize) -> Result<PauliSum, JwError> {
    if op.mode >= n_modes {
        return Err(JwError::ModeOutOfRange {
            mode: op.mode,
            n_modes,
        });
    }
    // (∏_{j<m} -σ_z^j) contributes the string Z…Z and a sign (-1)^m.
    let sign = if op.mode % 2 == 0 { 1.0 } else { -1.0 };
    let zstring =
        PauliString::from_factors((0..op.mode).map(|q| (q, Axis::Z)));
    let ladder = match op.kind {
        OpKind::Create => PauliSum::sigma_plus(op.mode),
        OpKind::Annihilate => PauliSum::sigma_minus(op.mode),
    };
    Ok(PauliSum::from_term(Complex64::new(sign, 0.0), zstring).mul(&ladder))
}

/// An occupation-number basis state of the fermionic register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationState {
    occupied: BTreeSet<usize>,
    n_modes: usize,
}

impl OccupationState {
    pub fn new<I: IntoIterator<Item = usize>>(
        occupied: I,
        n_modes: usize,
    ) -> Result<Self, JwError> {
        let occupied: BTreeSet<usize> = occupied.into_iter().collect();
        if let Some(&m) = occupied.iter().next_back() {
            if m >= n_modes {
                return Err(JwError::ModeOutOfRange { mode: m, n_modes });
            }
        }
        Ok(OccupationState { occupied, n_modes })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        OccupationState {
            occupied: BTreeSet::new(),
            n_modes,
        }
    }

    pub fn occupied(&self) -> &BTreeSet<usize> {
        &self.occupied
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }
}

/// Map an occupation state onto its computational-basis index and the sign
/// accumulated by applying the creation operators in ascending mode order
/// to the mapped vacuum |11⋯1⟩.
///
/// Occupied modes sit at bit value 0 (spin up); qubit 0 is the most
/// significant bit.
pub fn jw_state(occ: &OccupationState) -> (usize, f64) {
    let n = occ.n_modes;
    let mut index = (1usize << n) - 1; // vacuum: all ones
    let mut sign = 1.0;
    let mut placed_below;
    for (k, &mode) in occ.occupied.iter().enumerate() {
        // Applying c†_mode: each -σ_z^j factor (j < mode) contributes -1 on
        // an occupied qubit (|0⟩, σ_z = +1) and +1 on an unoccupied one.
        // In ascending order all k previously placed modes lie below.
        placed_below = k;
        if placed_below % 2 == 1 {
            sign = -sign;
        }
        index &= !(1usize << (n - 1 - mode));
    }
    (index, sign)
}
