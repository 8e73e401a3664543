//! Behaviour shared by the stabilizer and dense simulators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gates::Gate;
use crate::pauli::PauliString;

/// Result of a Pauli measurement. Recorded as a bit: `0 ↔ +1`, `1 ↔ −1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }

    pub fn bit(self) -> bool {
        self == Outcome::Minus
    }

    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// A simulated register that supports Clifford gates, Pauli errors and
/// projective Pauli measurements.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;

    fn apply_gate(&mut self, gate: Gate) -> Result<()>;

    fn apply_gates(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()>;

    /// Projective measurement of a Hermitian Pauli observable.
    fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Outcome>;
}
