//! Clifford gates and their action on Pauli strings by conjugation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cz(usize, usize),
    /// Control, target.
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                (q, None)
            }
            Gate::Cz(a, b) | Gate::Cnot(a, b) => (a, Some(b)),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        if a >= n {
            return Err(Error::IndexOutOfRange { index: a, n });
        }
        if let Some(b) = b {
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            if a == b {
                return Err(Error::RepeatedTarget(a));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    /// `p ← G p G†`. Indices must already be validated.
    pub fn conjugate(&self, p: &mut PauliString) {
        let flip = match *self {
            Gate::H(q) => {
                let (x, z) = (p.x_bits().get(q), p.z_bits().get(q));
                p.x_mut().set(q, z);
                p.z_mut().set(q, x);
                x && z
            }
            Gate::S(q) => {
                let (x, z) = (p.x_bits().get(q), p.z_bits().get(q));
                p.z_mut().set(q, z ^ x);
                x && z
            }
            Gate::Sdg(q) => {
                let (x, z) = (p.x_bits().get(q), p.z_bits().get(q));
                p.z_mut().set(q, z ^ x);
                x && !z
            }
            Gate::X(q) => p.z_bits().get(q),
            Gate::Z(q) => p.x_bits().get(q),
            Gate::Y(q) => p.x_bits().get(q) ^ p.z_bits().get(q),
            Gate::Cz(a, b) => {
                let (xa, za) = (p.x_bits().get(a), p.z_bits().get(a));
                let (xb, zb) = (p.x_bits().get(b), p.z_bits().get(b));
                p.z_mut().set(a, za ^ xb);
                p.z_mut().set(b, zb ^ xa);
                xa && xb && (za ^ zb)
            }
            Gate::Cnot(c, t) => {
                let (xc, zc) = (p.x_bits().get(c), p.z_bits().get(c));
                let (xt, zt) = (p.x_bits().get(t), p.z_bits().get(t));
                p.x_mut().set(t, xt ^ xc);
                p.z_mut().set(c, zc ^ zt);
                xc && zt && !(xt ^ zc)
            }
        };
        if flip {
            p.negate();
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Y(q) => write!(f, "Y {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Cnot(a, b) => write!(f, "CNOT {a} {b}"),
        }
    }
}

/// Uniformly random gate sequence over the generating set, for property tests
/// and oracle checks.
pub fn random_clifford_circuit<R: rand::Rng + ?Sized>(
    n: usize,
    depth: usize,
    rng: &mut R,
) -> Vec<Gate> {
    (0..depth)
        .map(|_| {
            let kinds = if n > 1 { 8 } else { 6 };
            let a = rng.random_range(0..n);
            let mut b = if n > 1 { rng.random_range(0..n - 1) } else { 0 };
            if b >= a {
                b += 1;
            }
            match rng.random_range(0..kinds) {
                0 => Gate::H(a),
                1 => Gate::S(a),
                2 => Gate::Sdg(a),
                3 => Gate::X(a),
                4 => Gate::Y(a),
                5 => Gate::Z(a),
                6 => Gate::Cz(a, b),
                _ => Gate::Cnot(a, b),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj(g: Gate, s: &str) -> String {
        let mut p: PauliString = s.parse().unwrap();
        g.conjugate(&mut p);
        p.to_string()
    }

    #[test]
    fn single_qubit_tables() {
        assert_eq!(conj(Gate::H(0), "X"), "+Z");
        assert_eq!(conj(Gate::H(0), "Y"), "-Y");
        assert_eq!(conj(Gate::S(0), "X"), "+Y");
        assert_eq!(conj(Gate::S(0), "Y"), "-X");
        assert_eq!(conj(Gate::Sdg(0), "X"), "-Y");
        assert_eq!(conj(Gate::Sdg(0), "Y"), "+X");
        assert_eq!(conj(Gate::X(0), "Z"), "-Z");
        assert_eq!(conj(Gate::Y(0), "X"), "-X");
    }

    #[test]
    fn two_qubit_tables() {
        assert_eq!(conj(Gate::Cz(0, 1), "XI"), "+XZ");
        assert_eq!(conj(Gate::Cz(0, 1), "YX"), "-XY");
        assert_eq!(conj(Gate::Cnot(0, 1), "XI"), "+XX");
        assert_eq!(conj(Gate::Cnot(0, 1), "XZ"), "-YY");
        assert_eq!(conj(Gate::Cnot(0, 1), "IZ"), "+ZZ");
    }

    #[test]
    fn validation() {
        assert!(Gate::Cz(1, 1).validate(3).is_err());
        assert!(Gate::H(3).validate(3).is_err());
        assert!(Gate::Cnot(0, 2).validate(3).is_ok());
    }
}
