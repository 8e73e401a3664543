//! Phased Pauli strings in symplectic form.
//!
//! An operator is `i^phase · P_0 ⊗ … ⊗ P_{n-1}` where qubit `j` carries
//! `I`, `X`, `Z` or `Y` according to the bit pair `(x_j, z_j)`. `Y` is the
//! Hermitian Pauli-Y (not `XZ`), so Hermitian strings have even phase.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Single-qubit Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Power of `i` multiplying a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(e: u8) -> Self {
        match e & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn is_real(self) -> bool {
        self.exponent().is_multiple_of(2)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    x: BitString,
    z: BitString,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { x: BitString::zeros(n), z: BitString::zeros(n), phase: 0 }
    }

    pub fn from_parts(x: BitString, z: BitString, phase: Phase) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: z.len() });
        }
        Ok(Self { x, z, phase: phase.exponent() })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut out = Self::identity(n);
        out.set(qubit, p);
        out
    }

    /// Product of `kind` over the listed qubits.
    pub fn on(n: usize, qubits: impl IntoIterator<Item = usize>, kind: Pauli) -> Self {
        let mut out = Self::identity(n);
        for q in qubits {
            out.set(q, kind);
        }
        out
    }

    /// `Z^u`: a Z on every qubit where `pattern` has a one.
    pub fn z_pattern(pattern: &BitString) -> Self {
        Self { x: BitString::zeros(pattern.len()), z: pattern.clone(), phase: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitString {
        &self.x
    }

    pub fn z_bits(&self) -> &BitString {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        Phase::from_exponent(self.phase)
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase.exponent();
    }

    pub(crate) fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `true` for a leading minus sign on a Hermitian string.
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn negate(&mut self) {
        self.phase ^= 2;
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.negate();
        out
    }

    /// Same operator with the phase dropped.
    pub fn unsigned(&self) -> Self {
        Self { x: self.x.clone(), z: self.z.clone(), phase: 0 }
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub(crate) fn x_mut(&mut self) -> &mut BitString {
        &mut self.x
    }

    pub(crate) fn z_mut(&mut self) -> &mut BitString {
        &mut self.z
    }

    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| self.x.get(q) || self.z.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Parity of the symplectic inner product.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.num_qubits(), other.num_qubits());
        let mut acc = 0u32;
        for ((x1, z1), (x2, z2)) in self
            .x
            .words()
            .iter()
            .zip(self.z.words())
            .zip(other.x.words().iter().zip(other.z.words()))
        {
            acc ^= ((x1 & z2) ^ (z1 & x2)).count_ones() & 1;
        }
        acc == 0
    }

    /// `self ← self · rhs`, phase exact.
    pub fn mul_assign_right(&mut self, rhs: &PauliString) -> Result<()> {
        if self.num_qubits() != rhs.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                found: rhs.num_qubits(),
            });
        }
        // Per-lane mod-4 counters of the i-exponent picked up at each qubit.
        let mut cnt1 = 0u64;
        let mut cnt2 = 0u64;
        let xs = self.x.words_mut();
        let zs = self.z.words_mut();
        for (((x1, z1), &x2), &z2) in
            xs.iter_mut().zip(zs.iter_mut()).zip(rhs.x.words()).zip(rhs.z.words())
        {
            let old_x1 = *x1;
            let old_z1 = *z1;
            *x1 ^= x2;
            *z1 ^= z2;
            let x1z2 = old_x1 & z2;
            let anti = (x2 & old_z1) ^ x1z2;
            cnt2 ^= (cnt1 ^ *x1 ^ *z1 ^ x1z2) & anti;
            cnt1 ^= anti;
        }
        let log_i = (cnt1.count_ones() + 2 * cnt2.count_ones()) as u8;
        self.phase = (self.phase + rhs.phase + log_i) & 3;
        Ok(())
    }

    /// The operator product `self · rhs`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        let mut out = self.clone();
        out.mul_assign_right(rhs)?;
        Ok(out)
    }

    /// Pauli on the qubits `positions` (in that order).
    pub fn restrict(&self, positions: &[usize]) -> PauliString {
        Self { x: self.x.restrict(positions), z: self.z.restrict(positions), phase: self.phase }
    }

    /// Embeds `self` into `n` qubits, qubit `k` going to `positions[k]`.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliString {
        let mut out = PauliString::identity(n);
        for (k, &p) in positions.iter().enumerate() {
            out.set(p, self.get(k));
        }
        out.phase = self.phase;
        out
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs).expect("pauli strings of equal length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `XZI`, `+XZI`, `-iYY`, `+iZ` …
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mut phase, rest) = if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0u8, r)
        } else {
            (0u8, s)
        };
        let rest = if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            r
        } else {
            rest
        };
        let mut out = PauliString::identity(rest.chars().count());
        for (q, c) in rest.chars().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' | '_' | '.' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::parse(0, format!("invalid Pauli symbol {other:?}"))),
            };
            out.set(q, p);
        }
        out.phase = phase & 3;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        assert_eq!(&p("XI") * &p("ZI"), p("-iYI"));
        assert_eq!(&p("Z") * &p("X"), p("+iY"));
    }

    #[test]
    fn involution() {
        let g = p("XZZI");
        let sq = &g * &g;
        assert!(sq.is_identity());
        assert_eq!(sq.phase(), Phase::PlusOne);
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XZZII", "-YI", "+iZZ", "-iXYZ"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn commutation() {
        assert!(!p("XI").commutes_with(&p("ZI")));
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(p("XZ").commutes_with(&p("ZX")));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(matches!(
            p("XX").multiply(&p("X")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let n = 130;
        let a = PauliString::on(n, [0, 64, 129], Pauli::X);
        let b = PauliString::on(n, [0, 64, 129], Pauli::Z);
        // (XZ)^3 = (-iY)^3 = i Y^3
        let c = &a * &b;
        assert_eq!(c.phase(), Phase::PlusI);
        assert!(!a.commutes_with(&b));
    }
}
