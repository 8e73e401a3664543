//! Stabilizer states in the destabilizer/stabilizer tableau form.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. Only generator
//! signs are tracked; the global phase of the state is not.

use std::fmt;

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pauli::{Pauli, PauliString};
use crate::state::{Outcome, QuantumState};

#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    rows: Vec<PauliString>,
}

/// Outcome of a measurement together with whether it was forced by the
/// state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measured {
    pub outcome: Outcome,
    pub deterministic: bool,
}

impl StabilizerTableau {
    /// `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend((0..n).map(|q| PauliString::single(n, q, Pauli::X)));
        rows.extend((0..n).map(|q| PauliString::single(n, q, Pauli::Z)));
        Self { n, rows }
    }

    /// `|+…+⟩`.
    pub fn plus_state(n: usize) -> Self {
        let mut t = Self::new(n);
        for q in 0..n {
            t.apply_gate_unchecked(Gate::H(q));
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.apply_gate_unchecked(gate);
        Ok(())
    }

    fn apply_gate_unchecked(&mut self, gate: Gate) {
        for row in &mut self.rows {
            gate.conjugate(row);
        }
    }

    fn check_observable(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        if !p.is_hermitian() {
            return Err(Error::InvalidObservable(p.to_string()));
        }
        Ok(())
    }

    /// Sign with which `±p` lies in the stabilizer group, if it does.
    fn stabilizer_sign(&self, p: &PauliString) -> Option<Outcome> {
        if self.stabilizers().iter().any(|s| !s.commutes_with(p)) {
            return None;
        }
        let mut acc = PauliString::identity(self.n);
        for (d, s) in self.destabilizers().iter().zip(self.stabilizers()) {
            if !d.commutes_with(p) {
                acc.mul_assign_right(s).expect("rows share the register size");
            }
        }
        debug_assert_eq!(acc.unsigned(), p.unsigned());
        Some(if acc.phase_exponent() == p.phase_exponent() { Outcome::Plus } else { Outcome::Minus })
    }

    /// `⟨p⟩ ∈ {−1, 0, +1}`; the state is not modified.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        self.check_observable(p)?;
        Ok(self.stabilizer_sign(p).map_or(0, Outcome::sign))
    }

    /// Probability of the `+1` outcome: 0, 1/2 or 1.
    pub fn probability_plus(&self, p: &PauliString) -> Result<f64> {
        Ok(match self.expectation(p)? {
            1 => 1.0,
            -1 => 0.0,
            _ => 0.5,
        })
    }

    /// Measures `p`, calling `coin` only when the outcome is random.
    pub fn measure_with(
        &mut self,
        p: &PauliString,
        coin: impl FnOnce() -> bool,
    ) -> Result<Measured> {
        self.check_observable(p)?;
        let n = self.n;
        let Some(pivot) = (n..2 * n).find(|&r| !self.rows[r].commutes_with(p)) else {
            let outcome = self.stabilizer_sign(p).expect("commutes with every stabilizer");
            return Ok(Measured { outcome, deterministic: true });
        };
        let outcome = Outcome::from_bit(coin());
        let pivot_row = self.rows[pivot].clone();
        for r in 0..2 * n {
            if r != pivot && r != pivot - n && !self.rows[r].commutes_with(p) {
                self.rows[r].mul_assign_right(&pivot_row)?;
            }
        }
        self.rows[pivot - n] = pivot_row;
        let mut new_stab = p.clone();
        if outcome == Outcome::Minus {
            new_stab.negate();
        }
        self.rows[pivot] = new_stab;
        Ok(Measured { outcome, deterministic: false })
    }

    /// Projects onto the `outcome` eigenspace of `p` and returns its
    /// probability. Fails when that probability is zero.
    pub fn postselect(&mut self, p: &PauliString, outcome: Outcome) -> Result<f64> {
        let m = self.measure_with(p, || outcome.bit())?;
        if m.outcome != outcome {
            return Err(Error::ImpossibleOutcome);
        }
        Ok(if m.deterministic { 1.0 } else { 0.5 })
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Measured> {
        self.measure_with(p, || rng.random::<bool>())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        for row in &mut self.rows {
            if !row.commutes_with(p) {
                row.negate();
            }
        }
        Ok(())
    }

    /// Whether both tableaux describe the same state (same stabilizer group
    /// with the same signs).
    pub fn same_state(&self, other: &StabilizerTableau) -> bool {
        self.n == other.n
            && other.stabilizers().iter().all(|s| self.stabilizer_sign(s) == Some(Outcome::Plus))
    }

    /// `self ⊗ other`, with `other` on the high qubits.
    pub fn tensor(&self, other: &StabilizerTableau) -> StabilizerTableau {
        let n = self.n + other.n;
        let low: Vec<usize> = (0..self.n).collect();
        let high: Vec<usize> = (self.n..n).collect();
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend(self.destabilizers().iter().map(|r| r.embed(n, &low)));
        rows.extend(other.destabilizers().iter().map(|r| r.embed(n, &high)));
        rows.extend(self.stabilizers().iter().map(|r| r.embed(n, &low)));
        rows.extend(other.stabilizers().iter().map(|r| r.embed(n, &high)));
        StabilizerTableau { n, rows }
    }

    /// Relabels qubits: old qubit `q` becomes `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<StabilizerTableau> {
        check_permutation(perm, self.n)?;
        let rows = self.rows.iter().map(|r| r.embed(self.n, perm)).collect();
        Ok(StabilizerTableau { n: self.n, rows })
    }

    /// Checks the commutation structure, Hermiticity and independence of the
    /// generators.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for (i, r) in self.rows.iter().enumerate() {
            if !r.is_hermitian() {
                return Err(format!("row {i} has imaginary phase: {r}"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (d, s) = (&self.rows[i], &self.rows[n + j]);
                if j > i && !s.commutes_with(&self.rows[n + i]) {
                    return Err(format!("stabilizers {i} and {j} anticommute"));
                }
                if j > i && !d.commutes_with(&self.rows[j]) {
                    return Err(format!("destabilizers {i} and {j} anticommute"));
                }
                let should_commute = i != j;
                if d.commutes_with(s) != should_commute {
                    return Err(format!("destabilizer {i} / stabilizer {j} pairing broken"));
                }
            }
        }
        if symplectic_rank(self.stabilizers()) != n {
            return Err("stabilizer generators are dependent".into());
        }
        Ok(())
    }

    /// Flips the sign of one stabilizer generator. Only meant for exercising
    /// the oracle checks with a deliberately broken state.
    pub fn corrupt_sign(&mut self, generator: usize) {
        let n = self.n;
        self.rows[n + generator].negate();
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// GF(2) rank of the rows' `(x | z)` vectors.
pub fn symplectic_rank(rows: &[PauliString]) -> usize {
    let mut vecs: Vec<(BitString, BitString)> =
        rows.iter().map(|r| (r.x_bits().clone(), r.z_bits().clone())).collect();
    let n = rows.first().map_or(0, |r| r.num_qubits());
    let mut rank = 0;
    for col in 0..2 * n {
        let bit = |v: &(BitString, BitString)| {
            if col < n {
                v.0.get(col)
            } else {
                v.1.get(col - n)
            }
        };
        let Some(p) = (rank..vecs.len()).find(|&r| bit(&vecs[r])) else { continue };
        vecs.swap(rank, p);
        let pivot = vecs[rank].clone();
        for (r, v) in vecs.iter_mut().enumerate() {
            if r != rank && bit(v) {
                v.0.xor_assign(&pivot.0);
                v.1.xor_assign(&pivot.1);
            }
        }
        rank += 1;
    }
    rank
}

impl QuantumState for StabilizerTableau {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        StabilizerTableau::apply_gate(self, gate)
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        StabilizerTableau::apply_pauli(self, p)
    }

    fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Outcome> {
        Ok(self.measure(p, rng)?.outcome)
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "StabilizerTableau({} qubits)", self.n)?;
        for s in self.stabilizers() {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_on_zero_is_stabilized_by_x() {
        let mut t = StabilizerTableau::new(1);
        t.apply_gate(Gate::H(0)).unwrap();
        assert_eq!(t.expectation(&p("X")).unwrap(), 1);
        assert_eq!(t.expectation(&p("Z")).unwrap(), 0);
    }

    #[test]
    fn cz_on_plus_plus() {
        let mut t = StabilizerTableau::plus_state(2);
        t.apply_gate(Gate::Cz(0, 1)).unwrap();
        assert_eq!(t.expectation(&p("XZ")).unwrap(), 1);
        assert_eq!(t.expectation(&p("ZX")).unwrap(), 1);
        assert_eq!(t.expectation(&p("YY")).unwrap(), 1);
        t.check_invariants().unwrap();
    }

    #[test]
    fn out_of_range_gate() {
        let mut t = StabilizerTableau::new(2);
        assert!(matches!(t.apply_gate(Gate::H(2)), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(t.apply_gate(Gate::Cz(1, 1)), Err(Error::RepeatedTarget(1))));
    }

    #[test]
    fn imaginary_observable_rejected() {
        let mut t = StabilizerTableau::new(1);
        let mut rng = SeedStream::new(1).trial(0);
        assert!(matches!(t.measure(&p("iX"), &mut rng), Err(Error::InvalidObservable(_))));
    }

    #[test]
    fn deterministic_measurement_leaves_state_alone() {
        let mut t = StabilizerTableau::plus_state(3);
        t.apply_gate(Gate::Cz(0, 1)).unwrap();
        t.apply_gate(Gate::Cz(1, 2)).unwrap();
        let before = t.clone();
        let mut rng = SeedStream::new(9).trial(0);
        let m = t.measure(&p("ZXZ"), &mut rng).unwrap();
        assert!(m.deterministic);
        assert_eq!(m.outcome, Outcome::Plus);
        assert_eq!(t, before);
        let m = t.measure(&p("-ZXZ"), &mut rng).unwrap();
        assert_eq!(m.outcome, Outcome::Minus);
        assert_eq!(t, before);
    }

    #[test]
    fn x_on_zero_is_fair() {
        let stream = SeedStream::new(2024);
        let shots = 10_000;
        let plus = (0..shots)
            .filter(|&i| {
                let mut t = StabilizerTableau::new(1);
                let mut rng = stream.trial(i);
                t.measure(&p("X"), &mut rng).unwrap().outcome == Outcome::Plus
            })
            .count() as f64;
        let sigma = (0.25f64 / shots as f64).sqrt();
        assert!((plus / shots as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn postselection_and_repeat() {
        let mut t = StabilizerTableau::new(2);
        t.apply_gate(Gate::H(0)).unwrap();
        t.apply_gate(Gate::Cnot(0, 1)).unwrap();
        assert_eq!(t.postselect(&p("ZI"), Outcome::Minus).unwrap(), 0.5);
        assert_eq!(t.expectation(&p("IZ")).unwrap(), -1);
        assert!(t.postselect(&p("IZ"), Outcome::Plus).is_err());
        t.check_invariants().unwrap();
    }

    #[test]
    fn tensor_and_permute() {
        let mut a = StabilizerTableau::new(1);
        a.apply_gate(Gate::H(0)).unwrap();
        let b = StabilizerTableau::new(1);
        let t = a.tensor(&b);
        assert_eq!(t.expectation(&p("XI")).unwrap(), 1);
        assert_eq!(t.expectation(&p("IZ")).unwrap(), 1);
        let swapped = t.permute_qubits(&[1, 0]).unwrap();
        assert_eq!(swapped.expectation(&p("IX")).unwrap(), 1);
        assert_eq!(swapped.expectation(&p("ZI")).unwrap(), 1);
        swapped.check_invariants().unwrap();
        assert!(t.permute_qubits(&[0, 0]).is_err());
    }

    #[test]
    fn apply_pauli_flips_anticommuting_signs() {
        let mut t = StabilizerTableau::new(2);
        t.apply_pauli(&p("XI")).unwrap();
        assert_eq!(t.expectation(&p("ZI")).unwrap(), -1);
        assert_eq!(t.expectation(&p("IZ")).unwrap(), 1);
    }
}
