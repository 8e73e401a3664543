use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dense::{DenseState, DensityMatrix};
use crate::error::{Error, Result};
use crate::noise::NoiseChannel;
use crate::pauli::{Pauli, PauliString};
use crate::rng::{par_map, SeedStream};
use crate::state::{Outcome, QuantumState};
use crate::stats::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeKind {
    /// `[[5,1,3]]`, corrects any single-qubit Pauli.
    FiveQubit,
    /// Three-qubit repetition code in the X basis; corrects one Z.
    PhaseFlip,
}

/// A small stabilizer code with a weight-one lookup decoder.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    kind: CodeKind,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    lookup: HashMap<u64, PauliString>,
    zero_l: DenseState<f64>,
    one_l: DenseState<f64>,
}

fn paulis(list: &[&str]) -> Vec<PauliString> {
    list.iter().map(|s| s.parse().expect("literal Pauli")).collect()
}

impl StabilizerCode {
    pub fn new(kind: CodeKind) -> Result<Self> {
        let (generators, logical_x, logical_z, kinds): (Vec<PauliString>, PauliString, PauliString, &[Pauli]) = match kind {
            CodeKind::FiveQubit => (
                paulis(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]),
                "XXXXX".parse()?,
                "ZZZZZ".parse()?,
                &[Pauli::X, Pauli::Y, Pauli::Z],
            ),
            CodeKind::PhaseFlip => (paulis(&["XXI", "IXX"]), "ZZZ".parse()?, "XXX".parse()?, &[Pauli::Z]),
        };
        let n = logical_x.num_qubits();

        let mut lookup = HashMap::new();
        lookup.insert(0, PauliString::identity(n));
        for q in 0..n {
            for &k in kinds {
                let e = PauliString::single(n, q, k);
                let s = syndrome_of(&generators, &e);
                if lookup.insert(s, e).is_some() {
                    return Err(Error::InvalidParameter(format!("{kind:?}: ambiguous syndrome {s:b}")));
                }
            }
        }

        let mut zero_l = None;
        for start in [DenseState::zero(n)?, DenseState::plus(n)?] {
            let mut s = start;
            for g in generators.iter().chain([&logical_z]) {
                s.apply_projector(g, Outcome::Plus)?;
            }
            if s.norm_sqr() > 1e-6 {
                s.normalize();
                zero_l = Some(s);
                break;
            }
        }
        let zero_l = zero_l.ok_or_else(|| Error::InvalidParameter(format!("{kind:?}: empty code space")))?;
        let one_l = zero_l.pauli_image(&logical_x)?;
        Ok(Self { kind, generators, logical_x, logical_z, lookup, zero_l, one_l })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn num_qubits(&self) -> usize {
        self.zero_l.num_qubits()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    /// Errors the lookup decoder corrects, identity included.
    pub fn correctable_errors(&self) -> impl Iterator<Item = &PauliString> {
        self.lookup.values()
    }

    pub fn encode(&self, psi: &DenseState<f64>) -> Result<DenseState<f64>> {
        if psi.num_qubits() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: psi.num_qubits() });
        }
        let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
        let amps = self.zero_l.amplitudes().iter().zip(self.one_l.amplitudes()).map(|(z, o)| a * z + b * o).collect();
        DenseState::from_amplitudes(amps)
    }

    /// Measures every generator, then applies the table correction.
    pub fn correct<R: rand::Rng + ?Sized>(&self, state: &mut DenseState<f64>, rng: &mut R) -> Result<BitString> {
        let mut syndrome = BitString::zeros(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            syndrome.set(i, state.measure_pauli(g, rng)? == Outcome::Minus);
        }
        if let Some(fix) = self.lookup.get(&syndrome.to_u64()) {
            state.apply_pauli(fix)?;
        }
        Ok(syndrome)
    }

    /// Projects onto the code space and reads off the logical qubit.
    pub fn decode(&self, state: &DenseState<f64>) -> Result<DenseState<f64>> {
        let a = self.zero_l.inner(state)?;
        let b = self.one_l.inner(state)?;
        let mut out = DenseState::from_amplitudes(vec![a, b])?;
        if out.normalize() < 1e-12 {
            return Err(Error::ImpossibleOutcome);
        }
        Ok(out)
    }

    /// Whether `e` followed by the decoder's correction acts trivially on
    /// the code space.
    pub fn corrects(&self, e: &PauliString) -> Result<bool> {
        let s = syndrome_of(&self.generators, e);
        let Some(fix) = self.lookup.get(&s) else {
            return Ok(false);
        };
        let residual = e.multiply(fix)?;
        Ok(residual.commutes_with(&self.logical_x) && residual.commutes_with(&self.logical_z))
    }
}

fn syndrome_of(generators: &[PauliString], e: &PauliString) -> u64 {
    generators.iter().enumerate().fold(0, |acc, (i, g)| acc | (u64::from(!g.commutes_with(e)) << i))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub code: CodeKind,
    pub num_qubits: usize,
    pub shots: u64,
    pub mean_fidelity: f64,
    pub mean_infidelity: f64,
    /// Standard error of `mean_infidelity`.
    pub infidelity_sigma: f64,
    pub min_fidelity: f64,
    /// Projective measurement onto the original witness.
    pub verifier_accept: Estimate,
    /// `½‖ρ̄ − |ψ⟩⟨ψ|‖₁` for the shot-averaged decoded state.
    pub trace_distance: f64,
    /// Every error in the decoder's table is undone exactly.
    pub weight_one_corrected: bool,
    /// Exact probability the channel produces an error of weight ≥ 2.
    pub weight_ge2_mass: f64,
    /// Exact probability the decoder leaves a logical error.
    pub failure_mass: f64,
}

/// Exact distribution of the channel's error on `n` qubits, phases dropped.
fn error_distribution(channel: &NoiseChannel, n: usize) -> Result<Vec<(PauliString, f64)>> {
    let (px, py, pz) = channel.probabilities();
    let single = [(Pauli::I, 1.0 - px - py - pz), (Pauli::X, px), (Pauli::Y, py), (Pauli::Z, pz)];
    let none = 1.0 - channel.events().iter().map(|e| e.probability).sum::<f64>();
    let mut out = Vec::new();
    for idx in 0..4usize.pow(n as u32) {
        let mut p = PauliString::identity(n);
        let mut prob = 1.0;
        for q in 0..n {
            let (k, pk) = single[idx / 4usize.pow(q as u32) % 4];
            p.set(q, k);
            prob *= pk;
        }
        if prob == 0.0 {
            continue;
        }
        out.push((p.clone(), prob * none));
        for e in channel.events() {
            if e.pauli.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.pauli.num_qubits() });
            }
            out.push((p.multiply(&e.pauli)?.unsigned(), prob * e.probability));
        }
    }
    Ok(out)
}

/// Encodes `witness`, sends it through `channel`, corrects, decodes and
/// compares against the original.
pub fn theorem1_demo(
    kind: CodeKind,
    channel: &NoiseChannel,
    witness: &DenseState<f64>,
    shots: u64,
    stream: SeedStream,
) -> Result<Theorem1Report> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let code = StabilizerCode::new(kind)?;
    let n = code.num_qubits();
    let encoded = code.encode(witness)?;

    let mut weight_one_corrected = true;
    for e in code.correctable_errors() {
        let mut s = encoded.clone();
        s.apply_pauli(e)?;
        code.correct(&mut s, &mut stream.trial(u64::MAX))?;
        weight_one_corrected &= code.decode(&s)?.fidelity(witness)? > 1.0 - 1e-12;
    }

    let (mut weight_ge2_mass, mut failure_mass) = (0.0, 0.0);
    for (e, p) in error_distribution(channel, n)? {
        if e.weight() >= 2 {
            weight_ge2_mass += p;
        }
        if !code.corrects(&e)? {
            failure_mass += p;
        }
    }

    let decoded = par_map(shots, stream, |_, rng| {
        let mut s = encoded.clone();
        s.apply_pauli(&channel.sample_error(n, rng)?)?;
        code.correct(&mut s, rng)?;
        let d = code.decode(&s)?;
        let f = d.fidelity(witness)?;
        let accept = rand::Rng::random::<f64>(rng) < f;
        Ok((d, f, accept))
    })?;

    let mut rho = DensityMatrix::zeros(1)?;
    let (mut sum, mut sum_sq, mut min_fidelity, mut accepts) = (0.0, 0.0, 1.0f64, 0u64);
    let weight = 1.0 / shots as f64;
    for (d, f, accept) in &decoded {
        rho.add_pure(d, weight)?;
        let inf = 1.0 - f;
        sum += inf;
        sum_sq += inf * inf;
        min_fidelity = min_fidelity.min(*f);
        accepts += u64::from(*accept);
    }
    let mean = sum / shots as f64;
    let var = if shots > 1 { (sum_sq - shots as f64 * mean * mean).max(0.0) / (shots - 1) as f64 } else { 0.0 };
    let target = DensityMatrix::from_pure(witness)?;

    Ok(Theorem1Report {
        code: kind,
        num_qubits: n,
        shots,
        mean_fidelity: 1.0 - mean,
        mean_infidelity: mean,
        infidelity_sigma: (var / shots as f64).sqrt(),
        min_fidelity,
        verifier_accept: Estimate::from_counts(accepts, shots),
        trace_distance: rho.trace_distance(&target)?,
        weight_one_corrected,
        weight_ge2_mass,
        failure_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn ket(a: Complex<f64>, b: Complex<f64>) -> DenseState<f64> {
        let mut s = DenseState::from_amplitudes(vec![a, b]).unwrap();
        s.normalize();
        s
    }

    fn witness() -> DenseState<f64> {
        ket(Complex::new(0.6, 0.0), Complex::new(0.0, 0.8))
    }

    #[test]
    fn code_words_are_stabilized() {
        for kind in [CodeKind::FiveQubit, CodeKind::PhaseFlip] {
            let code = StabilizerCode::new(kind).unwrap();
            let enc = code.encode(&witness()).unwrap();
            for g in code.generators() {
                assert!((enc.expectation(g).unwrap() - 1.0).abs() < 1e-12);
            }
            assert!((code.decode(&enc).unwrap().fidelity(&witness()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn five_qubit_table_is_perfect() {
        let code = StabilizerCode::new(CodeKind::FiveQubit).unwrap();
        assert_eq!(code.correctable_errors().count(), 16);
    }

    #[test]
    fn noiseless_demo_has_unit_fidelity() {
        let r = theorem1_demo(CodeKind::FiveQubit, &NoiseChannel::noiseless(), &witness(), 50, SeedStream::new(1)).unwrap();
        assert!(r.weight_one_corrected);
        assert!(r.mean_infidelity < 1e-12);
        assert_eq!(r.failure_mass, 0.0);
    }

    #[test]
    fn logical_error_is_not_corrected() {
        let code = StabilizerCode::new(CodeKind::PhaseFlip).unwrap();
        assert!(!code.corrects(&"ZZI".parse().unwrap()).unwrap());
        assert!(code.corrects(&"IZI".parse().unwrap()).unwrap());
    }
}
