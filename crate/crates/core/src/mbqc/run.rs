use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::bits::BitString;
use crate::dense::{xy_ket, z_ket, DenseState};
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Scalar;
use crate::state::Outcome;
use crate::tableau::StabilizerTableau;

use super::{adapted_angle, Basis, Measurement, MeasurementPattern};

/// A known Z-error pattern on the pattern vertices, used to reinterpret
/// outcomes instead of physically correcting the state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    u: BitString,
}

impl PauliFrame {
    pub fn new(pattern: &MeasurementPattern, u: BitString) -> Result<Self> {
        if u.len() != pattern.num_vertices() {
            return Err(Error::DimensionMismatch { expected: pattern.num_vertices(), found: u.len() });
        }
        Ok(Self { u })
    }

    pub fn pattern(&self) -> &BitString {
        &self.u
    }
}

#[derive(Clone, Debug)]
pub enum PatternInput<T: Scalar> {
    Dense(DenseState<T>),
    Stabilizer(StabilizerTableau),
}

#[derive(Clone, Debug)]
pub enum PatternOutput<T: Scalar> {
    /// Corrected output register, output `i` on qubit `i`.
    Dense(DenseState<T>),
    /// Full pattern register after correction; measured vertices are
    /// collapsed.
    Stabilizer(StabilizerTableau),
}

#[derive(Clone, Debug)]
pub struct PatternRun<T: Scalar> {
    /// Recorded outcome per vertex (after frame reinterpretation); `None`
    /// for outputs.
    pub outcomes: Vec<Option<bool>>,
    /// Byproduct exponents per output, in output order.
    pub byproduct_x: BitString,
    pub byproduct_z: BitString,
    pub output: PatternOutput<T>,
}

fn check_input_width(pattern: &MeasurementPattern, n: usize) -> Result<()> {
    if n != pattern.inputs().len() {
        return Err(Error::DimensionMismatch { expected: pattern.inputs().len(), found: n });
    }
    Ok(())
}

fn check_pattern_len(pattern: &MeasurementPattern, u: Option<&BitString>) -> Result<()> {
    if let Some(u) = u {
        if u.len() != pattern.num_vertices() {
            return Err(Error::DimensionMismatch { expected: pattern.num_vertices(), found: u.len() });
        }
    }
    Ok(())
}

fn parity(outcomes: &[Option<bool>], domain: &[usize]) -> bool {
    domain.iter().fold(false, |acc, &v| acc ^ outcomes[v].unwrap_or(false))
}

fn frame_bit(frame: Option<&PauliFrame>, v: usize) -> bool {
    frame.is_some_and(|f| f.u.get(v))
}

/// Recorded outcome from the physical one. A Z error flips XY-plane
/// outcomes and leaves Z-basis outcomes alone.
fn recorded(m: &Measurement, physical: bool, frame: Option<&PauliFrame>) -> bool {
    match m.basis {
        Basis::XY(_) => physical ^ frame_bit(frame, m.vertex),
        Basis::Z => physical,
    }
}

fn byproducts(pattern: &MeasurementPattern, outcomes: &[Option<bool>], frame: Option<&PauliFrame>) -> (BitString, BitString) {
    let k = pattern.outputs().len();
    let mut bx = BitString::zeros(k);
    let mut bz = BitString::zeros(k);
    for (i, c) in pattern.corrections().iter().enumerate() {
        bx.set(i, parity(outcomes, &c.x_domain));
        bz.set(i, parity(outcomes, &c.z_domain) ^ frame_bit(frame, c.vertex));
    }
    (bx, bz)
}

/// Output state, X and Z correction parities, recorded outcomes.
type Finished<T> = (DenseState<T>, BitString, BitString, Vec<Option<bool>>);

/// Dense executor that only keeps unmeasured vertices whose neighborhood
/// is needed in the register.
#[derive(Clone)]
struct DenseExec<'a, T: Scalar> {
    pattern: &'a MeasurementPattern,
    adj: &'a [Vec<usize>],
    errors: Option<&'a BitString>,
    state: DenseState<T>,
    slots: Vec<usize>,
    live: Vec<bool>,
    outcomes: Vec<Option<bool>>,
}

impl<'a, T: Scalar> DenseExec<'a, T> {
    fn new(
        pattern: &'a MeasurementPattern,
        adj: &'a [Vec<usize>],
        input: &DenseState<T>,
        errors: Option<&'a BitString>,
    ) -> Result<Self> {
        check_input_width(pattern, input.num_qubits())?;
        let mut exec = Self {
            pattern,
            adj,
            errors,
            state: input.clone(),
            slots: pattern.inputs().to_vec(),
            live: vec![false; pattern.num_vertices()],
            outcomes: vec![None; pattern.num_vertices()],
        };
        for &v in pattern.inputs() {
            exec.live[v] = true;
        }
        for (a, b) in pattern.edges() {
            if exec.live[*a] && exec.live[*b] {
                let (sa, sb) = (exec.slot(*a), exec.slot(*b));
                exec.state.apply_gate(Gate::Cz(sa, sb))?;
            }
        }
        for &v in pattern.inputs() {
            if errors.is_some_and(|u| u.get(v)) {
                let s = exec.slot(v);
                exec.state.apply_gate(Gate::Z(s))?;
            }
        }
        Ok(exec)
    }

    fn slot(&self, v: usize) -> usize {
        self.slots.iter().position(|&x| x == v).expect("vertex is live")
    }

    fn make_live(&mut self, v: usize) -> Result<()> {
        if self.live[v] || self.outcomes[v].is_some() {
            return Ok(());
        }
        self.state = self.state.tensor(&DenseState::plus(1)?)?;
        self.slots.push(v);
        self.live[v] = true;
        let sv = self.slots.len() - 1;
        for &w in &self.adj[v] {
            if self.live[w] {
                self.state.apply_gate(Gate::Cz(sv, self.slot(w)))?;
            }
        }
        if self.errors.is_some_and(|u| u.get(v)) {
            self.state.apply_gate(Gate::Z(sv))?;
        }
        Ok(())
    }

    fn prepare(&mut self, m: &Measurement) -> Result<()> {
        self.make_live(m.vertex)?;
        for &w in &self.adj[m.vertex] {
            self.make_live(w)?;
        }
        Ok(())
    }

    fn ket(&self, m: &Measurement, physical: bool) -> [num_complex::Complex<T>; 2] {
        match m.basis {
            Basis::Z => z_ket(physical),
            Basis::XY(theta) => {
                let angle = adapted_angle(theta, parity(&self.outcomes, &m.s_domain), parity(&self.outcomes, &m.t_domain));
                xy_ket(T::of(angle), physical)
            }
        }
    }

    /// Branch where the physical outcome is `physical`: unnormalised
    /// post-measurement register and its probability.
    fn branch(&self, m: &Measurement, physical: bool, frame: Option<&PauliFrame>) -> Result<(Self, T)> {
        let slot = self.slot(m.vertex);
        let mut state = self.state.contract_qubit(slot, self.ket(m, physical))?;
        let prob = state.normalize() / self.state.norm_sqr();
        let mut next = Self {
            pattern: self.pattern,
            adj: self.adj,
            errors: self.errors,
            state,
            slots: self.slots.clone(),
            live: self.live.clone(),
            outcomes: self.outcomes.clone(),
        };
        next.slots.remove(slot);
        next.live[m.vertex] = false;
        next.outcomes[m.vertex] = Some(recorded(m, physical, frame));
        Ok((next, prob))
    }

    /// Brings outputs into the register, orders them, applies corrections.
    fn finish(mut self, frame: Option<&PauliFrame>) -> Result<Finished<T>> {
        for &o in self.pattern.outputs() {
            self.make_live(o)?;
        }
        let outputs = self.pattern.outputs();
        if self.slots.len() != outputs.len() {
            return Err(Error::Compile("pattern leaves unmeasured non-output vertices".into()));
        }
        let perm: Vec<usize> = self
            .slots
            .iter()
            .map(|v| outputs.iter().position(|o| o == v).expect("live vertex is an output"))
            .collect();
        let mut out = self.state.permute_qubits(&perm)?;
        let (bx, bz) = byproducts(self.pattern, &self.outcomes, frame);
        for i in 0..outputs.len() {
            if bx.get(i) {
                out.apply_gate(Gate::X(i))?;
            }
            if bz.get(i) {
                out.apply_gate(Gate::Z(i))?;
            }
        }
        Ok((out, bx, bz, self.outcomes))
    }
}

fn adjacency(pattern: &MeasurementPattern) -> Vec<Vec<usize>> {
    (0..pattern.num_vertices()).map(|v| pattern.neighbors(v)).collect()
}

/// Executes `pattern` on a dense witness with Z errors `errors` on the
/// resource, reinterpreting outcomes through `frame` when given.
pub fn run_pattern_dense<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input: &DenseState<T>,
    errors: Option<&BitString>,
    frame: Option<&PauliFrame>,
    rng: &mut R,
) -> Result<PatternRun<T>> {
    check_pattern_len(pattern, errors)?;
    let adj = adjacency(pattern);
    let mut exec = DenseExec::new(pattern, &adj, input, errors)?;
    for m in pattern.measurements() {
        exec.prepare(m)?;
        let (zero, p0) = exec.branch(m, false, frame)?;
        exec = if T::of(rng.random::<f64>()) < p0 { zero } else { exec.branch(m, true, frame)?.0 };
    }
    let (out, byproduct_x, byproduct_z, outcomes) = exec.finish(frame)?;
    Ok(PatternRun { outcomes, byproduct_x, byproduct_z, output: PatternOutput::Dense(out) })
}

/// XY-plane observable at a Clifford angle.
fn xy_observable(n: usize, q: usize, angle: f64) -> Result<PauliString> {
    let k = angle / FRAC_PI_2;
    if (k - k.round()).abs() > 1e-9 {
        return Err(Error::NonClifford(angle));
    }
    let mut p = PauliString::single(n, q, if k.round().rem_euclid(2.0) == 0.0 { Pauli::X } else { Pauli::Y });
    if k.round().rem_euclid(4.0) >= 2.0 {
        p.negate();
    }
    Ok(p)
}

/// Executes a Clifford pattern on a stabilizer witness.
pub fn run_pattern_tableau<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input: &StabilizerTableau,
    errors: Option<&BitString>,
    frame: Option<&PauliFrame>,
    rng: &mut R,
) -> Result<PatternRun<T>> {
    check_input_width(pattern, input.num_qubits())?;
    check_pattern_len(pattern, errors)?;
    let n = pattern.num_vertices();
    let m = pattern.inputs().len();
    let rest: Vec<usize> = (0..n).filter(|v| !pattern.inputs().contains(v)).collect();
    let perm: Vec<usize> = pattern.inputs().iter().chain(&rest).copied().collect();
    let mut t = input.tensor(&StabilizerTableau::plus_state(n - m)).permute_qubits(&perm)?;
    for &(a, b) in pattern.edges() {
        t.apply_gate(Gate::Cz(a, b))?;
    }
    if let Some(u) = errors {
        t.apply_pauli(&PauliString::z_pattern(u))?;
    }
    let mut outcomes = vec![None; n];
    for meas in pattern.measurements() {
        let obs = match meas.basis {
            Basis::Z => PauliString::single(n, meas.vertex, Pauli::Z),
            Basis::XY(theta) => {
                let angle = adapted_angle(theta, parity(&outcomes, &meas.s_domain), parity(&outcomes, &meas.t_domain));
                xy_observable(n, meas.vertex, angle)?
            }
        };
        let physical = t.measure(&obs, rng)?.outcome.bit();
        outcomes[meas.vertex] = Some(recorded(meas, physical, frame));
    }
    let (bx, bz) = byproducts(pattern, &outcomes, frame);
    for (i, &o) in pattern.outputs().iter().enumerate() {
        if bx.get(i) {
            t.apply_gate(Gate::X(o))?;
        }
        if bz.get(i) {
            t.apply_gate(Gate::Z(o))?;
        }
    }
    Ok(PatternRun { outcomes, byproduct_x: bx, byproduct_z: bz, output: PatternOutput::Stabilizer(t) })
}

/// Noiseless execution. Stabilizer witnesses run on the tableau when every
/// angle is Clifford and fall back to the dense simulator otherwise.
pub fn run_pattern<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input: &PatternInput<T>,
    rng: &mut R,
) -> Result<PatternRun<T>> {
    run_inner(pattern, input, None, None, rng)
}

/// Execution on a resource carrying the Z errors `errors`. With a frame,
/// outcomes are reinterpreted through it; without one the run is
/// uncorrected.
pub fn run_with_frame<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input: &PatternInput<T>,
    errors: &BitString,
    frame: Option<&PauliFrame>,
    rng: &mut R,
) -> Result<PatternRun<T>> {
    if let Some(f) = frame {
        check_pattern_len(pattern, Some(&f.u))?;
    }
    run_inner(pattern, input, Some(errors), frame, rng)
}

fn run_inner<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input: &PatternInput<T>,
    errors: Option<&BitString>,
    frame: Option<&PauliFrame>,
    rng: &mut R,
) -> Result<PatternRun<T>> {
    match input {
        PatternInput::Dense(d) => run_pattern_dense(pattern, d, errors, frame, rng),
        PatternInput::Stabilizer(t) if pattern.is_clifford() => run_pattern_tableau(pattern, t, errors, frame, rng),
        PatternInput::Stabilizer(t) => run_pattern_dense(pattern, &DenseState::from_tableau(t)?, errors, frame, rng),
    }
}

/// Samples the computational-basis outcome of every output.
pub fn sample_output_bits<T: Scalar, R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    run: &PatternRun<T>,
    rng: &mut R,
) -> Result<BitString> {
    let k = pattern.outputs().len();
    match &run.output {
        PatternOutput::Dense(d) => {
            let r = T::of(rng.random::<f64>());
            let mut acc = T::zero();
            let probs = d.probabilities();
            let mut index = probs.len() - 1;
            for (i, p) in probs.iter().enumerate() {
                acc = acc + *p;
                if r < acc {
                    index = i;
                    break;
                }
            }
            Ok(BitString::from_u64(k, index as u64))
        }
        PatternOutput::Stabilizer(t) => {
            let mut t = t.clone();
            let n = t.num_qubits();
            let mut bits = BitString::zeros(k);
            for (i, &o) in pattern.outputs().iter().enumerate() {
                let out = t.measure(&PauliString::single(n, o, Pauli::Z), rng)?.outcome;
                bits.set(i, out == Outcome::Minus);
            }
            Ok(bits)
        }
    }
}

/// Exact distribution of the corrected outputs in the computational basis,
/// summed over every measurement branch.
pub fn output_distribution<T: Scalar>(
    pattern: &MeasurementPattern,
    input: &DenseState<T>,
    errors: Option<&BitString>,
    frame: Option<&PauliFrame>,
) -> Result<Vec<T>> {
    check_pattern_len(pattern, errors)?;
    let adj = adjacency(pattern);
    let mut dist = vec![T::zero(); 1 << pattern.outputs().len()];
    let floor = T::epsilon() * T::epsilon();
    let mut stack = vec![(0usize, DenseExec::new(pattern, &adj, input, errors)?, T::one())];
    while let Some((depth, mut exec, weight)) = stack.pop() {
        if weight <= floor {
            continue;
        }
        let Some(m) = pattern.measurements().get(depth) else {
            let (out, ..) = exec.finish(frame)?;
            for (d, p) in dist.iter_mut().zip(out.probabilities()) {
                *d = *d + weight * p;
            }
            continue;
        };
        exec.prepare(m)?;
        for physical in [false, true] {
            let (next, p) = exec.branch(m, physical, frame)?;
            stack.push((depth + 1, next, weight * p));
        }
    }
    Ok(dist)
}

pub fn total_variation<T: Scalar>(p: &[T], q: &[T]) -> T {
    let half = T::of(0.5);
    p.iter().zip(q).fold(T::zero(), |acc, (a, b)| acc + (*a - *b).abs()) * half
}

/// Reduces a Pauli error on the pattern resource to Z errors via
/// `X_j|G⟩ = Z_{N(j)}|G⟩`.
pub fn pattern_z_pattern(pattern: &MeasurementPattern, p: &PauliString) -> Result<BitString> {
    let n = pattern.num_vertices();
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.num_qubits() });
    }
    let mut u = p.z_bits().clone();
    for j in p.x_bits().ones() {
        for w in pattern.neighbors(j) {
            u.flip(w);
        }
    }
    Ok(u)
}
