use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::scalar::Scalar;

use super::{Basis, Correction, Measurement, MeasurementPattern};

pub const MAX_CIRCUIT_WIDTH: usize = 3;
pub const MAX_CIRCUIT_GATES: usize = 24;

/// Gates the compiler accepts. `Rz(θ)` is `diag(1, e^{iθ})`, equal to the
/// usual Z rotation up to global phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircuitGate {
    I(usize),
    H(usize),
    S(usize),
    T(usize),
    Rz(usize, f64),
    Cz(usize, usize),
}

impl CircuitGate {
    fn qubits(self) -> Vec<usize> {
        match self {
            CircuitGate::I(q) | CircuitGate::H(q) | CircuitGate::S(q) | CircuitGate::T(q) | CircuitGate::Rz(q, _) => {
                vec![q]
            }
            CircuitGate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_clifford(self) -> bool {
        match self {
            CircuitGate::T(_) => false,
            CircuitGate::Rz(_, theta) => Basis::XY(theta).is_clifford(),
            _ => true,
        }
    }
}

impl fmt::Display for CircuitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CircuitGate::I(q) => write!(f, "I {q}"),
            CircuitGate::H(q) => write!(f, "H {q}"),
            CircuitGate::S(q) => write!(f, "S {q}"),
            CircuitGate::T(q) => write!(f, "T {q}"),
            CircuitGate::Rz(q, theta) => write!(f, "RZ {q} {theta:?}"),
            CircuitGate::Cz(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

/// A small gate list over at most [`MAX_CIRCUIT_WIDTH`] logical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<CircuitGate>,
}

impl Circuit {
    pub fn new(width: usize, gates: Vec<CircuitGate>) -> Result<Self> {
        if width == 0 || width > MAX_CIRCUIT_WIDTH {
            return Err(Error::Compile(format!("width {width} outside 1..={MAX_CIRCUIT_WIDTH}")));
        }
        if gates.len() > MAX_CIRCUIT_GATES {
            return Err(Error::Compile(format!("{} gates exceed the limit of {MAX_CIRCUIT_GATES}", gates.len())));
        }
        for g in &gates {
            let qs = g.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= width) {
                return Err(Error::IndexOutOfRange { index: q, n: width });
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::RepeatedTarget(qs[0]));
            }
        }
        Ok(Self { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| g.is_clifford())
    }

    /// Applies the circuit's unitary to a dense register.
    pub fn apply_to<T: Scalar>(&self, state: &mut DenseState<T>) -> Result<()> {
        if state.num_qubits() != self.width {
            return Err(Error::DimensionMismatch { expected: self.width, found: state.num_qubits() });
        }
        for &g in &self.gates {
            match g {
                CircuitGate::I(_) => {}
                CircuitGate::H(q) => state.apply_gate(Gate::H(q))?,
                CircuitGate::S(q) => state.apply_gate(Gate::S(q))?,
                CircuitGate::T(q) => state.apply_t(q)?,
                CircuitGate::Rz(q, theta) => state.apply_phase(q, T::of(theta))?,
                CircuitGate::Cz(a, b) => state.apply_gate(Gate::Cz(a, b))?,
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    /// One gate per line (`H 0`, `T 1`, `RZ 0 0.3`, `CZ 0 1`, ...). An
    /// optional `qubits N` line fixes the width; otherwise it is inferred.
    fn from_str(s: &str) -> Result<Self> {
        let mut width = None;
        let mut gates = Vec::new();
        for (i, raw) in s.lines().flat_map(|l| l.split(';')).enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ln = i + 1;
            let f: Vec<&str> = line.split_whitespace().collect();
            let q = |k: usize| -> Result<usize> {
                f.get(k)
                    .ok_or_else(|| Error::parse(ln, "missing qubit"))?
                    .parse()
                    .map_err(|_| Error::parse(ln, "bad qubit index"))
            };
            let name = f[0].to_ascii_uppercase();
            let gate = match name.as_str() {
                "QUBITS" => {
                    width = Some(q(1)?);
                    continue;
                }
                "I" => CircuitGate::I(q(1)?),
                "H" => CircuitGate::H(q(1)?),
                "S" => CircuitGate::S(q(1)?),
                "T" => CircuitGate::T(q(1)?),
                "RZ" | "P" => {
                    let theta = f
                        .get(2)
                        .ok_or_else(|| Error::parse(ln, "missing angle"))?
                        .parse()
                        .map_err(|_| Error::parse(ln, "bad angle"))?;
                    CircuitGate::Rz(q(1)?, theta)
                }
                "CZ" => CircuitGate::Cz(q(1)?, q(2)?),
                other => return Err(Error::Compile(format!("unsupported gate `{other}`"))),
            };
            gates.push(gate);
        }
        let inferred = gates.iter().flat_map(|g| g.qubits()).max().map_or(1, |m| m + 1);
        Circuit::new(width.unwrap_or(inferred), gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

struct Wire {
    cur: usize,
    x: BTreeSet<usize>,
    z: BTreeSet<usize>,
}

struct Builder {
    next: usize,
    edges: Vec<(usize, usize)>,
    measurements: Vec<Measurement>,
    wires: Vec<Wire>,
}

impl Builder {
    /// Teleports wire `w` one step, implementing `H·P(θ)`.
    fn j(&mut self, w: usize, theta: f64) {
        let o = self.next;
        self.next += 1;
        let wire = &mut self.wires[w];
        self.edges.push((wire.cur, o));
        self.measurements.push(Measurement {
            vertex: wire.cur,
            basis: Basis::XY(-theta + 0.0),
            s_domain: wire.x.iter().copied().collect(),
            t_domain: Vec::new(),
        });
        let mut new_x: BTreeSet<usize> = BTreeSet::from([wire.cur]);
        new_x = &new_x ^ &wire.z;
        wire.z = std::mem::replace(&mut wire.x, new_x);
        wire.cur = o;
    }

    fn cz(&mut self, a: usize, b: usize) {
        let (ca, cb) = (self.wires[a].cur, self.wires[b].cur);
        let key = (ca.min(cb), ca.max(cb));
        if let Some(i) = self.edges.iter().position(|&(p, q)| (p.min(q), p.max(q)) == key) {
            self.edges.remove(i);
        } else {
            self.edges.push(key);
        }
        let xa = self.wires[a].x.clone();
        let xb = self.wires[b].x.clone();
        self.wires[a].z = &self.wires[a].z ^ &xb;
        self.wires[b].z = &self.wires[b].z ^ &xa;
    }
}

/// Compiles a circuit into a pattern on a cluster of wires. Input `i` is
/// vertex `i`. Each `H·P(θ)` step adds one vertex to its wire; `CZ` adds an
/// edge between the two current wire ends.
pub fn compile_small_circuit(circuit: &Circuit) -> Result<MeasurementPattern> {
    let m = circuit.width();
    let mut b = Builder {
        next: m,
        edges: Vec::new(),
        measurements: Vec::new(),
        wires: (0..m).map(|q| Wire { cur: q, x: BTreeSet::new(), z: BTreeSet::new() }).collect(),
    };
    for &g in circuit.gates() {
        match g {
            CircuitGate::I(q) => {
                b.j(q, 0.0);
                b.j(q, 0.0);
            }
            CircuitGate::H(q) => b.j(q, 0.0),
            CircuitGate::S(q) => {
                b.j(q, FRAC_PI_2);
                b.j(q, 0.0);
            }
            CircuitGate::T(q) => {
                b.j(q, FRAC_PI_4);
                b.j(q, 0.0);
            }
            CircuitGate::Rz(q, theta) => {
                b.j(q, theta);
                b.j(q, 0.0);
            }
            CircuitGate::Cz(p, q) => b.cz(p, q),
        }
    }
    let outputs: Vec<usize> = b.wires.iter().map(|w| w.cur).collect();
    let corrections = b
        .wires
        .iter()
        .map(|w| Correction {
            vertex: w.cur,
            x_domain: w.x.iter().copied().collect(),
            z_domain: w.z.iter().copied().collect(),
        })
        .collect();
    MeasurementPattern::new(b.next, b.edges, (0..m).collect(), outputs, b.measurements, corrections)
}
