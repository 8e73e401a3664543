//! Desk-scale measurement-based computation: patterns, a compiler for small
//! circuits, and adaptive execution with byproduct tracking and Pauli-frame
//! correction.

mod compile;
mod run;

pub use compile::{compile_small_circuit, Circuit, CircuitGate, MAX_CIRCUIT_GATES, MAX_CIRCUIT_WIDTH};
pub use run::{
    output_distribution, pattern_z_pattern, run_pattern, run_pattern_dense, run_pattern_tableau,
    run_with_frame, sample_output_bits, total_variation, PatternInput, PatternOutput, PatternRun,
    PauliFrame,
};

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `|±_θ⟩ = (|0⟩ ± e^{iθ}|1⟩)/√2`; `XY(0)` is the X basis.
    XY(f64),
    Z,
}

impl Basis {
    /// Whether every adapted angle `±θ + kπ` is a multiple of `π/2`.
    pub fn is_clifford(self) -> bool {
        match self {
            Basis::Z => true,
            Basis::XY(theta) => {
                let k = theta / FRAC_PI_2;
                (k - k.round()).abs() < 1e-12
            }
        }
    }
}

/// Measurement of one vertex. The effective angle is
/// `(−1)^{s} θ + t π` with `s`, `t` the parities of the recorded outcomes in
/// the two domains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub vertex: usize,
    pub basis: Basis,
    pub s_domain: Vec<usize>,
    pub t_domain: Vec<usize>,
}

/// Byproduct correction `Z^z X^x` for one output vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub vertex: usize,
    pub x_domain: Vec<usize>,
    pub z_domain: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    measurements: Vec<Measurement>,
    corrections: Vec<Correction>,
}

impl MeasurementPattern {
    /// Builds and validates a pattern. `corrections` must list the outputs
    /// in order.
    pub fn new(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        measurements: Vec<Measurement>,
        corrections: Vec<Correction>,
    ) -> Result<Self> {
        let p = Self { num_vertices, edges, inputs, outputs, measurements, corrections };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vertices;
        let bad = |msg: String| Err(Error::Compile(msg));
        let in_range = |v: usize| {
            if v < n {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: v, n })
            }
        };
        let mut seen_edges = HashSet::new();
        for &(a, b) in &self.edges {
            in_range(a)?;
            in_range(b)?;
            if a == b {
                return bad(format!("self-loop on vertex {a}"));
            }
            if !seen_edges.insert((a.min(b), a.max(b))) {
                return bad(format!("duplicate edge ({a}, {b})"));
            }
        }
        for (name, list) in [("input", &self.inputs), ("output", &self.outputs)] {
            let mut set = HashSet::new();
            for &v in list {
                in_range(v)?;
                if !set.insert(v) {
                    return bad(format!("{name} vertex {v} listed twice"));
                }
            }
        }
        let outputs: HashSet<usize> = self.outputs.iter().copied().collect();
        let mut measured = BTreeSet::new();
        for m in &self.measurements {
            in_range(m.vertex)?;
            if outputs.contains(&m.vertex) {
                return bad(format!("output vertex {} is measured", m.vertex));
            }
            for &d in m.s_domain.iter().chain(&m.t_domain) {
                if !measured.contains(&d) {
                    return bad(format!(
                        "vertex {} depends on {d}, which is not measured before it",
                        m.vertex
                    ));
                }
            }
            if !measured.insert(m.vertex) {
                return bad(format!("vertex {} measured twice", m.vertex));
            }
        }
        if measured.len() + outputs.len() != n {
            return bad("every non-output vertex needs exactly one measurement".into());
        }
        if self.corrections.len() != self.outputs.len()
            || self.corrections.iter().zip(&self.outputs).any(|(c, &o)| c.vertex != o)
        {
            return bad("corrections must list the outputs in order".into());
        }
        for c in &self.corrections {
            for &d in c.x_domain.iter().chain(&c.z_domain) {
                if !measured.contains(&d) {
                    return bad(format!("correction of {} depends on unmeasured vertex {d}", c.vertex));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_clifford(&self) -> bool {
        self.measurements.iter().all(|m| m.basis.is_clifford())
    }

    /// Parses the text form written by [`fmt::Display`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut num_vertices = None;
        let mut edges = Vec::new();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut measurements = Vec::new();
        let mut corrections = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad vertex `{s}`")));
            match fields[0] {
                "vertices" if fields.len() == 2 => num_vertices = Some(num(fields[1])?),
                "edge" if fields.len() == 3 => edges.push((num(fields[1])?, num(fields[2])?)),
                "inputs" => inputs = fields[1..].iter().map(|s| num(s)).collect::<Result<_>>()?,
                "outputs" => outputs = fields[1..].iter().map(|s| num(s)).collect::<Result<_>>()?,
                "measure" if fields.len() >= 3 => {
                    let vertex = num(fields[1])?;
                    let (basis, rest) = match fields[2] {
                        "Z" => (Basis::Z, &fields[3..]),
                        "X" => (Basis::XY(0.0), &fields[3..]),
                        "XY" if fields.len() >= 4 => {
                            let angle = fields[3]
                                .parse::<f64>()
                                .map_err(|_| Error::parse(ln, format!("bad angle `{}`", fields[3])))?;
                            (Basis::XY(angle), &fields[4..])
                        }
                        other => return Err(Error::parse(ln, format!("unknown basis `{other}`"))),
                    };
                    let s_domain = domain(rest, "s", ln)?;
                    let t_domain = domain(rest, "t", ln)?;
                    measurements.push(Measurement { vertex, basis, s_domain, t_domain });
                }
                "correct" if fields.len() >= 2 => {
                    let vertex = num(fields[1])?;
                    let rest = &fields[2..];
                    corrections.push(Correction { vertex, x_domain: domain(rest, "x", ln)?, z_domain: domain(rest, "z", ln)? });
                }
                other => return Err(Error::parse(ln, format!("unrecognised line `{other}`"))),
            }
        }
        let num_vertices = num_vertices.ok_or_else(|| Error::parse(1, "missing `vertices` line"))?;
        Self::new(num_vertices, edges, inputs, outputs, measurements, corrections)
    }
}

/// Reads `key=a,b,c` (or `key=-` for empty) out of trailing fields.
fn domain(fields: &[&str], key: &str, ln: usize) -> Result<Vec<usize>> {
    for f in fields {
        if let Some(list) = f.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
            if list == "-" || list.is_empty() {
                return Ok(Vec::new());
            }
            return list
                .split(',')
                .map(|v| v.parse().map_err(|_| Error::parse(ln, format!("bad domain entry `{v}`"))))
                .collect();
        }
    }
    Ok(Vec::new())
}

fn write_list(f: &mut fmt::Formatter<'_>, key: &str, list: &[usize]) -> fmt::Result {
    if list.is_empty() {
        write!(f, " {key}=-")
    } else {
        let items: Vec<String> = list.iter().map(|v| v.to_string()).collect();
        write!(f, " {key}={}", items.join(","))
    }
}

impl fmt::Display for MeasurementPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.num_vertices)?;
        for (a, b) in &self.edges {
            writeln!(f, "edge {a} {b}")?;
        }
        let join = |l: &[usize]| l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "inputs {}", join(&self.inputs))?;
        writeln!(f, "outputs {}", join(&self.outputs))?;
        for m in &self.measurements {
            match m.basis {
                Basis::Z => write!(f, "measure {} Z", m.vertex)?,
                Basis::XY(theta) => write!(f, "measure {} XY {:?}", m.vertex, theta)?,
            }
            write_list(f, "s", &m.s_domain)?;
            write_list(f, "t", &m.t_domain)?;
            writeln!(f)?;
        }
        for c in &self.corrections {
            write!(f, "correct {}", c.vertex)?;
            write_list(f, "x", &c.x_domain)?;
            write_list(f, "z", &c.z_domain)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Effective measurement angle given the domain parities.
pub(crate) fn adapted_angle(theta: f64, s: bool, t: bool) -> f64 {
    let a = if s { -theta } else { theta };
    if t {
        a + PI
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c: Circuit = "H 0\nT 0\nCZ 0 1\nS 1".parse().unwrap();
        let p = compile_small_circuit(&c).unwrap();
        let text = p.to_string();
        let again = MeasurementPattern::parse(&text).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn rejects_cyclic_dependencies() {
        let m = |v, s: Vec<usize>| Measurement { vertex: v, basis: Basis::XY(0.0), s_domain: s, t_domain: vec![] };
        let r = MeasurementPattern::new(
            3,
            vec![(0, 1), (1, 2)],
            vec![0],
            vec![2],
            vec![m(0, vec![1]), m(1, vec![0])],
            vec![Correction { vertex: 2, x_domain: vec![], z_domain: vec![] }],
        );
        assert!(matches!(r, Err(Error::Compile(_))));
    }

    #[test]
    fn clifford_angles() {
        assert!(Basis::XY(0.0).is_clifford());
        assert!(Basis::XY(-FRAC_PI_2).is_clifford());
        assert!(!Basis::XY(std::f64::consts::FRAC_PI_4).is_clifford());
    }
}
