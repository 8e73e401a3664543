use rand::Rng;

use crate::bits::BitString;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::gates::{random_clifford_circuit, Gate};
use crate::graph::{ProtocolGraph, Subgraph};
use crate::pauli::PauliString;
use crate::rng::SeedStream;
use crate::state::{Outcome, QuantumState};
use crate::tableau::StabilizerTableau;

/// State Merlin places on `V2`.
#[derive(Clone, Debug)]
pub enum Witness {
    Zero,
    Plus,
    Stabilizer(StabilizerTableau),
    Dense(DenseState<f64>),
}

impl Witness {
    fn width(&self) -> Option<usize> {
        match self {
            Witness::Zero | Witness::Plus => None,
            Witness::Stabilizer(t) => Some(t.num_qubits()),
            Witness::Dense(d) => Some(d.num_qubits()),
        }
    }
}

/// A prepared Merlin state: stabilizer when possible, dense otherwise.
#[derive(Clone, Debug)]
pub enum MerlinState {
    Stabilizer(StabilizerTableau),
    Dense(DenseState<f64>),
}

impl MerlinState {
    pub fn to_dense(&self) -> Result<DenseState<f64>> {
        match self {
            MerlinState::Stabilizer(t) => DenseState::from_tableau(t),
            MerlinState::Dense(d) => Ok(d.clone()),
        }
    }
}

impl QuantumState for MerlinState {
    fn num_qubits(&self) -> usize {
        match self {
            MerlinState::Stabilizer(t) => t.num_qubits(),
            MerlinState::Dense(d) => d.num_qubits(),
        }
    }

    fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        match self {
            MerlinState::Stabilizer(t) => t.apply_gate(gate),
            MerlinState::Dense(d) => d.apply_gate(gate),
        }
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        match self {
            MerlinState::Stabilizer(t) => t.apply_pauli(p),
            MerlinState::Dense(d) => d.apply_pauli(p),
        }
    }

    fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Outcome> {
        match self {
            MerlinState::Stabilizer(t) => t.measure_pauli(p, rng),
            MerlinState::Dense(d) => d.measure_pauli(p, rng),
        }
    }
}

/// `W(|G″⟩ ⊗ ξ)` with the witness `ξ` on `V2`.
pub fn honest_merlin_state(g: &ProtocolGraph, witness: &Witness) -> Result<MerlinState> {
    let n2 = g.num_v2();
    if let Some(width) = witness.width() {
        if width != n2 {
            return Err(Error::DimensionMismatch { expected: n2, found: width });
        }
    }
    let layer = g.entangling_layer();
    let mut state = match witness {
        Witness::Plus => MerlinState::Stabilizer(g.graph_state(Subgraph::Inner)),
        Witness::Zero => {
            let mut t = g.graph_state(Subgraph::Inner);
            for q in g.v2() {
                t.apply_gate(Gate::H(q))?;
            }
            MerlinState::Stabilizer(t)
        }
        Witness::Stabilizer(xi) => {
            let inner = inner_graph_tableau(g);
            MerlinState::Stabilizer(inner.tensor(xi))
        }
        Witness::Dense(xi) => {
            let inner = DenseState::<f64>::from_tableau(&inner_graph_tableau(g))?;
            MerlinState::Dense(inner.tensor(xi)?)
        }
    };
    layer.apply(&mut state)?;
    Ok(state)
}

/// `|G″⟩` on the `V1` qubits alone.
fn inner_graph_tableau(g: &ProtocolGraph) -> StabilizerTableau {
    let mut t = StabilizerTableau::plus_state(g.num_v1());
    for (a, b) in g.e1() {
        t.apply_gate(Gate::Cz(a, b)).expect("E1 edges lie in V1");
    }
    t
}

/// `√(1−η)·W(|G″⟩ ⊗ ξ) + √η·χ` with a random dense witness `ξ` and a
/// random `χ` orthogonal to the first term. Both relaxed tests accept the
/// first term with certainty, so each passes with probability at least
/// `1 − η`.
pub fn near_honest_state<R: Rng + ?Sized>(g: &ProtocolGraph, eta: f64, rng: &mut R) -> Result<DenseState<f64>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta = {eta} outside [0, 1]")));
    }
    let xi = DenseState::random(g.num_v2(), rng)?;
    let honest = honest_merlin_state(g, &Witness::Dense(xi))?.to_dense()?;
    let mut chi = DenseState::<f64>::random(g.num_vertices(), rng)?;
    let overlap = honest.inner(&chi)?;
    for (c, h) in chi.amplitudes_mut().iter_mut().zip(honest.amplitudes()) {
        *c -= overlap * h;
    }
    chi.normalize();
    let (a, b) = ((1.0 - eta).sqrt(), eta.sqrt());
    let amps = honest.amplitudes().iter().zip(chi.amplitudes()).map(|(h, c)| h * a + c * b).collect();
    let mut psi = DenseState::from_amplitudes(amps)?;
    psi.normalize();
    Ok(psi)
}

/// Merlin's behaviour in the test branches.
#[derive(Clone, Debug)]
pub enum MerlinStrategy {
    Honest,
    /// `W(|G″_γ⟩ ⊗ ξ)`; `gamma` has one bit per `V1` vertex.
    DeviatedGamma { gamma: BitString },
    /// `W(|G″_{(u,v)}⟩ ⊗ |t⟩)`.
    GraphBasis { u: BitString, v: BitString, t: usize },
    /// A fixed stabilizer state from a random Clifford circuit.
    RandomStabilizer { seed: u64, depth: usize },
    /// An arbitrary state on the full register.
    CustomDense { state: DenseState<f64> },
}

impl MerlinStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            MerlinStrategy::Honest => "honest",
            MerlinStrategy::DeviatedGamma { .. } => "deviated-gamma",
            MerlinStrategy::GraphBasis { .. } => "graph-basis",
            MerlinStrategy::RandomStabilizer { .. } => "random-stabilizer",
            MerlinStrategy::CustomDense { .. } => "custom-dense",
        }
    }

    /// Prepares the state Merlin sends. Preparation is deterministic.
    pub fn prepare(&self, g: &ProtocolGraph, witness: &Witness) -> Result<MerlinState> {
        let n = g.num_vertices();
        match self {
            MerlinStrategy::Honest => honest_merlin_state(g, witness),
            MerlinStrategy::DeviatedGamma { gamma } => {
                if gamma.len() != g.num_v1() {
                    return Err(Error::DimensionMismatch { expected: g.num_v1(), found: gamma.len() });
                }
                let mut s = honest_merlin_state(g, witness)?;
                s.apply_pauli(&PauliString::z_pattern(&BitString::from_ones(n, gamma.ones())))?;
                Ok(s)
            }
            MerlinStrategy::GraphBasis { u, v, t } => {
                let (nb, nw) = (g.v1_black().len(), g.v1_white().len());
                if u.len() != nb || v.len() != nw {
                    return Err(Error::DimensionMismatch { expected: nb + nw, found: u.len() + v.len() });
                }
                if g.num_v2() < usize::BITS as usize && *t >= 1usize << g.num_v2() {
                    return Err(Error::IndexOutOfRange { index: *t, n: 1 << g.num_v2() });
                }
                let mut tab = g.graph_state(Subgraph::Inner);
                let ones = u.ones().chain(v.ones().map(|j| j + nb));
                tab.apply_pauli(&PauliString::z_pattern(&BitString::from_ones(n, ones)))?;
                for (i, q) in g.v2().enumerate() {
                    tab.apply_gate(Gate::H(q))?;
                    if t >> i & 1 == 1 {
                        tab.apply_gate(Gate::X(q))?;
                    }
                }
                let mut s = MerlinState::Stabilizer(tab);
                g.entangling_layer().apply(&mut s)?;
                Ok(s)
            }
            MerlinStrategy::RandomStabilizer { seed, depth } => {
                let mut rng = SeedStream::new(*seed).trial(0);
                let mut tab = StabilizerTableau::new(n);
                tab.apply_gates(&random_clifford_circuit(n, *depth, &mut rng))?;
                Ok(MerlinState::Stabilizer(tab))
            }
            MerlinStrategy::CustomDense { state } => {
                if state.num_qubits() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: state.num_qubits() });
                }
                Ok(MerlinState::Dense(state.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    #[test]
    fn zero_witness_gives_plus_one_generators_on_v1() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let MerlinState::Stabilizer(t) = honest_merlin_state(&g, &Witness::Zero).unwrap() else {
            panic!("stabilizer witness")
        };
        for j in g.v1() {
            assert_eq!(t.expectation(&g.stabilizer_generator(j, Subgraph::Connected).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn witness_width_is_checked() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let w = Witness::Dense(DenseState::zero(3).unwrap());
        assert!(matches!(honest_merlin_state(&g, &w), Err(Error::DimensionMismatch { .. })));
    }
}
