//! Arthur's measurement procedures: the strict stabilizer test and the two
//! relaxed syndrome tests.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Result;
use crate::graph::{Color, ProtocolGraph, Subgraph};
use crate::noise::CorrectableSet;
use crate::pauli::{Pauli, PauliString};
use crate::rng::{par_count, SeedStream, TrialRng};
use crate::state::{Outcome, QuantumState};
use crate::stats::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestBranch {
    Test1,
    Test2,
}

impl TestBranch {
    /// Color measured in X on `V1`.
    pub fn x_color(self) -> Color {
        match self {
            TestBranch::Test1 => Color::Black,
            TestBranch::Test2 => Color::White,
        }
    }
}

/// How the strict test measures `s_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrictMode {
    /// One joint Pauli-product measurement.
    Joint,
    /// Each qubit of `s_k` in its local Pauli basis; outcomes multiplied.
    LocalProduct,
}

/// One relaxed-test shot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub branch: TestBranch,
    /// `(vertex id, bit)` for each vertex measured in X.
    pub x_outcomes: Vec<(usize, u8)>,
    /// `(vertex id, bit)` for each vertex measured in Z.
    pub z_outcomes: Vec<(usize, u8)>,
    /// One bit per X-measured `V1` vertex, in qubit order.
    pub syndrome: BitString,
    pub pass: bool,
}

impl SyndromeRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Writes records as JSON lines.
pub fn write_trace<W: Write>(mut out: W, records: &[SyndromeRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

/// `s_k = ∏_{j∈V1} (g′_j)^{k_j}`; `k` is indexed by position in `V1`.
pub fn strict_test_operator(g: &ProtocolGraph, k: &BitString) -> Result<PauliString> {
    let mut s = PauliString::identity(g.num_vertices());
    for j in k.ones() {
        s.mul_assign_right(&g.stabilizer_generator(j, Subgraph::Connected)?)?;
    }
    Ok(s)
}

/// Draws `k` uniformly, measures `s_k`, passes on `+1`.
pub fn strict_stabilizer_test<S, R>(state: &mut S, g: &ProtocolGraph, mode: StrictMode, rng: &mut R) -> Result<bool>
where
    S: QuantumState,
    R: Rng + ?Sized,
{
    let n1 = g.num_v1();
    let k = BitString::from_bools(&(0..n1).map(|_| rng.random::<bool>()).collect::<Vec<_>>());
    let s = strict_test_operator(g, &k)?;
    match mode {
        StrictMode::Joint => Ok(state.measure_pauli(&s, rng)? == Outcome::Plus),
        StrictMode::LocalProduct => {
            let n = g.num_vertices();
            let mut parity = s.is_negative();
            for q in s.support() {
                let local = PauliString::single(n, q, s.get(q));
                parity ^= state.measure_pauli(&local, rng)?.bit();
            }
            Ok(!parity)
        }
    }
}

/// Relaxed test 1: black `V1` vertices in X, white `G′` vertices in Z.
pub fn relaxed_test_1<S, R>(state: &mut S, g: &ProtocolGraph, gamma: &CorrectableSet, rng: &mut R) -> Result<SyndromeRecord>
where
    S: QuantumState,
    R: Rng + ?Sized,
{
    relaxed_test(state, g, gamma, TestBranch::Test1, rng)
}

/// Relaxed test 2: white `V1` vertices in X, black `G′` vertices in Z.
pub fn relaxed_test_2<S, R>(state: &mut S, g: &ProtocolGraph, gamma: &CorrectableSet, rng: &mut R) -> Result<SyndromeRecord>
where
    S: QuantumState,
    R: Rng + ?Sized,
{
    relaxed_test(state, g, gamma, TestBranch::Test2, rng)
}

pub fn relaxed_test<S, R>(
    state: &mut S,
    g: &ProtocolGraph,
    gamma: &CorrectableSet,
    branch: TestBranch,
    rng: &mut R,
) -> Result<SyndromeRecord>
where
    S: QuantumState,
    R: Rng + ?Sized,
{
    let n = g.num_vertices();
    let x_color = branch.x_color();
    let x_vertices: Vec<usize> = g.v1().filter(|&q| g.color(q) == x_color).collect();
    let z_vertices: Vec<usize> = g
        .vertices_of(Subgraph::Connected)
        .into_iter()
        .filter(|&q| g.color(q) != x_color)
        .collect();

    let mut z_bit = vec![false; n];
    let mut x_outcomes = Vec::with_capacity(x_vertices.len());
    let mut z_outcomes = Vec::with_capacity(z_vertices.len());
    let mut x_bits = Vec::with_capacity(x_vertices.len());
    for &q in &x_vertices {
        let b = state.measure_pauli(&PauliString::single(n, q, Pauli::X), rng)?.bit();
        x_outcomes.push((g.id_of(q), b as u8));
        x_bits.push(b);
    }
    for &q in &z_vertices {
        let b = state.measure_pauli(&PauliString::single(n, q, Pauli::Z), rng)?.bit();
        z_outcomes.push((g.id_of(q), b as u8));
        z_bit[q] = b;
    }

    let mut syndrome = BitString::zeros(x_vertices.len());
    for (i, &j) in x_vertices.iter().enumerate() {
        let mut s = x_bits[i];
        for i2 in g.neighbors_in(j, Subgraph::Connected)? {
            s ^= z_bit[i2];
        }
        syndrome.set(i, s);
    }
    let pass = match branch {
        TestBranch::Test1 => gamma.cond1(&syndrome),
        TestBranch::Test2 => gamma.cond2(&syndrome),
    };
    Ok(SyndromeRecord { branch, x_outcomes, z_outcomes, syndrome, pass })
}

/// Which test a pass-probability estimate runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestSelector {
    Strict(StrictMode),
    Relaxed(TestBranch),
}

/// Runs `test` on a fresh state from `source` for every shot and returns
/// the pass rate with its Wilson interval.
pub fn estimate_pass_probability<S, F>(
    g: &ProtocolGraph,
    gamma: &CorrectableSet,
    test: TestSelector,
    shots: u64,
    stream: SeedStream,
    source: F,
) -> Result<Estimate>
where
    S: QuantumState,
    F: Fn(&mut TrialRng) -> Result<S> + Sync,
{
    let passes = par_count(shots, stream, |rng| {
        let mut state = source(rng)?;
        match test {
            TestSelector::Strict(mode) => strict_stabilizer_test(&mut state, g, mode, rng),
            TestSelector::Relaxed(branch) => Ok(relaxed_test(&mut state, g, gamma, branch, rng)?.pass),
        }
    })?;
    Ok(Estimate::from_counts(passes, shots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::noise::{build_correctable_set, DEFAULT_ENUMERATION_CAP};

    fn honest(g: &ProtocolGraph) -> crate::tableau::StabilizerTableau {
        let mut t = g.graph_state(Subgraph::Inner);
        g.entangling_layer().apply(&mut t).unwrap();
        t
    }

    #[test]
    fn honest_state_passes_everything() {
        let g = GraphSpec::grid(3, 3, |_, c| c < 2).build().unwrap();
        let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut rng = SeedStream::new(1).trial(0);
        for _ in 0..20 {
            for branch in [TestBranch::Test1, TestBranch::Test2] {
                let rec = relaxed_test(&mut honest(&g), &g, &gamma, branch, &mut rng).unwrap();
                assert!(rec.pass && rec.syndrome.is_zero());
            }
            for mode in [StrictMode::Joint, StrictMode::LocalProduct] {
                assert!(strict_stabilizer_test(&mut honest(&g), &g, mode, &mut rng).unwrap());
            }
        }
    }

    #[test]
    fn record_serializes_as_one_line() {
        let g = GraphSpec::grid(2, 2, |_, _| true).build().unwrap();
        let gamma = build_correctable_set(&g, 0, DEFAULT_ENUMERATION_CAP).unwrap();
        let rec = relaxed_test_1(&mut honest(&g), &g, &gamma, &mut SeedStream::new(2).trial(0)).unwrap();
        let line = rec.to_json_line();
        assert!(!line.contains('\n'));
        let back: SyndromeRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
    }
}
