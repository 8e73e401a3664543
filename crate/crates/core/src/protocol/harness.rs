use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::graph::ProtocolGraph;
use crate::mbqc::{
    compile_small_circuit, output_distribution, pattern_z_pattern, run_with_frame, sample_output_bits, Circuit,
    MeasurementPattern, PatternInput, PauliFrame,
};
use crate::noise::{CorrectableSet, NoiseChannel, DEFAULT_ENUMERATION_CAP};
use crate::pauli::PauliString;
use crate::rng::{par_trials, SeedStream};
use crate::state::QuantumState;
use crate::stats::Estimate;
use crate::verify::{relaxed_test, strict_stabilizer_test, StrictMode, TestBranch};

use super::strategy::MerlinState;

/// The computation branch: a compiled pattern run on a fixed witness,
/// accepting when output `accept_output` reads 1.
#[derive(Clone, Debug)]
pub struct ComputationBranch {
    pattern: MeasurementPattern,
    witness: DenseState<f64>,
    accept_output: usize,
    correctable: CorrectableSet,
}

impl ComputationBranch {
    pub fn new(pattern: MeasurementPattern, witness: DenseState<f64>, accept_output: usize, w: usize) -> Result<Self> {
        if witness.num_qubits() != pattern.inputs().len() {
            return Err(Error::DimensionMismatch { expected: pattern.inputs().len(), found: witness.num_qubits() });
        }
        if accept_output >= pattern.outputs().len() {
            return Err(Error::IndexOutOfRange { index: accept_output, n: pattern.outputs().len() });
        }
        let correctable = CorrectableSet::bounded_weight(pattern.num_vertices(), w, DEFAULT_ENUMERATION_CAP)?;
        Ok(Self { pattern, witness, accept_output, correctable })
    }

    pub fn from_circuit(circuit: &Circuit, witness: DenseState<f64>, accept_output: usize, w: usize) -> Result<Self> {
        Self::new(compile_small_circuit(circuit)?, witness, accept_output, w)
    }

    pub fn pattern(&self) -> &MeasurementPattern {
        &self.pattern
    }

    pub fn correctable(&self) -> &CorrectableSet {
        &self.correctable
    }

    /// Noiseless probability that the accept output reads 1.
    pub fn exact_accept_probability(&self) -> Result<f64> {
        self.accept_probability_with(None, None)
    }

    /// Exact acceptance with Z errors `u` on the resource, framed or not.
    pub fn accept_probability_with(&self, u: Option<&BitString>, frame: Option<&PauliFrame>) -> Result<f64> {
        let dist = output_distribution(&self.pattern, &self.witness, u, frame)?;
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> self.accept_output & 1 == 1)
            .map(|(_, p)| p)
            .sum())
    }

    /// One run with the channel acting on the resource. Returns
    /// `(accepted, framed)`.
    fn run<R: Rng + ?Sized>(
        &self,
        channel: &NoiseChannel,
        extra: Option<&BitString>,
        rng: &mut R,
    ) -> Result<(bool, bool)> {
        let n = self.pattern.num_vertices();
        let error = channel.sample_local(n, rng);
        let mut u = pattern_z_pattern(&self.pattern, &error)?;
        if let Some(e) = extra {
            u.xor_assign(e);
        }
        let framed = self.correctable.contains(&u);
        let frame = if framed { Some(PauliFrame::new(&self.pattern, u.clone())?) } else { None };
        let input = PatternInput::Dense(self.witness.clone());
        let run = run_with_frame(&self.pattern, &input, &u, frame.as_ref(), rng)?;
        let bits = sample_output_bits(&self.pattern, &run, rng)?;
        Ok((bits.get(self.accept_output), framed))
    }
}

/// Which test the test branches run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMode {
    Relaxed,
    Strict(StrictMode),
}

/// Everything Arthur needs for one round.
#[derive(Clone, Copy, Debug)]
pub struct Arthur<'a> {
    pub graph: &'a ProtocolGraph,
    pub gamma: &'a CorrectableSet,
    pub channel: &'a NoiseChannel,
    pub computation: &'a ComputationBranch,
    pub q: f64,
    pub mode: TestMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Computation,
    Test1,
    Test2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub branch: Branch,
    pub accept: bool,
    /// For computation rounds, whether the resource error was framed.
    pub framed: Option<bool>,
}

/// One protocol round on Merlin's state. The channel is sampled afresh.
pub fn arthur_round<R: Rng + ?Sized>(arthur: &Arthur<'_>, state: &MerlinState, rng: &mut R) -> Result<RoundOutcome> {
    round_with_shared(arthur, state, None, None, rng)
}

/// A round with optional extra errors shared with other rounds.
pub(crate) fn round_with_shared<R: Rng + ?Sized>(
    arthur: &Arthur<'_>,
    state: &MerlinState,
    graph_extra: Option<&PauliString>,
    pattern_extra: Option<&BitString>,
    rng: &mut R,
) -> Result<RoundOutcome> {
    let r: f64 = rng.random();
    let q = arthur.q;
    let branch = if r < q {
        Branch::Computation
    } else if r < q + (1.0 - q) / 2.0 {
        Branch::Test1
    } else {
        Branch::Test2
    };
    if branch == Branch::Computation {
        let (accept, framed) = arthur.computation.run(arthur.channel, pattern_extra, rng)?;
        return Ok(RoundOutcome { branch, accept, framed: Some(framed) });
    }
    let g = arthur.graph;
    let mut s = state.clone();
    if s.num_qubits() != g.num_vertices() {
        return Err(Error::DimensionMismatch { expected: g.num_vertices(), found: s.num_qubits() });
    }
    let mut error = arthur.channel.sample_error(g.num_vertices(), rng)?;
    if let Some(e) = graph_extra {
        error.mul_assign_right(e)?;
    }
    s.apply_pauli(&error.unsigned())?;
    let accept = match arthur.mode {
        TestMode::Strict(mode) => strict_stabilizer_test(&mut s, g, mode, rng)?,
        TestMode::Relaxed => {
            let which = if branch == Branch::Test1 { TestBranch::Test1 } else { TestBranch::Test2 };
            relaxed_test(&mut s, g, arthur.gamma, which, rng)?.pass
        }
    };
    Ok(RoundOutcome { branch, accept, framed: None })
}

/// Per-branch tallies; merged by addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub runs: [u64; 3],
    pub accepts: [u64; 3],
    pub framed: u64,
}

impl Tally {
    pub fn record(&mut self, o: &RoundOutcome) {
        let i = o.branch as usize;
        self.runs[i] += 1;
        self.accepts[i] += u64::from(o.accept);
        self.framed += u64::from(o.framed == Some(true));
    }

    pub fn merge(mut self, other: Self) -> Self {
        for i in 0..3 {
            self.runs[i] += other.runs[i];
            self.accepts[i] += other.accepts[i];
        }
        self.framed += other.framed;
        self
    }
}

/// Acceptance probability with its per-branch breakdown. Branch estimates
/// are conditional on the branch being drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub shots: u64,
    pub p_acc: Estimate,
    pub p_comp: Estimate,
    pub p_test1: Estimate,
    pub p_test2: Estimate,
    /// Computation rounds whose resource error was inside the correctable
    /// set.
    pub framed_runs: u64,
}

impl AcceptanceReport {
    pub(crate) fn from_tally(t: Tally) -> Self {
        let shots = t.runs.iter().sum();
        Self {
            shots,
            p_acc: Estimate::from_counts(t.accepts.iter().sum(), shots),
            p_comp: Estimate::from_counts(t.accepts[0], t.runs[0]),
            p_test1: Estimate::from_counts(t.accepts[1], t.runs[1]),
            p_test2: Estimate::from_counts(t.accepts[2], t.runs[2]),
            framed_runs: t.framed,
        }
    }
}

/// Monte Carlo acceptance over `shots` independent rounds.
pub fn estimate_acceptance(arthur: &Arthur<'_>, state: &MerlinState, shots: u64, stream: SeedStream) -> Result<AcceptanceReport> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let tally = par_trials(
        shots,
        stream,
        Tally::default(),
        |_, rng| {
            let mut t = Tally::default();
            t.record(&arthur_round(arthur, state, rng)?);
            Ok(t)
        },
        Tally::merge,
    )?;
    Ok(AcceptanceReport::from_tally(tally))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::noise::build_correctable_set;
    use crate::protocol::{honest_merlin_state, Witness};

    #[test]
    fn q_zero_never_computes() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let comp = ComputationBranch::from_circuit(&"H 0".parse().unwrap(), DenseState::zero(1).unwrap(), 0, 1).unwrap();
        let channel = NoiseChannel::noiseless();
        let arthur = Arthur { graph: &g, gamma: &gamma, channel: &channel, computation: &comp, q: 0.0, mode: TestMode::Relaxed };
        let state = honest_merlin_state(&g, &Witness::Zero).unwrap();
        let report = estimate_acceptance(&arthur, &state, 500, SeedStream::new(3)).unwrap();
        assert_eq!(report.p_comp.trials, 0);
        assert_eq!(report.p_acc.successes, 500);
    }
}
