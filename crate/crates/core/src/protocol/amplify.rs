use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::{par_trials, SeedStream};
use crate::stats::{hoeffding_majority_bound, majority_failure, Estimate};

use super::harness::{round_with_shared, Arthur, Tally};
use super::strategy::MerlinState;

/// An error that, when it fires, hits every run of one majority vote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedEvent {
    pub probability: f64,
    /// Extra Pauli on the test-graph register.
    pub graph_error: PauliString,
    /// Extra Z pattern on the computation resource.
    pub pattern_error: BitString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationReport {
    pub runs: u32,
    pub trials: u64,
    /// Single-round acceptance pooled over every run of every trial.
    pub per_run_accept: Estimate,
    pub majority_accept: Estimate,
    /// Trials in which the shared event fired.
    pub shared_events: u64,
    /// Majority rejection predicted for independent runs at the pooled
    /// per-run rate.
    pub independent_reject: f64,
    /// Hoeffding bound `exp(−2r(p − 1/2)²)` at the pooled rate.
    pub hoeffding_reject: f64,
}

impl AmplificationReport {
    pub fn majority_reject(&self) -> f64 {
        1.0 - self.majority_accept.mean
    }
}

#[derive(Clone, Copy, Default)]
struct AmpTally {
    rounds: Tally,
    majority: u64,
    events: u64,
}

/// Runs `trials` independent majority votes of `r` rounds each. Every
/// trial draws from its own stream so results do not depend on the
/// worker count.
pub fn amplify(
    arthur: &Arthur<'_>,
    state: &MerlinState,
    r: u32,
    trials: u64,
    shared: Option<&SharedEvent>,
    stream: SeedStream,
) -> Result<AmplificationReport> {
    if r == 0 || r.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("r = {r} must be odd and positive")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if let Some(e) = shared {
        if !(0.0..=1.0).contains(&e.probability) {
            return Err(Error::InvalidParameter(format!("shared event probability {} outside [0, 1]", e.probability)));
        }
    }
    let t = par_trials(
        trials,
        stream,
        AmpTally::default(),
        |_, rng| {
            let fired = match shared {
                Some(e) => rng.random::<f64>() < e.probability,
                None => false,
            };
            let (ge, pe) = match shared {
                Some(e) if fired => (Some(&e.graph_error), Some(&e.pattern_error)),
                _ => (None, None),
            };
            let mut tally = AmpTally { events: u64::from(fired), ..AmpTally::default() };
            let mut accepts = 0u32;
            for _ in 0..r {
                let o = round_with_shared(arthur, state, ge, pe, rng)?;
                accepts += u32::from(o.accept);
                tally.rounds.record(&o);
            }
            tally.majority = u64::from(2 * accepts > r);
            Ok(tally)
        },
        |a, b| AmpTally { rounds: a.rounds.merge(b.rounds), majority: a.majority + b.majority, events: a.events + b.events },
    )?;
    let total_runs: u64 = t.rounds.runs.iter().sum();
    let per_run_accept = Estimate::from_counts(t.rounds.accepts.iter().sum(), total_runs);
    Ok(AmplificationReport {
        runs: r,
        trials,
        independent_reject: majority_failure(u64::from(r), 1.0 - per_run_accept.mean),
        hoeffding_reject: hoeffding_majority_bound(u64::from(r), per_run_accept.mean),
        per_run_accept,
        majority_accept: Estimate::from_counts(t.majority, trials),
        shared_events: t.events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseState;
    use crate::graph::GraphSpec;
    use crate::noise::{build_correctable_set, NoiseChannel, DEFAULT_ENUMERATION_CAP};
    use crate::protocol::{honest_merlin_state, ComputationBranch, TestMode, Witness};

    #[test]
    fn worker_count_does_not_change_results() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let comp = ComputationBranch::from_circuit(&"H 0; RZ 0 2.748893571891069; H 0".parse().unwrap(), DenseState::zero(1).unwrap(), 0, 1)
            .unwrap();
        let channel = NoiseChannel::depolarizing(0.02).unwrap();
        let arthur = Arthur { graph: &g, gamma: &gamma, channel: &channel, computation: &comp, q: 0.5, mode: TestMode::Relaxed };
        let state = honest_merlin_state(&g, &Witness::Zero).unwrap();
        let run = |workers| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
            pool.install(|| amplify(&arthur, &state, 5, 200, None, SeedStream::new(11)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn even_r_is_rejected() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let comp = ComputationBranch::from_circuit(&"H 0".parse().unwrap(), DenseState::zero(1).unwrap(), 0, 1).unwrap();
        let channel = NoiseChannel::noiseless();
        let arthur = Arthur { graph: &g, gamma: &gamma, channel: &channel, computation: &comp, q: 0.5, mode: TestMode::Relaxed };
        let state = honest_merlin_state(&g, &Witness::Zero).unwrap();
        assert!(amplify(&arthur, &state, 4, 10, None, SeedStream::new(1)).is_err());
    }
}
