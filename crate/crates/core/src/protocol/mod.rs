//! End-to-end protocol: Merlin strategies, Arthur's branch dispatcher,
//! analytic gap formulas, majority-vote amplification and the
//! encode/correct/decode demo.

mod amplify;
mod gap;
mod harness;
mod strategy;
mod theorem1;

pub use amplify::{amplify, AmplificationReport, SharedEvent};
pub use gap::{
    failed_protocol_delta, gap_analysis, gap_sweep, gap_bound, q_star, GapPoint, GapReport, SweepRow,
};
pub use harness::{
    arthur_round, estimate_acceptance, AcceptanceReport, Arthur, Branch, ComputationBranch, RoundOutcome,
    TestMode,
};
pub use strategy::{honest_merlin_state, near_honest_state, MerlinState, MerlinStrategy, Witness};
pub use theorem1::{theorem1_demo, CodeKind, StabilizerCode, Theorem1Report};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DEFAULT_SEED;

/// Protocol and analysis parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolParams {
    /// Probability of the computation branch.
    pub q: f64,
    /// Test slack `ε`.
    pub epsilon: f64,
    /// Computation-failure exponent: FT-MBQC errs with probability `2^{-s}`.
    pub s: u32,
    /// Promise exponent: `a = 1 − 2^{-t}`, `b = 2^{-t}`.
    pub t: u32,
    /// Channel badness `δ`.
    pub delta: f64,
    /// Number of runs in a majority vote (odd).
    pub r: u32,
    /// Weight bound of the correctable set.
    pub w: usize,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self { q: 0.5, epsilon: 1.0 / 64.0, s: 3, t: 4, delta: 0.0, r: 15, w: 1, shots: 10_000, seed: DEFAULT_SEED }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(0.0..=1.0).contains(&self.q) {
            return bad(format!("q = {} outside [0, 1]", self.q));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return bad(format!("epsilon = {} outside (0, 1/2]", self.epsilon));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad(format!("delta = {} outside [0, 1]", self.delta));
        }
        if self.t < 2 {
            return bad(format!("t = {} leaves no gap between a and b", self.t));
        }
        if self.t > 52 || self.s > 52 {
            return bad("exponents above 52 underflow double precision".into());
        }
        if self.r == 0 || self.r.is_multiple_of(2) {
            return bad(format!("r = {} must be odd and positive", self.r));
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        1.0 - 2f64.powi(-(self.t as i32))
    }

    pub fn b(&self) -> f64 {
        2f64.powi(-(self.t as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ProtocolParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let base = ProtocolParams::default();
        for p in [
            ProtocolParams { q: 1.5, ..base.clone() },
            ProtocolParams { epsilon: 0.0, ..base.clone() },
            ProtocolParams { epsilon: 0.6, ..base.clone() },
            ProtocolParams { t: 1, ..base.clone() },
            ProtocolParams { r: 4, ..base.clone() },
            ProtocolParams { shots: 0, ..base.clone() },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }
}
