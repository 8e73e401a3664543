//! Pauli noise channels, the reduction of Pauli errors on graph states to
//! Z-error patterns, and bounded-weight correctable sets.

use std::collections::HashSet;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph::ProtocolGraph;
use crate::pauli::{Pauli, PauliString};
use crate::rng::{par_count, SeedStream};
use crate::stats::Estimate;

/// A Z-error support `u ∈ {0,1}^N`.
pub type ErrorPattern = BitString;

/// Default limit on the number of enumerated patterns.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    IidPauli,
    ZOnly,
    CustomCorrelated,
}

/// A multi-qubit Pauli error that fires with the given probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliEvent {
    pub pauli: PauliString,
    pub probability: f64,
}

/// Stochastic Pauli channel: independent single-qubit errors plus at most one
/// correlated event per sample (events are mutually exclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseChannel {
    kind: ChannelKind,
    px: f64,
    py: f64,
    pz: f64,
    events: Vec<PauliEvent>,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

impl NoiseChannel {
    pub fn noiseless() -> Self {
        Self { kind: ChannelKind::ZOnly, px: 0.0, py: 0.0, pz: 0.0, events: Vec::new() }
    }

    pub fn z_only(pz: f64) -> Result<Self> {
        check_probability("p_z", pz)?;
        Ok(Self { kind: ChannelKind::ZOnly, px: 0.0, py: 0.0, pz, events: Vec::new() })
    }

    pub fn iid(px: f64, py: f64, pz: f64) -> Result<Self> {
        Self::correlated(px, py, pz, Vec::new()).map(|mut c| {
            c.kind = ChannelKind::IidPauli;
            c
        })
    }

    /// Depolarizing channel: X, Y, Z each with probability `p/3`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Self::iid(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn correlated(px: f64, py: f64, pz: f64, events: Vec<PauliEvent>) -> Result<Self> {
        for (name, p) in [("p_x", px), ("p_y", py), ("p_z", pz)] {
            check_probability(name, p)?;
        }
        if px + py + pz > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "p_x + p_y + p_z = {} exceeds 1",
                px + py + pz
            )));
        }
        let mut total = 0.0;
        for e in &events {
            check_probability("event probability", e.probability)?;
            if !e.pauli.is_hermitian() {
                return Err(Error::InvalidObservable(e.pauli.to_string()));
            }
            total += e.probability;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("event probabilities sum to {total}")));
        }
        Ok(Self { kind: ChannelKind::CustomCorrelated, px, py, pz, events })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn probabilities(&self) -> (f64, f64, f64) {
        (self.px, self.py, self.pz)
    }

    pub fn events(&self) -> &[PauliEvent] {
        &self.events
    }

    pub fn is_noiseless(&self) -> bool {
        self.px + self.py + self.pz == 0.0 && self.events.iter().all(|e| e.probability == 0.0)
    }

    /// Draws the independent single-qubit part of an error on `n` qubits.
    pub fn sample_local<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliString {
        let mut p = PauliString::identity(n);
        let total = self.px + self.py + self.pz;
        if total == 0.0 {
            return p;
        }
        for q in 0..n {
            let r: f64 = rng.random();
            if r < self.px {
                p.set(q, Pauli::X);
            } else if r < self.px + self.py {
                p.set(q, Pauli::Y);
            } else if r < total {
                p.set(q, Pauli::Z);
            }
        }
        p
    }

    /// Draws a full error (local part times at most one correlated event).
    /// The overall phase of the result is dropped.
    pub fn sample_error<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PauliString> {
        let mut p = self.sample_local(n, rng);
        if let Some(event) = self.sample_event(rng) {
            if event.pauli.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: event.pauli.num_qubits() });
            }
            p.mul_assign_right(&event.pauli)?;
        }
        Ok(p.unsigned())
    }

    /// Draws which correlated event (if any) fires.
    pub fn sample_event<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&PauliEvent> {
        if self.events.is_empty() {
            return None;
        }
        let r: f64 = rng.random();
        let mut acc = 0.0;
        for e in &self.events {
            acc += e.probability;
            if r < acc {
                return Some(e);
            }
        }
        None
    }
}

/// Replaces every `X_j` (and the X part of `Y_j`) by `Z` on the neighbors of
/// `j`, so that `p|G⟩ = |G_u⟩` up to phase.
pub fn pauli_to_z_pattern(g: &ProtocolGraph, p: &PauliString) -> Result<ErrorPattern> {
    let n = g.num_vertices();
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.num_qubits() });
    }
    let mut u = p.z_bits().clone();
    for j in p.x_bits().ones() {
        for &i in g.neighbors(j) {
            u.flip(i);
        }
    }
    Ok(u)
}

/// Number of bit-strings of length `n` with weight at most `w`.
pub fn count_bounded_weight(n: usize, w: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=w.min(n) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((n - k) as u128) / (k as u128 + 1);
    }
    total
}

/// All length-`n` patterns of weight at most `w`, lightest first.
pub fn bounded_weight_patterns(n: usize, w: usize, cap: u128) -> Result<Vec<ErrorPattern>> {
    let requested = count_bounded_weight(n, w);
    if requested > cap {
        return Err(Error::EnumerationTooLarge { requested, cap });
    }
    let mut out = Vec::with_capacity(requested as usize);
    for k in 0..=w.min(n) {
        out.extend((0..n).combinations(k).map(|ones| BitString::from_ones(n, ones)));
    }
    Ok(out)
}

/// The correctable family `Γ` and the syndrome sets it induces on the black
/// (`Ω1`) and white (`Ω2`) test vertices.
#[derive(Clone, Debug)]
pub struct CorrectableSet {
    weight_bound: usize,
    members: Vec<ErrorPattern>,
    lookup: HashSet<ErrorPattern>,
    black: Vec<usize>,
    white: Vec<usize>,
    omega1: HashSet<BitString>,
    omega2: HashSet<BitString>,
}

impl CorrectableSet {
    /// Builds `Γ` from explicit members. `0^N` is always added.
    pub fn from_members(
        n: usize,
        weight_bound: usize,
        members: Vec<ErrorPattern>,
        black: Vec<usize>,
        white: Vec<usize>,
    ) -> Result<Self> {
        let mut set = Self {
            weight_bound,
            members: Vec::with_capacity(members.len() + 1),
            lookup: HashSet::with_capacity(members.len() + 1),
            black,
            white,
            omega1: HashSet::new(),
            omega2: HashSet::new(),
        };
        for u in std::iter::once(BitString::zeros(n)).chain(members) {
            if u.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: u.len() });
            }
            if set.lookup.insert(u.clone()) {
                set.omega1.insert(u.restrict(&set.black));
                set.omega2.insert(u.restrict(&set.white));
                set.members.push(u);
            }
        }
        Ok(set)
    }

    /// `Γ` = all patterns of weight at most `w` on `n` vertices, without
    /// syndrome structure. Used for pattern resources.
    pub fn bounded_weight(n: usize, w: usize, cap: u128) -> Result<Self> {
        Self::from_members(n, w, bounded_weight_patterns(n, w, cap)?, Vec::new(), Vec::new())
    }

    pub fn weight_bound(&self) -> usize {
        self.weight_bound
    }

    pub fn members(&self) -> &[ErrorPattern] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &ErrorPattern) -> bool {
        self.lookup.contains(u)
    }

    pub fn omega1(&self) -> &HashSet<BitString> {
        &self.omega1
    }

    pub fn omega2(&self) -> &HashSet<BitString> {
        &self.omega2
    }

    /// `Cond1`: the black-vertex syndrome is in `Ω1`.
    pub fn cond1(&self, syndrome: &BitString) -> bool {
        self.omega1.contains(syndrome)
    }

    /// `Cond2`: the white-vertex syndrome is in `Ω2`.
    pub fn cond2(&self, syndrome: &BitString) -> bool {
        self.omega2.contains(syndrome)
    }
}

/// `Γ` = every Z-pattern of weight at most `w` over all vertices of `g`;
/// `Ω1`, `Ω2` are its restrictions to the black and white `V1` vertices.
pub fn build_correctable_set(g: &ProtocolGraph, w: usize, cap: u128) -> Result<CorrectableSet> {
    let n = g.num_vertices();
    CorrectableSet::from_members(
        n,
        w,
        bounded_weight_patterns(n, w, cap)?,
        g.v1_black().collect(),
        g.v1_white().collect(),
    )
}

/// Monte Carlo estimate of `δ`: the probability that a sampled channel error
/// reduces to a Z-pattern outside `Γ`.
pub fn estimate_channel_goodness(
    g: &ProtocolGraph,
    ch: &NoiseChannel,
    gamma: &CorrectableSet,
    shots: u64,
    stream: SeedStream,
) -> Result<Estimate> {
    let n = g.num_vertices();
    let bad = par_count(shots, stream, |rng| {
        let p = ch.sample_error(n, rng)?;
        Ok(!gamma.contains(&pauli_to_z_pattern(g, &p)?))
    })?;
    Ok(Estimate::from_counts(bad, shots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphSpec, Region};

    #[test]
    fn bounded_weight_counts() {
        assert_eq!(count_bounded_weight(6, 0), 1);
        assert_eq!(count_bounded_weight(6, 1), 7);
        assert_eq!(count_bounded_weight(6, 2), 22);
        assert_eq!(count_bounded_weight(6, 9), 64);
        assert_eq!(bounded_weight_patterns(6, 2, 1000).unwrap().len(), 22);
    }

    #[test]
    fn cap_is_enforced() {
        let err = bounded_weight_patterns(60, 5, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { cap: 1000, .. }));
    }

    #[test]
    fn zero_weight_set() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let gamma = build_correctable_set(&g, 0, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(gamma.len(), 1);
        assert_eq!(gamma.omega1().len(), 1);
        assert!(gamma.cond1(&BitString::zeros(g.v1_black().len())));
        assert!(gamma.cond2(&BitString::zeros(g.v1_white().len())));
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(NoiseChannel::z_only(1.5).is_err());
        assert!(NoiseChannel::iid(0.5, 0.4, 0.2).is_err());
        assert!(NoiseChannel::iid(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn x_on_path_middle_maps_to_ends() {
        let g = GraphSpec::new()
            .vertex(0, Region::V1)
            .vertex(1, Region::V1)
            .vertex(2, Region::V1)
            .edge(0, 1)
            .edge(1, 2)
            .build()
            .unwrap();
        let b = g.qubit_of(1).unwrap();
        let p = PauliString::single(3, b, Pauli::X);
        let u = pauli_to_z_pattern(&g, &p).unwrap();
        let expected = BitString::from_ones(3, [g.qubit_of(0).unwrap(), g.qubit_of(2).unwrap()]);
        assert_eq!(u, expected);
    }
}
