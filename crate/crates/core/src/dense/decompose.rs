//! Expansion of a state in the basis `W(|G″_{(u,v)}⟩ ⊗ |t⟩)` and exact test
//! probabilities from projector sums.

use num_complex::Complex;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph::{ProtocolGraph, Subgraph};
use crate::noise::CorrectableSet;
use crate::scalar::Scalar;
use crate::state::Outcome;

use super::DenseState;

pub use crate::verify::TestBranch;

/// Coefficients `C_{(u,v),t}` with `u` on the black and `v` on the white
/// `V1` vertices and `t` a computational basis index of `V2`.
#[derive(Clone, Debug)]
pub struct GraphBasisDecomposition<T: Scalar> {
    n1b: usize,
    n1: usize,
    n2: usize,
    /// Index `w + 2^{|V1|}·t`, `w` the `V1` pattern (blacks in the low bits).
    coeffs: Vec<Complex<T>>,
}

/// Squared-coefficient masses split by `Cond1`/`Cond2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Masses<T> {
    pub yy: T,
    pub yn: T,
    pub ny: T,
    pub nn: T,
}

fn check_graph<T: Scalar>(psi: &DenseState<T>, g: &ProtocolGraph) -> Result<()> {
    if psi.num_qubits() != g.num_vertices() {
        return Err(Error::DimensionMismatch { expected: g.num_vertices(), found: psi.num_qubits() });
    }
    Ok(())
}

/// Signs `(−1)^{Σ_{(i,j)∈E1} x_i x_j}` over `V1` basis indices.
fn e1_signs(g: &ProtocolGraph) -> Vec<bool> {
    let e1 = g.e1();
    (0..1usize << g.num_v1())
        .map(|x| e1.iter().filter(|&&(a, b)| x >> a & 1 == 1 && x >> b & 1 == 1).count() % 2 == 1)
        .collect()
}

/// In-place unnormalised Walsh-Hadamard transform.
fn walsh_hadamard<T: Scalar>(v: &mut [Complex<T>]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(h << 1) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h <<= 1;
    }
}

pub fn graph_basis_decompose<T: Scalar>(psi: &DenseState<T>, g: &ProtocolGraph) -> Result<GraphBasisDecomposition<T>> {
    check_graph(psi, g)?;
    let mut phi = psi.clone();
    g.entangling_layer().apply(&mut phi)?;
    let n1 = g.num_v1();
    let dim1 = 1usize << n1;
    let signs = e1_signs(g);
    let norm = T::one() / T::of(dim1 as f64).sqrt();
    let mut coeffs = phi.amplitudes().to_vec();
    for slice in coeffs.chunks_mut(dim1) {
        for (x, a) in slice.iter_mut().enumerate() {
            if signs[x] {
                *a = -*a;
            }
        }
        walsh_hadamard(slice);
        for a in slice.iter_mut() {
            *a = *a * norm;
        }
    }
    Ok(GraphBasisDecomposition { n1b: g.v1_black().len(), n1, n2: g.num_v2(), coeffs })
}

impl<T: Scalar> GraphBasisDecomposition<T> {
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `C_{(u,v),t}`.
    pub fn coefficient(&self, u: &BitString, v: &BitString, t: usize) -> Complex<T> {
        let w = u.to_u64() as usize | (v.to_u64() as usize) << self.n1b;
        self.coeffs[w + (t << self.n1)]
    }

    pub fn total_mass(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    fn split(&self, w: usize) -> (BitString, BitString) {
        let u = BitString::from_u64(self.n1b, (w & ((1 << self.n1b) - 1)) as u64);
        let v = BitString::from_u64(self.n1 - self.n1b, (w >> self.n1b) as u64);
        (u, v)
    }

    /// Membership of every `V1` pattern in `Ω1 × Ω2`.
    fn conditions(&self, gamma: &CorrectableSet) -> Vec<(bool, bool)> {
        (0..1usize << self.n1)
            .map(|w| {
                let (u, v) = self.split(w);
                (gamma.cond1(&u), gamma.cond2(&v))
            })
            .collect()
    }

    pub fn masses(&self, gamma: &CorrectableSet) -> Masses<T> {
        let conds = self.conditions(gamma);
        let mut m = Masses { yy: T::zero(), yn: T::zero(), ny: T::zero(), nn: T::zero() };
        let mask = (1usize << self.n1) - 1;
        for (i, c) in self.coeffs.iter().enumerate() {
            let slot = match conds[i & mask] {
                (true, true) => &mut m.yy,
                (true, false) => &mut m.yn,
                (false, true) => &mut m.ny,
                (false, false) => &mut m.nn,
            };
            *slot = *slot + c.norm_sqr();
        }
        m
    }

    /// Rebuilds `Σ C W(|G″_w⟩ ⊗ |t⟩)` from (possibly edited) coefficients.
    pub fn reconstruct(&self, g: &ProtocolGraph) -> Result<DenseState<T>> {
        if g.num_v1() != self.n1 || g.num_v2() != self.n2 {
            return Err(Error::DimensionMismatch { expected: self.n1 + self.n2, found: g.num_vertices() });
        }
        let dim1 = 1usize << self.n1;
        let signs = e1_signs(g);
        let norm = T::one() / T::of(dim1 as f64).sqrt();
        let mut amps = self.coeffs.clone();
        for slice in amps.chunks_mut(dim1) {
            walsh_hadamard(slice);
            for (x, a) in slice.iter_mut().enumerate() {
                *a = if signs[x] { -*a * norm } else { *a * norm };
            }
        }
        let mut s = DenseState::from_amplitudes(amps)?;
        g.entangling_layer().apply(&mut s)?;
        Ok(s)
    }

    /// `|Ψ′⟩`: the coefficients with `(u, v) ∈ Ω1 × Ω2`, renormalised by
    /// `√R`. `None` when `R = 0`.
    pub fn projected(&self, g: &ProtocolGraph, gamma: &CorrectableSet) -> Result<Option<DenseState<T>>> {
        let conds = self.conditions(gamma);
        let mask = (1usize << self.n1) - 1;
        let mut kept = self.clone();
        let mut r = T::zero();
        for (i, c) in kept.coeffs.iter_mut().enumerate() {
            if conds[i & mask] == (true, true) {
                r = r + c.norm_sqr();
            } else {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        if r <= T::zero() {
            return Ok(None);
        }
        let inv = T::one() / r.sqrt();
        for c in &mut kept.coeffs {
            *c = *c * inv;
        }
        kept.reconstruct(g).map(Some)
    }
}

/// Probability of every syndrome of a relaxed test, from the projectors
/// `∏_j (I + (−1)^{ω_j} g′_j)/2` over the X-measured `V1` vertices.
pub fn syndrome_distribution<T: Scalar>(
    psi: &DenseState<T>,
    g: &ProtocolGraph,
    branch: TestBranch,
) -> Result<Vec<(BitString, T)>> {
    check_graph(psi, g)?;
    let vertices: Vec<usize> = g.v1().filter(|&q| g.color(q) == branch.x_color()).collect();
    let gens = vertices
        .iter()
        .map(|&j| g.stabilizer_generator(j, Subgraph::Connected))
        .collect::<Result<Vec<_>>>()?;
    let total = psi.norm_sqr();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, BitString::zeros(vertices.len()), psi.clone())];
    let floor = T::epsilon() * T::epsilon();
    while let Some((depth, omega, state)) = stack.pop() {
        let mass = state.norm_sqr() / total;
        if mass <= floor {
            continue;
        }
        if depth == gens.len() {
            out.push((omega, mass));
            continue;
        }
        for bit in [true, false] {
            let mut branch_state = state.clone();
            branch_state.apply_projector(&gens[depth], Outcome::from_bit(bit))?;
            let mut w = omega.clone();
            w.set(depth, bit);
            stack.push((depth + 1, w, branch_state));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Exact pass probability of relaxed test 1 or 2.
pub fn test_pass_probability<T: Scalar>(
    psi: &DenseState<T>,
    g: &ProtocolGraph,
    gamma: &CorrectableSet,
    branch: TestBranch,
) -> Result<T> {
    Ok(syndrome_distribution(psi, g, branch)?
        .into_iter()
        .filter(|(omega, _)| match branch {
            TestBranch::Test1 => gamma.cond1(omega),
            TestBranch::Test2 => gamma.cond2(omega),
        })
        .fold(T::zero(), |acc, (_, p)| acc + p))
}

/// Exact strict-test pass probability `(1 + ‖∏_{j∈V1}(I + g′_j)/2 ψ‖²)/2`.
pub fn strict_test_pass_probability<T: Scalar>(psi: &DenseState<T>, g: &ProtocolGraph) -> Result<T> {
    check_graph(psi, g)?;
    let mut projected = psi.clone();
    for j in g.v1() {
        projected.apply_projector(&g.stabilizer_generator(j, Subgraph::Connected)?, Outcome::Plus)?;
    }
    let half = T::of(0.5);
    Ok(half + half * projected.norm_sqr() / psi.norm_sqr())
}

/// Result of checking the trace-distance bound implied by the two relaxed
/// test probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eq2Report<T> {
    pub p_test1: T,
    pub p_test2: T,
    /// `1 − min(p_test1, p_test2)`.
    pub epsilon: T,
    pub masses: Masses<T>,
    /// `⟨Ψ|Ψ′⟩`.
    pub overlap: T,
    pub trace_distance: T,
    /// `√(4ε − 4ε²)`.
    pub bound: T,
    /// Both test probabilities are at least 1/2.
    pub in_range: bool,
    pub holds: bool,
}

pub fn verify_eq2_bound<T: Scalar>(psi: &DenseState<T>, g: &ProtocolGraph, gamma: &CorrectableSet) -> Result<Eq2Report<T>> {
    let p_test1 = test_pass_probability(psi, g, gamma, TestBranch::Test1)?;
    let p_test2 = test_pass_probability(psi, g, gamma, TestBranch::Test2)?;
    let epsilon = (T::one() - p_test1.min(p_test2)).max(T::zero());
    let decomposition = graph_basis_decompose(psi, g)?;
    let masses = decomposition.masses(gamma);
    let four = T::of(4.0);
    let bound = (four * epsilon - four * epsilon * epsilon).max(T::zero()).sqrt();
    let (overlap, trace_distance) = match decomposition.projected(g, gamma)? {
        Some(prime) => (psi.inner(&prime)?.norm(), psi.trace_distance(&prime)?),
        None => (T::zero(), T::one()),
    };
    let in_range = epsilon <= T::of(0.5);
    let holds = trace_distance <= bound + T::of(1e-9);
    Ok(Eq2Report { p_test1, p_test2, epsilon, masses, overlap, trace_distance, bound, in_range, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::noise::{build_correctable_set, DEFAULT_ENUMERATION_CAP};
    use crate::rng::SeedStream;

    #[test]
    fn honest_state_has_single_coefficient() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let mut psi = g.dense_graph_state::<f64>(Subgraph::Inner).unwrap();
        // V2 in |0…0⟩ instead of |+…+⟩.
        for q in g.v2() {
            psi.apply_gate(crate::gates::Gate::H(q)).unwrap();
        }
        g.entangling_layer().apply(&mut psi).unwrap();
        let d = graph_basis_decompose(&psi, &g).unwrap();
        assert!((d.coefficients()[0].norm() - 1.0).abs() < 1e-12);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_state_round_trips() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let mut rng = SeedStream::new(11).trial(0);
        let psi = DenseState::<f64>::random(6, &mut rng).unwrap();
        let d = graph_basis_decompose(&psi, &g).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-9);
        let back = d.reconstruct(&g).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
        let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let m = d.masses(&gamma);
        assert!((m.yy + m.yn + m.ny + m.nn - 1.0).abs() < 1e-9);
    }
}
