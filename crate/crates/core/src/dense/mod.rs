//! Brute-force state-vector simulator used as an independent oracle.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian). Amplitudes are
//! `Complex<T>` for any [`Scalar`] `T`.

mod decompose;
mod density;

pub use decompose::{
    graph_basis_decompose, strict_test_pass_probability, syndrome_distribution,
    test_pass_probability, verify_eq2_bound, Eq2Report, GraphBasisDecomposition, Masses,
};
pub use density::{DensityMatrix, DENSITY_CAP};

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pauli::PauliString;
use crate::scalar::Scalar;
use crate::state::{Outcome, QuantumState};
use crate::tableau::{check_permutation, StabilizerTableau};

/// Largest register the dense simulator accepts.
pub const DENSE_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T: Scalar> {
    n: usize,
    amps: Vec<Complex<T>>,
}

#[inline]
pub(crate) fn times_i_pow<T: Scalar>(c: Complex<T>, k: u8) -> Complex<T> {
    match k & 3 {
        0 => c,
        1 => Complex::new(-c.im, c.re),
        2 => -c,
        _ => Complex::new(c.im, -c.re),
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        Err(Error::DenseCapExceeded { n, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

impl<T: Scalar> DenseState<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        let dim = amps.len();
        *amps.get_mut(index).ok_or(Error::IndexOutOfRange { index, n: dim })? =
            Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// `|+…+⟩`.
    pub fn plus(n: usize) -> Result<Self> {
        check_cap(n)?;
        let a = T::one() / T::of((1u64 << n) as f64).sqrt();
        Ok(Self { n, amps: vec![Complex::new(a, T::zero()); 1 << n] })
    }

    /// Wraps raw amplitudes without normalising them.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || amps.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        check_cap(n)?;
        Ok(Self { n, amps })
    }

    /// Haar-ish random state (normalised complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_cap(n)?;
        let amps = (0..1usize << n)
            .map(|_| Complex::new(T::of(gaussian(rng)), T::of(gaussian(rng))))
            .collect();
        let mut s = Self { n, amps };
        s.normalize();
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Normalises in place and returns the previous squared norm.
    pub fn normalize(&mut self) -> T {
        let ns = self.norm_sqr();
        if ns > T::zero() {
            let inv = T::one() / ns.sqrt();
            for a in &mut self.amps {
                *a = *a * inv;
            }
        }
        ns
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Trace distance between the two pure states, `√(1 − |⟨a|b⟩|²)`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        let f = self.fidelity(other)? / (self.norm_sqr() * other.norm_sqr());
        Ok((T::one() - f).max(T::zero()).sqrt())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        match gate {
            Gate::H(q) => {
                let h = T::FRAC_1_SQRT_2();
                self.for_pairs(q, |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = (x + y) * h;
                    *a1 = (x - y) * h;
                });
            }
            Gate::S(q) => self.for_pairs(q, |_, a1| *a1 = times_i_pow(*a1, 1)),
            Gate::Sdg(q) => self.for_pairs(q, |_, a1| *a1 = times_i_pow(*a1, 3)),
            Gate::X(q) => self.for_pairs(q, std::mem::swap),
            Gate::Y(q) => self.for_pairs(q, |a0, a1| {
                let (x, y) = (*a0, *a1);
                *a0 = times_i_pow(y, 3);
                *a1 = times_i_pow(x, 1);
            }),
            Gate::Z(q) => self.for_pairs(q, |_, a1| *a1 = -*a1),
            Gate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Cnot(c, t) => {
                let (cm, tm) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    /// `diag(1, e^{iθ})` on qubit `q`.
    pub fn apply_phase(&mut self, q: usize, theta: T) -> Result<()> {
        self.check_qubit(q)?;
        let w = Complex::new(theta.cos(), theta.sin());
        self.for_pairs(q, |_, a1| *a1 = *a1 * w);
        Ok(())
    }

    pub fn apply_t(&mut self, q: usize) -> Result<()> {
        self.apply_phase(q, T::FRAC_PI_4())
    }

    fn for_pairs(&mut self, q: usize, mut f: impl FnMut(&mut Complex<T>, &mut Complex<T>)) {
        let bit = 1usize << q;
        for block in self.amps.chunks_mut(bit << 1) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a0, a1);
            }
        }
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        Ok(())
    }

    /// `P|ψ⟩` as a new vector (phase included).
    pub fn pauli_image(&self, p: &PauliString) -> Result<Self> {
        self.check_pauli(p)?;
        let xm = p.x_bits().to_u64() as usize;
        let zm = p.z_bits().to_u64() as usize;
        let base = p.phase_exponent() + ((xm & zm).count_ones() & 3) as u8;
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let sign = if (b & zm).count_ones() % 2 == 1 { 2 } else { 0 };
            out[b ^ xm] = times_i_pow(a, base + sign);
        }
        Ok(Self { n: self.n, amps: out })
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        *self = self.pauli_image(p)?;
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` (real part; exact for Hermitian `P`).
    pub fn expectation(&self, p: &PauliString) -> Result<T> {
        Ok(self.inner(&self.pauli_image(p)?)?.re / self.norm_sqr())
    }

    /// `ψ ← (I + s·P)/2 ψ` without renormalising, `s = ±1` from `outcome`.
    pub fn apply_projector(&mut self, p: &PauliString, outcome: Outcome) -> Result<()> {
        if !p.is_hermitian() {
            return Err(Error::InvalidObservable(p.to_string()));
        }
        let img = self.pauli_image(p)?;
        let half = T::of(0.5);
        for (a, b) in self.amps.iter_mut().zip(img.amps) {
            *a = match outcome {
                Outcome::Plus => (*a + b) * half,
                Outcome::Minus => (*a - b) * half,
            };
        }
        Ok(())
    }

    /// Projects onto an eigenspace of `p`, renormalises, returns its probability.
    pub fn postselect_pauli(&mut self, p: &PauliString, outcome: Outcome) -> Result<T> {
        let before = self.norm_sqr();
        self.apply_projector(p, outcome)?;
        let prob = self.norm_sqr() / before;
        if prob <= T::epsilon() * T::epsilon() {
            return Err(Error::ImpossibleOutcome);
        }
        self.normalize();
        Ok(prob)
    }

    /// Computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `self ⊗ other` with `other` on the high qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_cap(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| *a * b));
        }
        Ok(Self { n: self.n + other.n, amps })
    }

    /// Relabels qubits: old qubit `q` becomes `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (q, &target) in perm.iter().enumerate() {
                if i >> q & 1 == 1 {
                    j |= 1 << target;
                }
            }
            amps[j] = a;
        }
        Ok(Self { n: self.n, amps })
    }

    /// Contracts qubit `q` against `⟨ket|`, removing it from the register.
    /// The result is not renormalised.
    pub fn contract_qubit(&self, q: usize, ket: [Complex<T>; 2]) -> Result<Self> {
        self.check_qubit(q)?;
        let low = (1usize << q) - 1;
        let amps = (0..self.amps.len() / 2)
            .map(|r| {
                let i0 = (r & low) | ((r & !low) << 1);
                let i1 = i0 | (1 << q);
                ket[0].conj() * self.amps[i0] + ket[1].conj() * self.amps[i1]
            })
            .collect();
        Ok(Self { n: self.n - 1, amps })
    }

    /// Projects qubit `q` onto `|±_θ⟩ = (|0⟩ ± e^{iθ}|1⟩)/√2` (`s` selects the
    /// sign), renormalises, and returns the outcome probability.
    pub fn project_xy(&mut self, q: usize, theta: T, s: bool) -> Result<T> {
        self.project_onto(q, xy_ket(theta, s))
    }

    /// Projects qubit `q` onto `|bit⟩`.
    pub fn project_z(&mut self, q: usize, bit: bool) -> Result<T> {
        self.project_onto(q, z_ket(bit))
    }

    fn project_onto(&mut self, q: usize, ket: [Complex<T>; 2]) -> Result<T> {
        self.check_qubit(q)?;
        let before = self.norm_sqr();
        self.for_pairs(q, |a0, a1| {
            let overlap = ket[0].conj() * *a0 + ket[1].conj() * *a1;
            *a0 = ket[0] * overlap;
            *a1 = ket[1] * overlap;
        });
        let prob = self.norm_sqr() / before;
        if prob > T::zero() {
            self.normalize();
        }
        Ok(prob)
    }

    /// Samples a measurement of qubit `q` in the `XY`-plane basis at angle
    /// `θ`; returns `s` (0 for `|+_θ⟩`).
    pub fn measure_xy<R: Rng + ?Sized>(&mut self, q: usize, theta: T, rng: &mut R) -> Result<bool> {
        let mut trial = self.clone();
        let p0 = trial.project_xy(q, theta, false)?;
        let s = T::of(rng.random::<f64>()) >= p0;
        if s {
            self.project_xy(q, theta, true)?;
        } else {
            *self = trial;
        }
        Ok(s)
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        let mut trial = self.clone();
        let p0 = trial.project_z(q, false)?;
        let bit = T::of(rng.random::<f64>()) >= p0;
        if bit {
            self.project_z(q, true)?;
        } else {
            *self = trial;
        }
        Ok(bit)
    }

    /// Reduced density matrix on `keep` (in that order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        let k = keep.len();
        let dim = 1usize << k;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        let kept_mask: usize = keep.iter().map(|&q| 1usize << q).sum();
        let rest: Vec<usize> = (0..self.n).filter(|q| kept_mask >> q & 1 == 0).collect();
        let compose = |sub: usize, env: usize| {
            let mut i = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                i |= (sub >> j & 1) << q;
            }
            for (j, &q) in rest.iter().enumerate() {
                i |= (env >> j & 1) << q;
            }
            i
        };
        for env in 0..1usize << rest.len() {
            for r in 0..dim {
                let ar = self.amps[compose(r, env)];
                for c in 0..dim {
                    let ac = self.amps[compose(c, env)];
                    data[r * dim + c] = data[r * dim + c] + ar * ac.conj();
                }
            }
        }
        DensityMatrix::from_raw(k, data)
    }

    /// Dense vector of a stabilizer tableau.
    pub fn from_tableau(t: &StabilizerTableau) -> Result<Self> {
        let n = t.num_qubits();
        check_cap(n)?;
        // Collapse a copy onto a computational basis state in the support,
        // then project that basis state onto the stabilizer group.
        let mut probe = t.clone();
        let mut index = 0usize;
        for q in 0..n {
            let z = PauliString::single(n, q, crate::pauli::Pauli::Z);
            let m = probe.measure_with(&z, || false)?;
            if m.outcome == Outcome::Minus {
                index |= 1 << q;
            }
        }
        let mut s = Self::basis(n, index)?;
        for g in t.stabilizers() {
            s.apply_projector(g, Outcome::Plus)?;
        }
        s.normalize();
        Ok(s)
    }
}

pub(crate) fn xy_ket<T: Scalar>(theta: T, s: bool) -> [Complex<T>; 2] {
    let h = T::FRAC_1_SQRT_2();
    let sign = if s { -h } else { h };
    [Complex::new(h, T::zero()), Complex::new(theta.cos() * sign, theta.sin() * sign)]
}

pub(crate) fn z_ket<T: Scalar>(bit: bool) -> [Complex<T>; 2] {
    let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    if bit {
        [z, o]
    } else {
        [o, z]
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

impl<T: Scalar> QuantumState for DenseState<T> {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        DenseState::apply_gate(self, gate)
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        DenseState::apply_pauli(self, p)
    }

    fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Outcome> {
        if !p.is_hermitian() {
            return Err(Error::InvalidObservable(p.to_string()));
        }
        let mut plus = self.clone();
        plus.apply_projector(p, Outcome::Plus)?;
        let p_plus = plus.norm_sqr() / self.norm_sqr();
        if T::of(rng.random::<f64>()) < p_plus {
            plus.normalize();
            *self = plus;
            Ok(Outcome::Plus)
        } else {
            self.apply_projector(p, Outcome::Minus)?;
            self.normalize();
            Ok(Outcome::Minus)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    type D = DenseState<f64>;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn zero_tableau_is_first_basis_vector() {
        let d = D::from_tableau(&StabilizerTableau::new(1)).unwrap();
        assert!((d.amplitudes()[0].re - 1.0).abs() < 1e-12);
        assert!(d.amplitudes()[1].norm() < 1e-12);
    }

    #[test]
    fn two_vertex_path_graph_state() {
        // CZ|++> = (|0+> + |1->)/√2; little-endian index = q0 + 2 q1.
        let mut t = StabilizerTableau::plus_state(2);
        t.apply_gate(Gate::Cz(0, 1)).unwrap();
        let d = D::from_tableau(&t).unwrap();
        let mut direct = D::plus(2).unwrap();
        direct.apply_gate(Gate::Cz(0, 1)).unwrap();
        assert!((d.fidelity(&direct).unwrap() - 1.0).abs() < 1e-12);
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in direct.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_extremes() {
        let a = D::zero(1).unwrap();
        let b = D::basis(1, 1).unwrap();
        assert!(a.trace_distance(&a).unwrap() < 1e-12);
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&D::zero(2).unwrap()).is_err());
    }

    #[test]
    fn trace_distance_at_overlap_one_minus_two_eps() {
        let eps = 1.0 / 64.0;
        let c: f64 = 1.0 - 2.0 * eps;
        let s = (1.0 - c * c).sqrt();
        let a = D::zero(1).unwrap();
        let b = D::from_amplitudes(vec![Complex::new(c, 0.0), Complex::new(s, 0.0)]).unwrap();
        let td = a.trace_distance(&b).unwrap();
        assert!((td - (4.0 * eps - 4.0 * eps * eps).sqrt()).abs() < 1e-12);
        assert!((td - 0.248_039).abs() < 1e-6);
    }

    #[test]
    fn pauli_image_matches_gate_action() {
        let mut rng = SeedStream::new(5).trial(0);
        let psi = D::random(3, &mut rng).unwrap();
        let mut via_gates = psi.clone();
        via_gates.apply_gate(Gate::X(0)).unwrap();
        via_gates.apply_gate(Gate::Y(1)).unwrap();
        via_gates.apply_gate(Gate::Z(2)).unwrap();
        let via_pauli = psi.pauli_image(&p("XYZ")).unwrap();
        for (a, b) in via_gates.amplitudes().iter().zip(via_pauli.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(D::zero(DENSE_CAP + 1), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn contract_and_permute() {
        let mut psi = D::zero(2).unwrap();
        psi.apply_gate(Gate::H(1)).unwrap();
        let reduced = psi.contract_qubit(0, z_ket(false)).unwrap();
        assert_eq!(reduced.num_qubits(), 1);
        assert!((reduced.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let swapped = psi.permute_qubits(&[1, 0]).unwrap();
        assert!((swapped.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn xy_measurement_of_plus_at_zero_is_deterministic() {
        let mut psi = D::plus(1).unwrap();
        let mut rng = SeedStream::new(3).trial(0);
        for _ in 0..20 {
            assert!(!psi.clone().measure_xy(0, 0.0, &mut rng).unwrap());
        }
        let prob = psi.project_xy(0, std::f64::consts::FRAC_PI_2, false).unwrap();
        assert!((prob - 0.5).abs() < 1e-12);
    }

    #[test]
    fn f32_states_work() {
        let mut s = DenseState::<f32>::plus(2).unwrap();
        s.apply_gate(Gate::Cz(0, 1)).unwrap();
        assert!((s.expectation(&p("XZ")).unwrap() - 1.0).abs() < 1e-5);
    }
}
