//! Reference state-vector simulator used as an oracle by the integration
//! tests. Deliberately naive: every gate is a loop over the full vector.

#![allow(dead_code)]

use noisyqma::{Gate, Pauli, PauliString, ProtocolGraph, Region};
use num_complex::Complex64 as C;

#[derive(Clone, Debug)]
pub struct Sv {
    pub n: usize,
    pub a: Vec<C>,
}

const ZERO: C = C::new(0.0, 0.0);

impl Sv {
    pub fn zero(n: usize) -> Self {
        let mut a = vec![ZERO; 1 << n];
        a[0] = C::new(1.0, 0.0);
        Self { n, a }
    }

    pub fn plus(n: usize) -> Self {
        let v = (1.0 / (1u64 << n) as f64).sqrt();
        Self { n, a: vec![C::new(v, 0.0); 1 << n] }
    }

    pub fn from_amplitudes(a: &[C]) -> Self {
        Self { n: a.len().trailing_zeros() as usize, a: a.to_vec() }
    }

    fn bit(i: usize, q: usize) -> bool {
        i >> q & 1 == 1
    }

    pub fn h(&mut self, q: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.a.len() {
            if !Self::bit(i, q) {
                let j = i | 1 << q;
                let (x, y) = (self.a[i], self.a[j]);
                self.a[i] = (x + y) * r;
                self.a[j] = (x - y) * r;
            }
        }
    }

    pub fn phase(&mut self, q: usize, theta: f64) {
        let f = C::from_polar(1.0, theta);
        for i in 0..self.a.len() {
            if Self::bit(i, q) {
                self.a[i] *= f;
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        for i in 0..self.a.len() {
            if !Self::bit(i, q) {
                self.a.swap(i, i | 1 << q);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        self.phase(q, std::f64::consts::PI);
    }

    pub fn y(&mut self, q: usize) {
        // Y = iXZ
        self.z(q);
        self.x(q);
        for v in &mut self.a {
            *v *= C::i();
        }
    }

    pub fn cz(&mut self, p: usize, q: usize) {
        for i in 0..self.a.len() {
            if Self::bit(i, p) && Self::bit(i, q) {
                self.a[i] = -self.a[i];
            }
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for i in 0..self.a.len() {
            if Self::bit(i, c) && !Self::bit(i, t) {
                self.a.swap(i, i | 1 << t);
            }
        }
    }

    pub fn gate(&mut self, g: Gate) {
        use std::f64::consts::FRAC_PI_2;
        match g {
            Gate::H(q) => self.h(q),
            Gate::S(q) => self.phase(q, FRAC_PI_2),
            Gate::Sdg(q) => self.phase(q, -FRAC_PI_2),
            Gate::X(q) => self.x(q),
            Gate::Y(q) => self.y(q),
            Gate::Z(q) => self.z(q),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::Cnot(a, b) => self.cnot(a, b),
        }
    }

    /// Applies the Pauli string including its phase.
    pub fn pauli(&mut self, p: &PauliString) {
        for q in 0..p.num_qubits() {
            match p.get(q) {
                Pauli::I => {}
                Pauli::X => self.x(q),
                Pauli::Y => self.y(q),
                Pauli::Z => self.z(q),
            }
        }
        let f = C::i().powu(p.phase().exponent() as u32);
        for v in &mut self.a {
            *v *= f;
        }
    }

    pub fn inner(&self, other: &Sv) -> C {
        self.a.iter().zip(&other.a).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn expectation(&self, p: &PauliString) -> f64 {
        let mut img = self.clone();
        img.pauli(p);
        self.inner(&img).re
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        self.a.iter().enumerate().filter(|(i, _)| !Self::bit(*i, q)).map(|(_, v)| v.norm_sqr()).sum()
    }

    /// Collapses qubit `q` onto `bit` and renormalises.
    pub fn collapse(&mut self, q: usize, bit: bool) {
        for (i, v) in self.a.iter_mut().enumerate() {
            if Self::bit(i, q) != bit {
                *v = ZERO;
            }
        }
        let norm = self.norm_sqr().sqrt();
        for v in &mut self.a {
            *v /= norm;
        }
    }
}

/// `Z_u` applied to `|G″⟩` on `V1` tensored with `|0…0⟩` (or `|+…+⟩`) on
/// `V2`, followed by the connecting CZ layer when `with_connect`.
pub fn oracle_state(g: &ProtocolGraph, u: &[usize], with_connect: bool, v2_zero: bool) -> Sv {
    let n = g.num_vertices();
    let mut s = Sv::plus(n);
    if v2_zero {
        for q in g.v2() {
            s.h(q);
        }
    }
    for &(a, b) in g.edges() {
        let inner = g.region(a) == Region::V1 && g.region(b) == Region::V1;
        let connect = g.region(a) != g.region(b);
        if inner || (with_connect && connect) {
            s.cz(a, b);
        }
    }
    for &q in u {
        s.z(q);
    }
    s
}

/// Graph neighbours from the raw edge list.
pub fn neighbours(g: &ProtocolGraph, q: usize) -> Vec<usize> {
    g.edges()
        .iter()
        .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
        .collect()
}

pub fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// `P[Bin(n, p) ≤ k]`.
pub fn binomial_cdf(n: u64, k: u64, p: f64) -> f64 {
    (0..=k.min(n)).map(|j| binomial_pmf(n, j, p)).sum()
}

/// Probability that a strict majority of `r` runs fail when each fails with
/// probability `f`.
pub fn majority_fail(r: u64, f: f64) -> f64 {
    (r / 2 + 1..=r).map(|k| binomial_pmf(r, k, f)).sum()
}

pub fn fixture(name: &str) -> ProtocolGraph {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    ProtocolGraph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}
