mod common;

use common::{binomial_cdf, fixture, Sv};
use noisyqma::gates::random_clifford_circuit;
use noisyqma::mbqc::output_distribution;
use noisyqma::noise::{estimate_channel_goodness, DEFAULT_ENUMERATION_CAP};
use noisyqma::protocol::{gap_analysis, CodeKind, StabilizerCode};
use noisyqma::verify::estimate_pass_probability;
use noisyqma::{
    build_correctable_set, compile_small_circuit, pauli_to_z_pattern, BitString, Circuit, CircuitGate, DenseState,
    GraphSpec, MerlinStrategy, NoiseChannel, Pauli, PauliFrame, PauliString, ProtocolGraph, ProtocolParams, SeedStream,
    StabilizerTableau, StrictMode, Subgraph, TestSelector, Witness,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_graph() -> ProtocolGraph {
    GraphSpec::grid(2, 4, |_, c| c < 3).build().unwrap()
}

fn pauli_from(n: usize, codes: &[u8]) -> PauliString {
    let mut p = PauliString::identity(n);
    for (q, &c) in codes.iter().enumerate().take(n) {
        p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c as usize % 4]);
    }
    p
}

fn random_sv(n: usize, seed: u64) -> Sv {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sv::from_amplitudes(DenseState::<f64>::random(n, &mut rng).unwrap().amplitudes())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tableau_stabilizers_hold_on_the_oracle(seed in any::<u64>(), n in 1usize..=6, depth in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_clifford_circuit(n, depth, &mut rng);
        let mut tab = StabilizerTableau::new(n);
        let mut sv = Sv::zero(n);
        for &g in &gates {
            tab.apply_gate(g).unwrap();
            sv.gate(g);
        }
        for s in tab.stabilizers() {
            prop_assert!((sv.expectation(s) - 1.0).abs() < 1e-10);
        }
        let dense = DenseState::<f64>::from_tableau(&tab).unwrap();
        prop_assert!((Sv::from_amplitudes(dense.amplitudes()).inner(&sv).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn graph_basis_is_orthonormal(a in 0u64..256, b in 0u64..256) {
        let g = small_graph();
        let n = g.num_vertices();
        let (u, v) = (BitString::from_u64(n, a), BitString::from_u64(n, b));
        let su = DenseState::<f64>::from_tableau(&g.gu_state(&u).unwrap()).unwrap();
        let sv = DenseState::<f64>::from_tableau(&g.gu_state(&v).unwrap()).unwrap();
        let overlap = su.inner(&sv).unwrap().norm();
        if a == b {
            prop_assert!((overlap - 1.0).abs() < 1e-10);
        } else {
            prop_assert!(overlap < 1e-10);
        }
    }

    #[test]
    fn pauli_errors_reduce_to_z_patterns(codes in prop::collection::vec(0u8..4, 8)) {
        let g = small_graph();
        let p = pauli_from(g.num_vertices(), &codes);
        let u = pauli_to_z_pattern(&g, &p).unwrap();
        let full = |zs: &[usize]| {
            let mut s = Sv::plus(g.num_vertices());
            for &(a, b) in g.edges() {
                s.cz(a, b);
            }
            zs.iter().for_each(|&q| s.z(q));
            s
        };
        let mut hit = full(&[]);
        hit.pauli(&p);
        let target = full(&u.ones().collect::<Vec<_>>());
        prop_assert!((hit.inner(&target).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn z_reduction_is_a_homomorphism(a in prop::collection::vec(0u8..4, 8), b in prop::collection::vec(0u8..4, 8)) {
        let g = small_graph();
        let (p, q) = (pauli_from(8, &a), pauli_from(8, &b));
        let pq = p.multiply(&q).unwrap();
        let lhs = pauli_to_z_pattern(&g, &pq).unwrap();
        let rhs = pauli_to_z_pattern(&g, &p).unwrap().xor(&pauli_to_z_pattern(&g, &q).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn connecting_layer_maps_inner_generators(seed in any::<u64>(), pick in 0usize..64) {
        let g = fixture("grid_2x5.graph");
        let j = g.v1().nth(pick % g.num_v1()).unwrap();
        let inner = g.stabilizer_generator(j, Subgraph::Inner).unwrap();
        let connected = g.stabilizer_generator(j, Subgraph::Connected).unwrap();
        let connect_edges = g.e_connect();
        let w = |s: &mut Sv| {
            for &(a, b) in &connect_edges {
                s.cz(a, b);
            }
        };
        let psi = random_sv(g.num_vertices(), seed);
        let mut lhs = psi.clone();
        lhs.pauli(&inner);
        w(&mut lhs);
        let mut rhs = psi;
        w(&mut rhs);
        rhs.pauli(&connected);
        let diff: f64 = lhs.a.iter().zip(&rhs.a).map(|(x, y)| (x - y).norm_sqr()).sum();
        prop_assert!(diff < 1e-20);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn framed_patterns_reproduce_the_circuit(
        ops in prop::collection::vec((0u8..5, 0usize..2, -3.0f64..3.0), 1..4),
    ) {
        let gates: Vec<CircuitGate> = ops
            .iter()
            .map(|&(k, q, theta)| match k {
                0 => CircuitGate::H(q),
                1 => CircuitGate::S(q),
                2 => CircuitGate::T(q),
                3 => CircuitGate::Rz(q, theta),
                _ => CircuitGate::Cz(0, 1),
            })
            .collect();
        let circuit = Circuit::new(2, gates.clone()).unwrap();
        let pattern = compile_small_circuit(&circuit).unwrap();

        let mut sv = Sv::zero(2);
        for g in &gates {
            match *g {
                CircuitGate::H(q) => sv.h(q),
                CircuitGate::S(q) => sv.phase(q, std::f64::consts::FRAC_PI_2),
                CircuitGate::T(q) => sv.phase(q, std::f64::consts::FRAC_PI_4),
                CircuitGate::Rz(q, t) => sv.phase(q, t),
                CircuitGate::Cz(a, b) => sv.cz(a, b),
                CircuitGate::I(_) => {}
            }
        }
        let expected: Vec<f64> = sv.a.iter().map(|a| a.norm_sqr()).collect();

        let input = DenseState::<f64>::zero(2).unwrap();
        let n = pattern.num_vertices();
        let mut patterns = vec![BitString::zeros(n)];
        patterns.extend((0..n).map(|q| BitString::from_ones(n, [q])));
        for u in patterns {
            let frame = PauliFrame::new(&pattern, u.clone()).unwrap();
            let dist = output_distribution(&pattern, &input, Some(&u), Some(&frame)).unwrap();
            for (p, e) in dist.iter().zip(&expected) {
                prop_assert!((p - e).abs() < 1e-10, "u = {u}: {dist:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn q_star_balances_the_two_gaps(eps in 1e-4f64..0.05, s in 2u32..8, t in 2u32..8) {
        let params = ProtocolParams { epsilon: eps, s, t, delta: 0.0, ..ProtocolParams::default() };
        let r = gap_analysis::<f64>(&params).unwrap();
        prop_assert!((r.at_q_star.delta1 - r.at_q_star.delta3).abs() < 1e-12);
        // With no positive gap the grid maximum sits at q = 0 instead.
        if r.at_q_star.delta3 > 0.0 {
            prop_assert!((r.grid_argmax - r.q_star).abs() <= 1e-5);
        } else {
            prop_assert_eq!(r.grid_argmax, 0.0);
        }
    }
}

#[test]
fn channel_failure_matches_binomial_tail() {
    let g = fixture("grid_3x4.graph");
    let n = g.num_vertices() as u64;
    for (w, pz) in [(1usize, 0.01), (1, 0.05), (2, 0.05)] {
        let gamma = build_correctable_set(&g, w, DEFAULT_ENUMERATION_CAP).unwrap();
        let ch = NoiseChannel::z_only(pz).unwrap();
        let shots = 20_000;
        let est = estimate_channel_goodness(&g, &ch, &gamma, shots, SeedStream::new(w as u64 * 31 + 7)).unwrap();
        let exact = 1.0 - binomial_cdf(n, w as u64, pz);
        let sd = (exact * (1.0 - exact) / shots as f64).sqrt();
        assert!((est.mean - exact).abs() <= 4.0 * sd, "w={w} pz={pz}: {} vs {exact}", est.mean);
    }
}

#[test]
fn strict_modes_agree() {
    let g = fixture("grid_3x3.graph");
    let gamma = build_correctable_set(&g, 1, DEFAULT_ENUMERATION_CAP).unwrap();
    let n1 = g.num_v1();
    let gamma_bits = BitString::from_ones(n1, [0, 2]);
    let state = MerlinStrategy::DeviatedGamma { gamma: gamma_bits }.prepare(&g, &Witness::Zero).unwrap();
    let shots = 6000u64;
    let count = |mode, seed| {
        let e = estimate_pass_probability(&g, &gamma, TestSelector::Strict(mode), shots, SeedStream::new(seed), |_| {
            Ok(state.clone())
        })
        .unwrap();
        (e.mean * shots as f64).round()
    };
    let (a, b) = (count(StrictMode::Joint, 1), count(StrictMode::LocalProduct, 2));
    // 2x2 contingency chi-square, critical value at 0.001 with one degree of freedom.
    let total = 2.0 * shots as f64;
    let pass = a + b;
    let fail = total - pass;
    let chi2: f64 = [(a, pass), (shots as f64 - a, fail), (b, pass), (shots as f64 - b, fail)]
        .iter()
        .map(|&(obs, col)| {
            let exp = col * shots as f64 / total;
            (obs - exp).powi(2) / exp
        })
        .sum();
    assert!(chi2 < 10.83, "chi-square {chi2}: joint {a}, local {b}");
}

#[test]
fn phase_flip_code_corrects_single_z_only() {
    let code = StabilizerCode::new(CodeKind::PhaseFlip).unwrap();
    for q in 0..3 {
        assert!(code.corrects(&PauliString::single(3, q, Pauli::Z)).unwrap());
    }
    assert!(!code.corrects(&PauliString::on(3, [0, 1], Pauli::Z)).unwrap());
    let p = 0.02;
    let ch = NoiseChannel::z_only(p).unwrap();
    let witness = DenseState::<f64>::plus(1).unwrap();
    let r = noisyqma::theorem1_demo(CodeKind::PhaseFlip, &ch, &witness, 200, SeedStream::new(3)).unwrap();
    let mass = 1.0 - (1.0 - p).powi(3) - 3.0 * p * (1.0 - p).powi(2);
    assert!((r.weight_ge2_mass - mass).abs() < 1e-12);
    assert!(r.weight_one_corrected);
}
