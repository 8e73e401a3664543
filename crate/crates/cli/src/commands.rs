use noisyqma::dense::{strict_test_pass_probability, verify_eq2_bound, DENSE_CAP};
use noisyqma::gates::random_clifford_circuit;
use noisyqma::noise::{estimate_channel_goodness, DEFAULT_ENUMERATION_CAP};
use noisyqma::protocol::{
    amplify, estimate_acceptance, gap_analysis, gap_sweep, near_honest_state, theorem1_demo, Arthur, MerlinStrategy,
    SharedEvent, TestMode, Witness,
};
use noisyqma::{
    build_correctable_set, BitString, DenseState, GraphSpec, Pauli, PauliString, ProtocolGraph, SeedStream,
    StabilizerTableau,
};
use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::config::Loaded;
use crate::failure::{config_err, Failure};
use crate::output::{envelope, Table};

/// What a command produced. `passed == false` turns into exit status 1
/// after the output has been written.
pub struct Emission {
    pub json: Value,
    pub table: String,
    pub csv: Option<String>,
    pub passed: bool,
}

fn emit<R: Serialize>(command: &str, loaded: &Loaded, result: &R, table: &Table) -> Result<Emission, Failure> {
    let seed = loaded.config.params.seed;
    Ok(Emission { json: envelope(command, seed, &loaded.config, result)?, table: table.render(), csv: None, passed: true })
}

fn mode(loaded: &Loaded) -> TestMode {
    let t = loaded.config.test;
    if t.strict {
        TestMode::Strict(t.strict_mode.into())
    } else {
        TestMode::Relaxed
    }
}

#[derive(Serialize)]
struct SimulateResult {
    strategy: &'static str,
    test_mode: TestMode,
    num_vertices: usize,
    correctable_patterns: usize,
    acceptance: noisyqma::protocol::AcceptanceReport,
    /// Probability the channel error falls outside the correctable set.
    channel_delta: noisyqma::Estimate,
    analytic: Option<noisyqma::protocol::GapPoint<f64>>,
}

pub fn simulate(loaded: &Loaded) -> Result<Emission, Failure> {
    let cfg = &loaded.config;
    let g = loaded.require_graph()?;
    let gamma = build_correctable_set(&g, cfg.params.w, DEFAULT_ENUMERATION_CAP)?;
    let channel = cfg.channel.build()?;
    let strategy = cfg.strategy.build(&g)?;
    let computation = loaded.computation()?;
    let state = strategy.prepare(&g, &cfg.witness.build())?;
    let mode = mode(loaded);
    let arthur = Arthur { graph: &g, gamma: &gamma, channel: &channel, computation: &computation, q: cfg.params.q, mode };
    let stream = SeedStream::new(cfg.params.seed);
    let acceptance = estimate_acceptance(&arthur, &state, cfg.params.shots, stream.domain(1))?;
    let channel_delta = estimate_channel_goodness(&g, &channel, &gamma, cfg.params.shots, stream.domain(2))?;
    let analytic = gap_analysis::<f64>(&cfg.params).ok().map(|r| r.at_q);

    let mut table = Table::new(&["quantity", "estimate", "95% interval", "count"]);
    table
        .estimate("p_acc", &acceptance.p_acc)
        .estimate("p_comp", &acceptance.p_comp)
        .estimate("p_test1", &acceptance.p_test1)
        .estimate("p_test2", &acceptance.p_test2)
        .estimate("delta (u outside Gamma)", &channel_delta);
    if let Some(a) = &analytic {
        table.row(&["alpha (analytic)".to_string(), format!("{:.4}", a.alpha), String::new(), String::new()]);
        let beta = a.beta1.max(a.beta2).max(a.beta3);
        table.row(&["max beta (analytic)".to_string(), format!("{beta:.4}"), String::new(), String::new()]);
    }
    let result = SimulateResult {
        strategy: strategy.name(),
        test_mode: mode,
        num_vertices: g.num_vertices(),
        correctable_patterns: gamma.len(),
        acceptance,
        channel_delta,
        analytic,
    };
    emit("simulate", loaded, &result, &table)
}

pub fn gap(loaded: &Loaded, sweep: bool) -> Result<Emission, Failure> {
    let params = &loaded.config.params;
    if sweep {
        let rows = gap_sweep::<f64>(params, &loaded.config.sweep.epsilons)?;
        let mut table = Table::new(&["epsilon", "q*", "delta3(q*)"]);
        let mut csv = String::from("epsilon,q_star,delta3_at_q_star\n");
        for r in &rows {
            table.row(&[format!("{:.6}", r.epsilon), format!("{:.6}", r.q_star), format!("{:.6e}", r.delta3_at_q_star)]);
            csv.push_str(&format!("{},{},{}\n", r.epsilon, r.q_star, r.delta3_at_q_star));
        }
        let mut e = emit("gap", loaded, &rows, &table)?;
        e.csv = Some(csv);
        return Ok(e);
    }
    let r = gap_analysis::<f64>(params)?;
    let mut table = Table::new(&["quantity", "value"]);
    let p = |x: f64| format!("{x:.9}");
    table
        .row(&["a".into(), p(r.a)])
        .row(&["b".into(), p(r.b)])
        .row(&["q".into(), p(r.at_q.q)])
        .row(&["alpha(q)".into(), p(r.at_q.alpha)])
        .row(&["beta1(q)".into(), p(r.at_q.beta1)])
        .row(&["beta2(q)".into(), p(r.at_q.beta2)])
        .row(&["beta3(q)".into(), p(r.at_q.beta3)])
        .row(&["min gap(q)".into(), p(r.at_q.min_gap)])
        .row(&["q*".into(), p(r.q_star)])
        .row(&["delta1(q*)".into(), p(r.at_q_star.delta1)])
        .row(&["delta2(q*)".into(), p(r.at_q_star.delta2)])
        .row(&["delta3(q*)".into(), p(r.at_q_star.delta3)])
        .row(&["grid argmax".into(), p(r.grid_argmax)])
        .row(&["grid max".into(), p(r.grid_max)])
        .row(&["strict-test max gap".into(), p(r.failed_max_delta)]);
    let verdict = match (r.bound_applies, r.bound_holds) {
        (_, true) => "holds",
        (true, false) => "VIOLATED",
        (false, false) => "not met (outside its setting)",
    };
    table.row(&["bound 25/8256 - delta".into(), format!("{} ({verdict})", p(r.gap_bound))]);
    if r.at_q_star.delta3 <= 0.0 {
        table.row(&["warning", "gap at q* is not positive"]);
    }
    emit("gap", loaded, &r, &table)
}

#[derive(Serialize)]
struct AmplifyResult {
    test_mode: TestMode,
    report: noisyqma::protocol::AmplificationReport,
    majority_reject: f64,
    shared_event: Option<SharedEvent>,
}

pub fn amplify_cmd(loaded: &Loaded) -> Result<Emission, Failure> {
    let cfg = &loaded.config;
    let g = loaded.require_graph()?;
    let gamma = build_correctable_set(&g, cfg.params.w, DEFAULT_ENUMERATION_CAP)?;
    let channel = cfg.channel.build()?;
    let computation = loaded.computation()?;
    let state = cfg.strategy.build(&g)?.prepare(&g, &cfg.witness.build())?;
    let mode = mode(loaded);
    let arthur = Arthur { graph: &g, gamma: &gamma, channel: &channel, computation: &computation, q: cfg.params.q, mode };
    let shared = if cfg.amplify.shared_probability > 0.0 {
        let (graph_error, pattern_error) = loaded.shared_errors(&g, &computation)?;
        Some(SharedEvent { probability: cfg.amplify.shared_probability, graph_error, pattern_error })
    } else {
        None
    };
    let trials = cfg.amplify.trials.unwrap_or(cfg.params.shots);
    let report = amplify(&arthur, &state, cfg.params.r, trials, shared.as_ref(), SeedStream::new(cfg.params.seed))?;

    let mut table = Table::new(&["quantity", "estimate", "95% interval", "count"]);
    table
        .estimate("per-run accept", &report.per_run_accept)
        .estimate(&format!("majority accept (r = {})", report.runs), &report.majority_accept)
        .row(&["majority reject".to_string(), format!("{:.4}", report.majority_reject()), String::new(), String::new()])
        .row(&[
            "independent-run reference".to_string(),
            format!("{:.4e}", report.independent_reject),
            String::new(),
            String::new(),
        ])
        .row(&["Hoeffding bound".to_string(), format!("{:.4e}", report.hoeffding_reject), String::new(), String::new()])
        .row(&["shared events".to_string(), report.shared_events.to_string(), String::new(), String::new()]);
    let result = AmplifyResult { test_mode: mode, majority_reject: report.majority_reject(), report, shared_event: shared };
    emit("amplify", loaded, &result, &table)
}

pub fn theorem1(loaded: &Loaded) -> Result<Emission, Failure> {
    let cfg = &loaded.config;
    let channel = cfg.channel.build()?;
    let witness = cfg.theorem1.witness()?;
    let r = theorem1_demo(cfg.theorem1.code, &channel, &witness, cfg.params.shots, SeedStream::new(cfg.params.seed))?;
    let mut table = Table::new(&["quantity", "value"]);
    table
        .row(&["code".to_string(), format!("{:?} ({} qubits)", r.code, r.num_qubits)])
        .row(&["mean fidelity".to_string(), format!("{:.6}", r.mean_fidelity)])
        .row(&["mean infidelity".to_string(), format!("{:.3e} +/- {:.1e}", r.mean_infidelity, r.infidelity_sigma)])
        .row(&["min fidelity".to_string(), format!("{:.6}", r.min_fidelity)])
        .row(&["trace distance (averaged)".to_string(), format!("{:.3e}", r.trace_distance)])
        .row(&["weight-1 errors corrected".to_string(), r.weight_one_corrected.to_string()])
        .row(&["P(weight >= 2)".to_string(), format!("{:.3e}", r.weight_ge2_mass)])
        .row(&["P(logical failure)".to_string(), format!("{:.3e}", r.failure_mass)])
        .row(&[
            "verifier accept".to_string(),
            format!("{:.4} [{:.4}, {:.4}]", r.verifier_accept.mean, r.verifier_accept.lower, r.verifier_accept.upper),
        ]);
    emit("theorem1", loaded, &r, &table)
}

#[derive(Clone, Debug, Serialize)]
struct Suite {
    name: &'static str,
    checks: u64,
    failures: u64,
    max_error: f64,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: 0, max_error: 0.0 }
    }

    fn check(&mut self, error: f64, ok: bool) {
        self.checks += 1;
        self.failures += u64::from(!ok);
        if error.is_nan() || error > self.max_error {
            self.max_error = error;
        }
    }
}

#[derive(Serialize)]
struct OracleResult {
    graph_vertices: usize,
    inject_fault: bool,
    suites: Vec<Suite>,
    passed: bool,
}

const TOL: f64 = 1e-10;

fn default_oracle_graph() -> ProtocolGraph {
    GraphSpec::grid(2, 5, |_, c| c < 4).build().expect("fixed grid is valid")
}

fn clifford_suite(loaded: &Loaded, stream: SeedStream, inject_fault: bool) -> Result<Suite, Failure> {
    let o = loaded.config.oracle;
    if o.max_qubits == 0 || o.max_qubits > DENSE_CAP {
        return Err(config_err(format!("oracle.max_qubits must be in 1..={DENSE_CAP}")));
    }
    let mut suite = Suite::new("tableau-vs-dense");
    let outcomes = noisyqma::rng::par_map(o.clifford_circuits, stream, |_, rng| {
        let n = rng.random_range(1..=o.max_qubits);
        let depth = rng.random_range(0..=o.max_depth);
        let gates = random_clifford_circuit(n, depth, rng);
        let mut tab = StabilizerTableau::new(n);
        let mut dense = DenseState::<f64>::zero(n)?;
        for &gate in &gates {
            tab.apply_gate(gate)?;
            dense.apply_gate(gate)?;
        }
        if inject_fault {
            tab.corrupt_sign(0);
        }
        let mut observables: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
        observables.extend(tab.stabilizers().iter().cloned());
        for _ in 0..4 {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]);
            }
            observables.push(p);
        }
        let mut errors = Vec::with_capacity(observables.len());
        for p in &observables {
            let exact = (1.0 + dense.expectation(p)?) / 2.0;
            errors.push((tab.probability_plus(p)? - exact).abs());
        }
        Ok(errors)
    })?;
    for errors in outcomes {
        for e in errors {
            suite.check(e, e < TOL);
        }
    }
    Ok(suite)
}

fn gu_suite(g: &ProtocolGraph, loaded: &Loaded, stream: SeedStream) -> Result<Suite, Failure> {
    let n = g.num_vertices();
    let mut suite = Suite::new("graph-basis-orthonormality");
    let results = noisyqma::rng::par_map(loaded.config.oracle.gu_pairs, stream, |_, rng| {
        let u = BitString::from_u64(n, rng.random_range(0..1u64 << n));
        let mut v = u.clone();
        while v == u {
            v = BitString::from_u64(n, rng.random_range(0..1u64 << n));
        }
        let a = DenseState::<f64>::from_tableau(&g.gu_state(&u)?)?;
        let b = DenseState::<f64>::from_tableau(&g.gu_state(&v)?)?;
        Ok((a.inner(&b)?.norm(), (a.inner(&a)?.norm() - 1.0).abs()))
    })?;
    for (cross, unit) in results {
        suite.check(cross, cross < TOL);
        suite.check(unit, unit < TOL);
    }
    Ok(suite)
}

fn eq2_suite(g: &ProtocolGraph, loaded: &Loaded, stream: SeedStream) -> Result<Suite, Failure> {
    let params = &loaded.config.params;
    let gamma = build_correctable_set(g, params.w, DEFAULT_ENUMERATION_CAP)?;
    let eps = params.epsilon;
    let mut suite = Suite::new("purification-bound");
    let reports = noisyqma::rng::par_map(loaded.config.oracle.eq2_states, stream, |_, rng| {
        let eta = eps * rng.random::<f64>();
        let psi = near_honest_state(g, eta, rng)?;
        verify_eq2_bound(&psi, g, &gamma)
    })?;
    for r in reports {
        let excess = (r.trace_distance - r.bound).max(0.0);
        suite.check(excess, r.in_range && r.holds && r.masses.yy >= 1.0 - 2.0 * eps - TOL);
    }
    Ok(suite)
}

fn strict_suite(g: &ProtocolGraph) -> Result<Suite, Failure> {
    let mut suite = Suite::new("strict-test-half");
    for j in g.v1() {
        let gamma = BitString::from_ones(g.num_v1(), [j]);
        let state = MerlinStrategy::DeviatedGamma { gamma }.prepare(g, &Witness::Zero)?.to_dense()?;
        let p = strict_test_pass_probability(&state, g)?;
        suite.check((p - 0.5).abs(), (p - 0.5).abs() < TOL);
    }
    Ok(suite)
}

pub fn oracle_check(loaded: &Loaded, inject_fault: bool) -> Result<Emission, Failure> {
    let g = loaded.graph()?.unwrap_or_else(default_oracle_graph);
    if g.num_vertices() > DENSE_CAP {
        return Err(config_err(format!("graph has {} vertices, dense cap is {DENSE_CAP}", g.num_vertices())));
    }
    let stream = SeedStream::new(loaded.config.params.seed);
    let suites = vec![
        clifford_suite(loaded, stream.domain(1), inject_fault)?,
        gu_suite(&g, loaded, stream.domain(2))?,
        eq2_suite(&g, loaded, stream.domain(3))?,
        strict_suite(&g)?,
    ];
    let passed = suites.iter().all(|s| s.failures == 0);
    let mut table = Table::new(&["suite", "checks", "failures", "max error"]);
    for s in &suites {
        table.row(&[s.name.to_string(), s.checks.to_string(), s.failures.to_string(), format!("{:.2e}", s.max_error)]);
    }
    let result = OracleResult { graph_vertices: g.num_vertices(), inject_fault, suites, passed };
    let mut e = emit("oracle-check", loaded, &result, &table)?;
    e.passed = passed;
    Ok(e)
}
