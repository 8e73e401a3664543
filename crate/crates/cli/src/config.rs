use std::path::{Path, PathBuf};

use noisyqma::mbqc::compile_small_circuit;
use noisyqma::noise::PauliEvent;
use noisyqma::protocol::{CodeKind, ComputationBranch, MerlinStrategy, Witness};
use noisyqma::{BitString, DenseState, MeasurementPattern, NoiseChannel, PauliString, ProtocolGraph, ProtocolParams, StrictMode};
use serde::{Deserialize, Serialize};

use crate::failure::{config_err, Failure};

/// `H·P(7π/8)·H` on `|0⟩`: reads 1 with probability about 0.96.
pub const DEFAULT_CIRCUIT: &str = "H 0; RZ 0 2.748893571891069; H 0";

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Test graph, relative to the config file.
    pub graph: Option<PathBuf>,
    pub params: ProtocolParams,
    pub channel: ChannelConfig,
    pub strategy: StrategyConfig,
    pub witness: WitnessConfig,
    pub computation: ComputationConfig,
    pub test: TestConfig,
    pub amplify: AmplifyConfig,
    pub theorem1: Theorem1Config,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    #[default]
    Noiseless,
    ZOnly {
        pz: f64,
    },
    Iid {
        px: f64,
        py: f64,
        pz: f64,
    },
    Depolarizing {
        p: f64,
    },
    Correlated {
        #[serde(default)]
        px: f64,
        #[serde(default)]
        py: f64,
        #[serde(default)]
        pz: f64,
        events: Vec<EventConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub pauli: String,
    pub probability: f64,
}

impl ChannelConfig {
    pub fn build(&self) -> Result<NoiseChannel, Failure> {
        let ch = match self {
            ChannelConfig::Noiseless => Ok(NoiseChannel::noiseless()),
            ChannelConfig::ZOnly { pz } => NoiseChannel::z_only(*pz),
            ChannelConfig::Iid { px, py, pz } => NoiseChannel::iid(*px, *py, *pz),
            ChannelConfig::Depolarizing { p } => NoiseChannel::depolarizing(*p),
            ChannelConfig::Correlated { px, py, pz, events } => {
                let events = events
                    .iter()
                    .map(|e| Ok(PauliEvent { pauli: e.pauli.parse()?, probability: e.probability }))
                    .collect::<noisyqma::Result<Vec<_>>>()
                    .map_err(|e| config_err(format!("channel event: {e}")))?;
                NoiseChannel::correlated(*px, *py, *pz, events)
            }
        };
        ch.map_err(|e| config_err(format!("channel: {e}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategyConfig {
    #[default]
    Honest,
    /// `gamma` is a bit string over `V1` in qubit order; defaults to a
    /// single flip on the first `V1` vertex.
    DeviatedGamma {
        #[serde(default)]
        gamma: Option<String>,
    },
    GraphBasis {
        u: String,
        v: String,
        #[serde(default)]
        t: usize,
    },
    RandomStabilizer {
        seed: u64,
        #[serde(default = "default_depth")]
        depth: usize,
    },
}

fn default_depth() -> usize {
    40
}

fn parse_bits(s: &str, len: usize, what: &str) -> Result<BitString, Failure> {
    let bits: Vec<bool> = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(config_err(format!("{what}: `{c}` is not a bit"))),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != len {
        return Err(config_err(format!("{what}: expected {len} bits, found {}", bits.len())));
    }
    Ok(BitString::from_bools(&bits))
}

impl StrategyConfig {
    pub fn from_name(name: &str) -> Result<Self, Failure> {
        match name {
            "honest" => Ok(StrategyConfig::Honest),
            "deviated" | "deviated-gamma" => Ok(StrategyConfig::DeviatedGamma { gamma: None }),
            "random-stabilizer" => Ok(StrategyConfig::RandomStabilizer { seed: 1, depth: default_depth() }),
            _ => Err(config_err(format!("unknown strategy `{name}` (honest, deviated, random-stabilizer)"))),
        }
    }

    pub fn build(&self, g: &ProtocolGraph) -> Result<MerlinStrategy, Failure> {
        Ok(match self {
            StrategyConfig::Honest => MerlinStrategy::Honest,
            StrategyConfig::DeviatedGamma { gamma } => {
                let gamma = match gamma {
                    Some(s) => parse_bits(s, g.num_v1(), "strategy.gamma")?,
                    None => BitString::from_ones(g.num_v1(), [0]),
                };
                if gamma.is_zero() {
                    return Err(config_err("strategy.gamma must be nonzero"));
                }
                MerlinStrategy::DeviatedGamma { gamma }
            }
            StrategyConfig::GraphBasis { u, v, t } => MerlinStrategy::GraphBasis {
                u: parse_bits(u, g.v1_black().len(), "strategy.u")?,
                v: parse_bits(v, g.v1_white().len(), "strategy.v")?,
                t: *t,
            },
            StrategyConfig::RandomStabilizer { seed, depth } => {
                MerlinStrategy::RandomStabilizer { seed: *seed, depth: *depth }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessConfig {
    #[default]
    Zero,
    Plus,
}

impl WitnessConfig {
    pub fn build(self) -> Witness {
        match self {
            WitnessConfig::Zero => Witness::Zero,
            WitnessConfig::Plus => Witness::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputationConfig {
    /// Small circuit compiled to a pattern. Ignored when `pattern` is set.
    pub circuit: String,
    /// Pattern file, relative to the config file.
    pub pattern: Option<PathBuf>,
    /// Output whose value 1 means accept.
    pub accept_output: usize,
}

impl Default for ComputationConfig {
    fn default() -> Self {
        Self { circuit: DEFAULT_CIRCUIT.into(), pattern: None, accept_output: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    pub strict: bool,
    pub strict_mode: StrictModeConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrictModeConfig {
    #[default]
    Joint,
    LocalProduct,
}

impl From<StrictModeConfig> for StrictMode {
    fn from(m: StrictModeConfig) -> Self {
        match m {
            StrictModeConfig::Joint => StrictMode::Joint,
            StrictModeConfig::LocalProduct => StrictMode::LocalProduct,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplifyConfig {
    /// Majority votes to run; defaults to `params.shots`.
    pub trials: Option<u64>,
    /// Probability per vote of an error hitting every run.
    pub shared_probability: f64,
    /// Pauli on the test graph added by the shared event.
    pub shared_graph_error: Option<String>,
    /// Z pattern on the computation resource added by the shared event.
    pub shared_pattern_error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Config {
    pub code: CodeKind,
    /// Witness `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub theta: f64,
    pub phi: f64,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Self { code: CodeKind::FiveQubit, theta: 1.0, phi: 0.5 }
    }
}

impl Theorem1Config {
    pub fn witness(&self) -> Result<DenseState<f64>, Failure> {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let one = num_complex::Complex::from_polar(s, self.phi);
        DenseState::from_amplitudes(vec![num_complex::Complex::new(c, 0.0), one]).map_err(|e| config_err(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { epsilons: (1..=16).map(|k| k as f64 / 512.0).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub clifford_circuits: u64,
    pub max_qubits: usize,
    pub max_depth: usize,
    pub gu_pairs: u64,
    pub eq2_states: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { clifford_circuits: 200, max_qubits: 8, max_depth: 40, gu_pairs: 100, eq2_states: 100 }
    }
}

/// A config plus the directory its relative paths resolve against.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self { config: RunConfig::default(), base: PathBuf::from(".") });
        };
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base })
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn graph(&self) -> Result<Option<ProtocolGraph>, Failure> {
        let Some(p) = &self.config.graph else {
            return Ok(None);
        };
        let path = self.resolve(p);
        let text = std::fs::read_to_string(&path).map_err(|e| config_err(format!("graph {}: {e}", path.display())))?;
        ProtocolGraph::parse(&text).map(Some).map_err(|e| config_err(format!("graph {}: {e}", path.display())))
    }

    pub fn require_graph(&self) -> Result<ProtocolGraph, Failure> {
        self.graph()?.ok_or_else(|| config_err("config does not name a graph file"))
    }

    pub fn computation(&self) -> Result<ComputationBranch, Failure> {
        let c = &self.config.computation;
        let pattern = match &c.pattern {
            Some(p) => {
                let path = self.resolve(p);
                let text =
                    std::fs::read_to_string(&path).map_err(|e| config_err(format!("pattern {}: {e}", path.display())))?;
                MeasurementPattern::parse(&text).map_err(|e| config_err(format!("pattern {}: {e}", path.display())))?
            }
            None => {
                let circuit = c.circuit.parse().map_err(|e| config_err(format!("computation.circuit: {e}")))?;
                compile_small_circuit(&circuit).map_err(|e| config_err(format!("computation.circuit: {e}")))?
            }
        };
        let witness = DenseState::zero(pattern.inputs().len()).map_err(|e| config_err(e.to_string()))?;
        ComputationBranch::new(pattern, witness, c.accept_output, self.config.params.w)
            .map_err(|e| config_err(format!("computation: {e}")))
    }

    pub fn shared_errors(&self, g: &ProtocolGraph, comp: &ComputationBranch) -> Result<(PauliString, BitString), Failure> {
        let a = &self.config.amplify;
        let graph_error = match &a.shared_graph_error {
            Some(s) => s.parse().map_err(|e| config_err(format!("amplify.shared_graph_error: {e}")))?,
            None => PauliString::identity(g.num_vertices()),
        };
        if graph_error.num_qubits() != g.num_vertices() {
            return Err(config_err(format!(
                "amplify.shared_graph_error acts on {} qubits, graph has {}",
                graph_error.num_qubits(),
                g.num_vertices()
            )));
        }
        let n = comp.pattern().num_vertices();
        let pattern_error = match &a.shared_pattern_error {
            Some(s) => parse_bits(s, n, "amplify.shared_pattern_error")?,
            None => BitString::zeros(n),
        };
        Ok((graph_error, pattern_error))
    }
}
