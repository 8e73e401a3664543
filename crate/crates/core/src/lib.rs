//! Simulation and verification tools for a noisy-channel QMA protocol built
//! on graph-state stabilizer tests.
//!
//! The stabilizer core ([`PauliString`], [`StabilizerTableau`]) is exact
//! GF(2) arithmetic. The dense oracle, MBQC execution and gap analysis are
//! generic over a floating-point [`Scalar`]; the aliases below fix it to
//! `f64` (or `f32`).

pub mod bits;
pub mod dense;
pub mod error;
pub mod gates;
pub mod graph;
pub mod mbqc;
pub mod noise;
pub mod pauli;
pub mod protocol;
pub mod rng;
pub mod scalar;
pub mod state;
pub mod stats;
pub mod tableau;
pub mod verify;

pub use bits::BitString;
pub use dense::DenseState;
pub use error::{Error, Result};
pub use gates::Gate;
pub use mbqc::{compile_small_circuit, Circuit, CircuitGate, MeasurementPattern, PauliFrame};
pub use graph::{Color, EntanglingLayer, GraphSpec, ProtocolGraph, Region, Subgraph};
pub use noise::{build_correctable_set, pauli_to_z_pattern, CorrectableSet, ErrorPattern, NoiseChannel};
pub use pauli::{Pauli, PauliString, Phase};
pub use protocol::{
    amplify, estimate_acceptance, gap_analysis, gap_sweep, honest_merlin_state, theorem1_demo, Arthur, ComputationBranch,
    MerlinState, MerlinStrategy, ProtocolParams, TestMode, Witness,
};
pub use rng::{SeedStream, TrialRng};
pub use scalar::Scalar;
pub use state::{Outcome, QuantumState};
pub use stats::Estimate;
pub use tableau::StabilizerTableau;
pub use verify::{StrictMode, SyndromeRecord, TestBranch, TestSelector};

pub type DenseState64 = DenseState<f64>;
pub type DenseState32 = DenseState<f32>;
pub type DensityMatrix64 = dense::DensityMatrix<f64>;
pub type GraphBasisDecomposition64 = dense::GraphBasisDecomposition<f64>;
pub type Eq2Report64 = dense::Eq2Report<f64>;
pub type GapReport64 = protocol::GapReport<f64>;
