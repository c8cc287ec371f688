//! CHSH experiments: the four-level (spin-3/2) construction, classical
//! hidden-variable bounds and feasibility, the per-setting quantum λ-model,
//! singlet correlations, the collapse rule and no-signaling checks.

mod chsh;
mod epr;
mod lhv;

use thiserror::Error;

use crate::hilbert::HilbertError;

pub use chsh::{
    chsh_operator, chsh_value, correlator, neon_setup, ops_from_angles, sign_pdi, ChshOperators,
    ChshValue, CorrelationData, NeonSetup, SettingPair, CHSH_VARIANTS, MINUS, PLUS,
    SINGLET_ALICE_DEG, SINGLET_BOB_DEG,
};
pub use epr::{
    collapse_conditional, correlator_from_joint, joint_probabilities, no_signaling_check,
    singlet_state, Collapse, JointTable, MarginalCheck, NoSignalingReport,
};
pub use lhv::{
    lambda_model_fixed_settings, lhv_deterministic_bound, lhv_feasibility, quantum_joint,
    BoundReport, DeterministicStrategy, FeasibilityReport, LhvModel, Witness, LAMBDA_LABELS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("A{a} and B{b} do not commute (defect {defect:e})")]
    NonCommutingAB { a: usize, b: usize, defect: f64 },
    #[error("{name} does not square to the identity (defect {defect:e})")]
    NotInvolution { name: String, defect: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("correlator {value} outside [-1, 1]")]
    CorrelatorOutOfRange { value: f64 },
    #[error("invalid hidden-variable model: {0}")]
    InvalidModel(String),
    #[error("Alice's outcome has probability {probability:e}")]
    ZeroProbabilityOutcome { probability: f64 },
    #[error("{party} projector {label:?} is not of local product form")]
    MalformedLocalPdi { party: &'static str, label: String },
    #[error("local dynamics not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
}
