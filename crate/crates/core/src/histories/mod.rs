//! History families over a time grid, chain vectors, the consistency
//! condition and the extended Born rule.
//!
//! The chain vector of `Y = [Ψ0] ⊙ E_1^{α1} ⊙ ⋯ ⊙ E_n^{αn}` is
//! `E_n^{αn} T_n ⋯ E_1^{α1} T_1 |Ψ0>`. A family is consistent when the chain
//! vectors of distinct histories are mutually orthogonal (all complex
//! off-diagonal gram entries vanish); its probabilities are then the squared
//! norms.

mod family;
mod measurement;

use thiserror::Error;

use crate::hilbert::HilbertError;

pub use family::{
    conditional_probability, consistency_check, family_probabilities, ConsistencyReport, Event,
    History, HistoryFamily, ProbabilityTable, TimeGrid,
};
pub use measurement::{
    build_measurement_model, standard_families, MeasurementModel, StandardFamilies, FINAL_LABEL,
    INITIAL_LABEL, PSI0_LABEL, REST_LABEL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HistoryError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("time grid needs at least one propagator")]
    EmptyGrid,
    #[error("{labels} time labels for {steps} propagation steps")]
    TimeLabelCount { labels: usize, steps: usize },
    #[error("duplicate time label {0:?}")]
    DuplicateTime(String),
    #[error("propagator {index} is not unitary (defect {defect:e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{events} event PDIs for {steps} event times")]
    EventCount { events: usize, steps: usize },
    #[error("history has {found} events, family has {expected} event times")]
    HistoryLength { expected: usize, found: usize },
    #[error("unknown event label {label:?} at time {time}")]
    UnknownLabel { time: String, label: String },
    #[error("unknown event time {0:?}")]
    UnknownTime(String),
    #[error("history {0:?} listed twice")]
    DuplicateHistory(Vec<String>),
    #[error("family is inconsistent (max off-diagonal {:e})", .0.max_offdiag)]
    InconsistentFamily(Box<ConsistencyReport>),
    #[error("conditioning event has probability {probability:e}")]
    ZeroProbabilityCondition { probability: f64 },
    #[error("pointer dimension {pointer_dim} leaves no ready state for {outcomes} outcomes")]
    PointerTooSmall { pointer_dim: usize, outcomes: usize },
    #[error("measurement model failed its own verification (defect {defect:e})")]
    VerificationFailed { defect: f64 },
}
