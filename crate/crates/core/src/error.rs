use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error.
///
/// `Hypothesis` covers the expected failures of relaxed (desk-scale) runs, where
/// some structural hypothesis does not hold for the instance at hand. `Fault` is
/// reserved for states the construction rules out, i.e. bugs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("hypothesis failure: {0}")]
    Hypothesis(#[from] HypothesisFailure),
    #[error("hard fault: {0}")]
    Fault(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn fault(msg: impl Into<String>) -> Self {
        Error::Fault(msg.into())
    }

    /// Turns a hypothesis failure into a hard fault. Used when the strict
    /// constants are in force and the failure is therefore unreachable.
    pub fn escalate(self) -> Self {
        match self {
            Error::Hypothesis(h) => Error::Fault(format!("unreachable under strict constants: {h}")),
            other => other,
        }
    }

    pub fn is_hypothesis(&self) -> bool {
        matches!(self, Error::Hypothesis(_))
    }

    pub fn is_fault(&self) -> bool {
        matches!(self, Error::Fault(_))
    }
}

/// A structural hypothesis that did not hold on a relaxed instance.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisFailure {
    #[error("cluster {cluster} contains no monochromatic K_{t}^(3)")]
    ClusterRamsey { cluster: usize, t: usize },
    #[error("expansion certificate absent: {detail}")]
    CertificateAbsent { detail: String },
    #[error("obstruction sets undersized at level {level}: needed {needed}, reached {reached}")]
    ObstructionUndersized { level: usize, needed: usize, reached: usize },
    #[error("alternating path search exhausted its budget of {budget} steps")]
    AlternatingPathBudget { budget: u64 },
    #[error("no alternating path with {m} vertices exists")]
    AlternatingPathAbsent { m: usize },
    #[error("cluster at path position {position} shrank to {remaining} vertices during pruning")]
    PruningUnderflow { position: usize, remaining: usize },
    #[error("role-coloured connector present: {detail}")]
    ConnectorPresent { detail: String },
    #[error("triple {triple:?} required by the window structure is missing")]
    MissingTriple { triple: [usize; 3] },
    #[error("window too small: {detail}")]
    WindowTooSmall { detail: String },
    #[error("quadruple extension exhausted all cases at level {level}")]
    ExtensionExhausted { level: usize },
}

impl HypothesisFailure {
    /// Short taxonomy label, used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            HypothesisFailure::ClusterRamsey { .. } => "cluster_ramsey",
            HypothesisFailure::CertificateAbsent { .. } => "certificate_absent",
            HypothesisFailure::ObstructionUndersized { .. } => "obstruction_undersized",
            HypothesisFailure::AlternatingPathBudget { .. } => "alternating_path_budget",
            HypothesisFailure::AlternatingPathAbsent { .. } => "alternating_path_absent",
            HypothesisFailure::PruningUnderflow { .. } => "pruning_underflow",
            HypothesisFailure::ConnectorPresent { .. } => "connector_present",
            HypothesisFailure::MissingTriple { .. } => "missing_triple",
            HypothesisFailure::WindowTooSmall { .. } => "window_too_small",
            HypothesisFailure::ExtensionExhausted { .. } => "extension_exhausted",
        }
    }
}
