use std::fmt;

use thiserror::Error;

/// Pipeline stages of the cycle assembly, used to tag propagated failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ideals,
    Exceptional,
    Walk,
    FixEdges,
    CompleteFactor,
    Merge,
    Final,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Ideals => "reserve-ideals",
            Stage::Exceptional => "assign-exceptional",
            Stage::Walk => "build-walk",
            Stage::FixEdges => "fix-edges",
            Stage::CompleteFactor => "complete-factor",
            Stage::Merge => "merge",
            Stage::Final => "final-check",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid digraph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} out of range for order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid one-factor: {0}")]
    InvalidFactor(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// A caller-asserted precondition was checked and found false.
    #[error("precondition violated: {message}")]
    Precondition {
        message: String,
        witness: Option<Vec<usize>>,
    },

    /// An algorithm contract failed; the witness usually proves the input
    /// did not satisfy the assumed structure.
    #[error("contract failure: {message}")]
    Contract {
        message: String,
        witness: Option<Vec<usize>>,
    },

    #[error("no case of the cycle-cover step applies (active path {active_path})")]
    ImpossibleState { active_path: usize },

    #[error("unreachable: {0}")]
    Unreachable(String),

    #[error("hamilton search gave up: {0}")]
    SearchFailure(String),

    #[error("digraph is not hamiltonian (exact search)")]
    NotHamiltonian,

    #[error("randomized construction failed after {attempts} attempts: {message}")]
    RandomizedConstruction { attempts: usize, message: String },

    #[error("instance too large: {0}")]
    Scale(String),

    #[error("wrong pipeline: {message}")]
    WrongPipeline {
        message: String,
        separator: Option<Vec<usize>>,
    },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("assembly bug: {0}")]
    AssemblyBug(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition {
            message: message.into(),
            witness: None,
        }
    }

    pub(crate) fn contract(message: impl Into<String>, witness: Option<Vec<usize>>) -> Self {
        Error::Contract {
            message: message.into(),
            witness,
        }
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        match self {
            // keep the wrong-pipeline signal visible to callers
            e @ Error::WrongPipeline { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Strips stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_wrong_pipeline(&self) -> bool {
        matches!(self.root(), Error::WrongPipeline { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
