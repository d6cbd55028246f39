use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a functional tree: {0}")]
    NotAFunctionalTree(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{what}: n = {n} exceeds the configured cap of {cap}")]
    ResourceLimit { what: &'static str, n: usize, cap: usize },

    #[error("not an oriented beta-labeling: {0}")]
    NotBetaLabeling(crate::labeling::BetaFailure),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("not a bijection: entry index {0} is produced twice")]
    NotBijective(usize),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("no oriented beta-labeling found after exhausting the search space")]
    NotFound,

    #[error("falling-factorial reduction did not terminate within {0} rounds")]
    ReductionDiverged(usize),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("{} of {} checks failed; failing trees: {:?}", .0.failed, .0.checks_run, .0.failing_tree_codes)]
    PartialFailure(Box<crate::campaign::CampaignSummary>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn limit(what: &'static str, n: usize, cap: usize) -> Self {
        Error::ResourceLimit { what, n, cap }
    }
}
