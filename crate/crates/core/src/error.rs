use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("document {0:?} has an empty body")]
    EmptyDocument(String),
    #[error("invalid lexicon entry {mwe:?}: {reason}")]
    InvalidEntry { mwe: String, reason: &'static str },
    #[error("duplicate lexicon entry {0:?}")]
    DuplicateEntry(String),
    #[error("percent must lie in (0, 100], got {0}")]
    InvalidPercent(f64),
    #[error("cannot sample {k} records from {n}")]
    SampleTooLarge { k: usize, n: usize },
    #[error("annotators disagree on {0:?} and no adjudication was recorded")]
    MissingAdjudication(String),
    #[error("record {0:?} carries an adjudication although the annotators agree")]
    UnexpectedAdjudication(String),
    #[error("annotation set is empty")]
    EmptyAnnotationSet,
    #[error("chance agreement is 1; kappa is undefined")]
    DegenerateMarginals,
    #[error("rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("augmentation count must be at least 1")]
    InvalidAugmentationCount,
    #[error("only {eligible} eligible positions for {k} edits")]
    AugmentationInfeasible { eligible: usize, k: usize },
    #[error("embedding table is invalid: {0}")]
    InvalidEmbeddingTable(&'static str),
    #[error("inference count must be 5 or 12, got {0}")]
    InvalidInferenceCount(usize),
    #[error("gloss attachments are not defined for paragraph context")]
    UnsupportedCombination,
    #[error("zero-norm embedding{}", context_suffix(.0))]
    DegenerateEmbedding(Option<String>),
    #[error("embedding contains a non-finite component")]
    NonFiniteEmbedding,
    #[error("embedding dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("shape mismatch: {0} vs {1} (need equal lengths of at least 2)")]
    ShapeError(usize, usize),
    #[error("correlation undefined for constant input")]
    UndefinedCorrelation,
    #[error("embedding backend failed: {0}")]
    Backend(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("term statistics cover no documents")]
    DegenerateStats,
}

fn context_suffix(ctx: &Option<String>) -> String {
    match ctx {
        Some(id) => alloc::format!(" in pair {id}"),
        None => String::new(),
    }
}
