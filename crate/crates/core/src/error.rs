use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("duplicate paper id `{0}`")]
    DuplicatePaperId(String),
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("unknown author `{0}`")]
    UnknownAuthor(String),
    #[error("unknown paper `{0}`")]
    UnknownPaper(String),
    #[error("pair ({mentor}, {mentee}) has an author with no papers")]
    EmptyPair { mentor: String, mentee: String },
    #[error("partition does not belong to this pair graph")]
    PartitionMismatch,
    #[error("topic {0} is not a retained topic")]
    UnknownTopic(u32),
    #[error("partition has no retained topics")]
    NoRetainedTopics,
    #[error("mentee has no retained topic")]
    MenteeNoTopics,
    #[error("total mentee impact is zero")]
    ZeroImpact,
    #[error("empty cohort")]
    EmptyCohort,
    #[error("no finite shortest path between mentor and mentee papers")]
    NoFinitePaths,
    #[error("role has no papers")]
    NoPapers,
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("missing per-type impacts")]
    MissingImpacts,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("all x values are equal")]
    DegenerateX,
    #[error("design matrix is rank deficient: `{column}` is collinear with {others:?}")]
    RankDeficient { column: String, others: Vec<String> },
    #[error("too few complete rows: {rows} rows for {regressors} regressors")]
    TooFewRows { rows: usize, regressors: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid regression spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown pair ({0}, {1})")]
    UnknownPair(String, String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable code used in failure reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedRecord { .. } => "malformed_record",
            Error::DuplicatePaperId(_) => "duplicate_paper_id",
            Error::EmptyCorpus(_) => "empty_corpus",
            Error::UnknownAuthor(_) => "unknown_author",
            Error::UnknownPaper(_) => "unknown_paper",
            Error::EmptyPair { .. } => "empty_pair",
            Error::PartitionMismatch => "partition_mismatch",
            Error::UnknownTopic(_) => "unknown_topic",
            Error::NoRetainedTopics => "no_retained_topics",
            Error::MenteeNoTopics => "mentee_no_topics",
            Error::ZeroImpact => "zero_impact",
            Error::EmptyCohort => "empty_cohort",
            Error::NoFinitePaths => "no_finite_paths",
            Error::NoPapers => "no_papers",
            Error::EmptyInput => "empty_input",
            Error::NonFiniteInput => "non_finite_input",
            Error::MissingImpacts => "missing_impacts",
            Error::InsufficientData(_) => "insufficient_data",
            Error::DegenerateX => "degenerate_x",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::TooFewRows { .. } => "too_few_rows",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InvalidConfig(_) => "invalid_config",
            Error::UnknownPair(..) => "unknown_pair",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
