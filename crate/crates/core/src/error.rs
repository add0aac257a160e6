use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("agent ids must be non-empty")]
    EmptyAgentId,
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("unknown agent `{agent}` in {context}")]
    UnknownAgent { context: String, agent: String },
    #[error("agent `{0}` lists itself")]
    SelfInPreferences(String),
    #[error("agent `{member}` appears more than once in the order of `{agent}`")]
    DuplicateTierMember { agent: String, member: String },
    #[error("empty tie group in the order of `{agent}`")]
    EmptyTier { agent: String },
    #[error("duplicate criterion `{0}`")]
    DuplicateCriterion(String),
    #[error("criterion `{0}` has no choices")]
    EmptyChoiceList(String),
    #[error("priority order is not a permutation of the criteria: {0}")]
    BadPriorityOrder(String),
    #[error("profile data inconsistent: {0}")]
    ProfileMismatch(String),
    #[error("choice {value} of `{agent}` for `{criterion}` outside 1..={max}")]
    ChoiceOutOfRange {
        agent: String,
        criterion: String,
        value: u32,
        max: usize,
    },
    #[error("vector for `{agent}` has length {found}, expected {expected}")]
    VectorLength {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid forbidden pair {0}")]
    BadForbiddenPair(String),
    #[error("objective configuration: {0}")]
    Objective(#[from] ObjectiveError),
    #[error("completeness degree needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("matching covers {found} agents, instance has {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("not an involution at agent `{0}`")]
    NotInvolution(String),
    #[error("`{0}` and `{1}` are not mutually acceptable")]
    NotAcceptable(String, String),
    #[error("agent `{0}` is matched twice")]
    MatchedTwice(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("instance has no profiles")]
    MissingProfiles,
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error("criterion index {0} out of range")]
    CriterionOutOfRange(usize),
    #[error("agent `{0}` has no department label")]
    MissingDepartment(String),
    #[error("cannot parse objective level `{0}`")]
    BadLevel(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("optimize mode requires an objective configuration")]
    MissingObjective,
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {found} agents, oracle cap is {cap}")]
    TooLarge { found: usize, cap: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("at least one agent is required")]
    NoAgents,
    #[error("choice sizes: {0}")]
    BadSizes(String),
    #[error("weight range {0}..={1} is empty")]
    BadWeights(u32, u32),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
