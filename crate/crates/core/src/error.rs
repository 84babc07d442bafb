use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("label {0} must appear exactly twice")]
    UnbalancedLabel(usize),
    #[error("label {0} has both ends with the same role")]
    RoleConflict(usize),
    #[error("token `{0}` lacks a sign")]
    SignMissing(String),
    #[error("label {0} carries two different signs")]
    SignConflict(usize),
    #[error("bad component kind `{0}`")]
    BadComponentKind(String),
    #[error("bad token `{0}`")]
    BadToken(String),
    #[error("tokens of different flavors in one diagram")]
    MixedFlavor,
    #[error("operation needs a {expected} diagram")]
    WrongFlavor { expected: &'static str },
    #[error("chord {0} does not exist")]
    NoSuchChord(usize),
    #[error("chord {0} is not a self-crossing")]
    NotSelfCrossing(usize),
    #[error("chord {0} is not a self-crossing of a long component")]
    NotLongComponent(usize),
    #[error("diagram has {0} components, expected {1}")]
    WrongComponentCount(usize, usize),
    #[error("move is not applicable to this diagram")]
    StaleMove,
    #[error("move is not applicable: {0}")]
    NotApplicable(String),
    #[error("gamma is not admissible: D.gamma = {0}")]
    GammaNotAdmissible(i64),
    #[error("based matrix is not graded")]
    NotGraded,
    #[error("loop values violate the pairing: {0}")]
    PairingViolation(String),
    #[error("axiom violated: {0}")]
    AxiomViolation(String),
    #[error("search budget exhausted after {states} states")]
    BudgetExhausted { states: usize },
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
