use thiserror::Error;

/// Errors raised by the automaton, oracle, certificate and solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing transition for state `{state}` on letter `{letter}`")]
    MissingTransition { state: String, letter: String },
    #[error("state `{state}` does not permute the alphabet")]
    NonInvertibleState { state: String },
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("declared identity `{0}` does not act trivially")]
    BadIdentity(String),
    #[error("automaton has no identity state")]
    NoIdentityState,
    #[error("section budget of {0} words exceeded")]
    BudgetExceeded(usize),
    #[error("element is not in the ball of radius {0}")]
    NotInBall(usize),
    #[error("no certificate with L <= {max_len}, k <= {max_power}")]
    NotFound { max_len: usize, max_power: usize },
    #[error("certificate does not match automaton: {0}")]
    CertificateMismatch(String),
    #[error("solver exceeded its stage guard of {0} stages")]
    NonTermination(usize),
    #[error("polynomial solver exceeded its stage guard of {0} stages")]
    StageGuardExceeded(usize),
    #[error("automaton is not polynomial (simple cycles intersect)")]
    NotPolynomial,
    #[error("automaton is not loopified: a nontrivial simple cycle has length {0}")]
    NotLoopified(usize),
    #[error("rewrite table not closed after {0} enlargements")]
    ClosureFailure(usize),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
