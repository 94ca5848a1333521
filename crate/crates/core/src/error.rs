use thiserror::Error;

use crate::game::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("strategy has {got} entries, game has {expected} states")]
    StrategyLength { expected: usize, got: usize },
    #[error("strategy picks action {action} at state {state}, which belongs to another state")]
    ForeignAction { state: usize, action: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Text-format error, tagged with the 1-based line it was found on
/// (0 when the problem is not tied to a single line).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: {count} strategy combinations exceed {limit}")]
    TooLarge { count: f64, limit: f64 },
    #[error("enumerated strategy failed equilibrium certification at action {action} (reduced cost {reduced_cost})")]
    Certification { action: usize, reduced_cost: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("unsupported instance: binary transformation needs at least 2 actions, got {0}")]
    TooFewActions(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}
