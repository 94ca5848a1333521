//! Solvers for discounted two-player turn-based stochastic games (2-TBSG).
//!
//! A game is a finite set of states split between a maximizing player
//! ([`Player::One`]) and a minimizing player ([`Player::Two`]). Every action
//! belongs to exactly one state and carries a reward and a transition row.
//! Strategies are deterministic: one action per state.
//!
//! The crate provides:
//!
//! * the game model and the shared computations ([`Game::value_of`],
//!   [`Game::modified_reward`], [`Game::flux_of`]),
//! * optimal counterstrategies by Howard policy iteration ([`best_response`]),
//! * three outer equilibrium algorithms ([`Algorithm`]): classic strategy
//!   iteration, simplex strategy iteration and modified simplex strategy
//!   iteration, plus a convergence monitor ([`contraction_monitor`]),
//! * the reduction to games with exactly two actions per state
//!   ([`to_binary`]),
//! * an exhaustive-enumeration oracle and seeded instance generators,
//! * the text format, a verification suite and a benchmark sweep.
//!
//! ```
//! use tbsg_core::{generate, solve, Algorithm, GenSpec, SolveOptions, Strategy};
//!
//! let game = generate(&GenSpec::new(4, 0.9, 7)).unwrap();
//! let start = Strategy::lowest_index(&game);
//! let report = solve(&game, Algorithm::Simplex, &start, &SolveOptions::default());
//! assert!(report.certified);
//! ```

pub mod algorithms;
pub mod bench;
mod error;
pub mod format;
pub mod game;
mod linalg;
pub mod mdp;
pub mod monitor;
pub mod oracle;
pub mod transform;
pub mod verify;

pub use algorithms::{
    modified_simplex_strategy_iteration, simplex_strategy_iteration, solve, strategy_iteration,
    Algorithm, Counters, SolveOptions, SolveReport, SolveStatus, TraceRecord,
};
pub use error::{FormatError, GameError, OracleError, TransformError};
pub use format::{parse_game, write_game};
pub use game::{
    validate_game, FluxVector, Game, ModifiedReward, Player, Strategy, ValueVector, Violation,
    DEFAULT_EPS, ROW_SUM_TOL,
};
pub use mdp::{best_response, is_equilibrium, CounterstrategyResult, EquilibriumCheck};
pub use monitor::{contraction_monitor, ContractionCheck, MonitorViolation};
pub use oracle::{brute_force_equilibrium, generate, GenSpec, OracleResult};
pub use transform::{
    final_action, pull_back_strategy, to_binary, ActionOrigin, FinalAction, TransformedGame,
};
