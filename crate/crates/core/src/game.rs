//! Game model, validation and the per-strategy computations shared by every
//! algorithm: value, modified reward (reduced cost) and flux.

use std::fmt;
use std::ops::Deref;

use rand::Rng;

use crate::error::GameError;
use crate::linalg;

/// Default tolerance for reduced-cost sign tests, before scaling by
/// `1 + max|r|`.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Allowed deviation of a transition row sum from 1.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    /// Maximizer.
    One,
    /// Minimizer.
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Tag used by the text format (`1` or `2`).
    pub fn tag(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.tag())
    }
}

/// A discounted two-player turn-based stochastic game with dense transition
/// rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    owner: Vec<Player>,
    action_state: Vec<usize>,
    transition: Vec<Vec<f64>>,
    reward: Vec<f64>,
    gamma: f64,
    actions_of: Vec<Vec<usize>>,
}

/// One broken game invariant, as reported by [`validate_game`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoStates,
    Gamma { gamma: f64 },
    NoActions { state: usize },
    StateOutOfRange { action: usize, state: usize },
    RowLength { action: usize, len: usize, expected: usize },
    NegativeProbability { action: usize, state: usize, prob: f64 },
    RowSum { action: usize, sum: f64 },
    NonFiniteReward { action: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoStates => write!(f, "game has no states"),
            Violation::Gamma { gamma } => write!(f, "discount {gamma} is outside (0, 1)"),
            Violation::NoActions { state } => write!(f, "state {state} has no actions"),
            Violation::StateOutOfRange { action, state } => {
                write!(f, "action {action} belongs to nonexistent state {state}")
            }
            Violation::RowLength { action, len, expected } => {
                write!(f, "action {action} has a transition row of length {len}, expected {expected}")
            }
            Violation::NegativeProbability { action, state, prob } => {
                write!(f, "action {action} moves to state {state} with negative probability {prob}")
            }
            Violation::RowSum { action, sum } => write!(
                f,
                "transition row of action {action} sums to {sum} (defect {:e})",
                (sum - 1.0).abs()
            ),
            Violation::NonFiniteReward { action } => {
                write!(f, "action {action} has a non-finite reward")
            }
        }
    }
}

impl Game {
    /// Builds a game and checks every invariant.
    pub fn new(
        owner: Vec<Player>,
        action_state: Vec<usize>,
        transition: Vec<Vec<f64>>,
        reward: Vec<f64>,
        gamma: f64,
    ) -> Result<Self, GameError> {
        let g = Self::new_unchecked(owner, action_state, transition, reward, gamma);
        let violations = validate_game(&g);
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GameError::Invalid(violations))
        }
    }

    /// Builds a game without validation. Only [`validate_game`] is meaningful
    /// on the result until it has been checked.
    ///
    /// Panics if `transition` or `reward` do not have one entry per action.
    pub fn new_unchecked(
        owner: Vec<Player>,
        action_state: Vec<usize>,
        transition: Vec<Vec<f64>>,
        reward: Vec<f64>,
        gamma: f64,
    ) -> Self {
        assert_eq!(action_state.len(), transition.len(), "one transition row per action");
        assert_eq!(action_state.len(), reward.len(), "one reward per action");
        let mut actions_of = vec![Vec::new(); owner.len()];
        for (a, &s) in action_state.iter().enumerate() {
            if let Some(list) = actions_of.get_mut(s) {
                list.push(a);
            }
        }
        Self { owner, action_state, transition, reward, gamma, actions_of }
    }

    pub fn num_states(&self) -> usize {
        self.owner.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_state.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn owner(&self, state: usize) -> Player {
        self.owner[state]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }

    pub fn state_of(&self, action: usize) -> usize {
        self.action_state[action]
    }

    /// Actions available at `state`, in ascending index order.
    pub fn actions_of(&self, state: usize) -> &[usize] {
        &self.actions_of[state]
    }

    pub fn transition(&self, action: usize) -> &[f64] {
        &self.transition[action]
    }

    pub fn reward(&self, action: usize) -> f64 {
        self.reward[action]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.reward
    }

    pub fn owner_of_action(&self, action: usize) -> Player {
        self.owner[self.action_state[action]]
    }

    /// States owned by `player`, ascending.
    pub fn states_of(&self, player: Player) -> impl Iterator<Item = usize> + '_ {
        self.owner.iter().enumerate().filter(move |(_, &p)| p == player).map(|(s, _)| s)
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.reward.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `eps * (1 + max|r|)`: the tolerance used for every reduced-cost sign
    /// test on this game.
    pub fn scaled_eps(&self, eps: f64) -> f64 {
        eps * (1.0 + self.max_abs_reward())
    }

    /// Number of pure strategies, as a float so large games do not overflow.
    pub fn strategy_count(&self) -> f64 {
        self.actions_of.iter().map(|a| a.len() as f64).product()
    }

    fn strategy_rows<'a>(&'a self, pi: &Strategy) -> Vec<&'a [f64]> {
        pi.0.iter().map(|&a| self.transition[a].as_slice()).collect()
    }

    /// Solves `(I - gamma P_pi) v = r_pi`.
    pub fn value_of(&self, pi: &Strategy) -> ValueVector {
        debug_assert!(pi.check(self).is_ok());
        let a = linalg::discounted_system(&self.strategy_rows(pi), self.gamma);
        let r_pi: Vec<f64> = pi.0.iter().map(|&a| self.reward[a]).collect();
        ValueVector(linalg::solve(a, &r_pi))
    }

    /// `r - (J - gamma P) v`, evaluated for every action.
    pub fn modified_reward(&self, pi: &Strategy, v: &ValueVector) -> ModifiedReward {
        let mut rc: Vec<f64> = (0..self.num_actions())
            .map(|a| {
                let next: f64 = self.transition[a].iter().zip(&v.0).map(|(p, x)| p * x).sum();
                self.reward[a] - v.0[self.action_state[a]] + self.gamma * next
            })
            .collect();
        for &a in &pi.0 {
            rc[a] = 0.0;
        }
        ModifiedReward(rc)
    }

    /// Occupancy measure of `pi`: on-strategy entries solve
    /// `(I - gamma P_pi)^T y = 1`, everything else is zero.
    pub fn flux_of(&self, pi: &Strategy) -> FluxVector {
        debug_assert!(pi.check(self).is_ok());
        let a = linalg::discounted_system(&self.strategy_rows(pi), self.gamma).transpose();
        let y = linalg::solve(a, &vec![1.0; self.num_states()]);
        let mut x = vec![0.0; self.num_actions()];
        for (&a, y) in pi.0.iter().zip(y) {
            x[a] = y;
        }
        FluxVector(x)
    }
}

/// Lists every invariant violation of `g`; an empty list means the game is
/// valid.
pub fn validate_game(g: &Game) -> Vec<Violation> {
    let mut out = Vec::new();
    let l = g.num_states();
    if l == 0 {
        out.push(Violation::NoStates);
    }
    if !(g.gamma > 0.0 && g.gamma < 1.0) {
        out.push(Violation::Gamma { gamma: g.gamma });
    }
    for (s, actions) in g.actions_of.iter().enumerate() {
        if actions.is_empty() {
            out.push(Violation::NoActions { state: s });
        }
    }
    for a in 0..g.num_actions() {
        let s = g.action_state[a];
        if s >= l {
            out.push(Violation::StateOutOfRange { action: a, state: s });
        }
        if !g.reward[a].is_finite() {
            out.push(Violation::NonFiniteReward { action: a });
        }
        let row = &g.transition[a];
        if row.len() != l {
            out.push(Violation::RowLength { action: a, len: row.len(), expected: l });
            continue;
        }
        for (t, &p) in row.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                out.push(Violation::NegativeProbability { action: a, state: t, prob: p });
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL || sum.is_nan() {
            out.push(Violation::RowSum { action: a, sum });
        }
    }
    out
}

/// Deterministic strategy: one chosen action per state, both players
/// together.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy(Vec<usize>);

impl Strategy {
    pub fn new(choice: Vec<usize>) -> Self {
        Strategy(choice)
    }

    /// Like [`Strategy::new`] but checked against `g`.
    pub fn for_game(g: &Game, choice: Vec<usize>) -> Result<Self, GameError> {
        let s = Strategy(choice);
        s.check(g)?;
        Ok(s)
    }

    /// Lowest-index action at every state.
    pub fn lowest_index(g: &Game) -> Self {
        Strategy((0..g.num_states()).map(|s| g.actions_of(s)[0]).collect())
    }

    /// Uniformly random action at every state.
    pub fn random<R: Rng + ?Sized>(g: &Game, rng: &mut R) -> Self {
        Strategy(
            (0..g.num_states())
                .map(|s| {
                    let acts = g.actions_of(s);
                    acts[rng.random_range(0..acts.len())]
                })
                .collect(),
        )
    }

    pub fn check(&self, g: &Game) -> Result<(), GameError> {
        if self.0.len() != g.num_states() {
            return Err(GameError::StrategyLength { expected: g.num_states(), got: self.0.len() });
        }
        for (s, &a) in self.0.iter().enumerate() {
            if a >= g.num_actions() || g.state_of(a) != s {
                return Err(GameError::ForeignAction { state: s, action: a });
            }
        }
        Ok(())
    }

    pub fn choice(&self, state: usize) -> usize {
        self.0[state]
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn set(&mut self, state: usize, action: usize) {
        self.0[state] = action;
    }

    /// Copy of `self` with `state` switched to `action`.
    pub fn with_choice(&self, state: usize, action: usize) -> Self {
        let mut s = self.clone();
        s.0[state] = action;
        s
    }

    /// Whether `action` is the one chosen at its state.
    pub fn uses(&self, g: &Game, action: usize) -> bool {
        self.0[g.state_of(action)] == action
    }

    /// `self` on `player`'s states, `other` everywhere else.
    pub fn merge(&self, other: &Strategy, player: Player, g: &Game) -> Strategy {
        Strategy(
            (0..g.num_states())
                .map(|s| if g.owner(s) == player { self.0[s] } else { other.0[s] })
                .collect(),
        )
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

macro_rules! real_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub Vec<f64>);

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl $name {
            pub fn sum(&self) -> f64 {
                self.0.iter().sum()
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }
    };
}

real_vector!(
    /// Per-state discounted value of a strategy.
    ValueVector
);
real_vector!(
    /// Per-action reduced cost; zero on the strategy's own actions.
    ModifiedReward
);
real_vector!(
    /// Per-action discounted occupancy measure.
    FluxVector
);

impl ValueVector {
    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &ValueVector) -> f64 {
        self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
