//! Ground truth by exhaustive enumeration, and seeded random instances.
//!
//! The enumeration never calls into [`crate::mdp::best_response`]: Player 2's
//! counterstrategy is found by trying every Player 2 strategy, so the oracle
//! can catch bugs in the policy-iteration path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GameError, OracleError};
use crate::game::{Game, Player, Strategy, ValueVector, DEFAULT_EPS};
use crate::mdp::is_equilibrium;

/// Upper bound on the number of pure strategies the oracle will enumerate.
pub const ENUMERATION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub strategy: Strategy,
    pub value: ValueVector,
    /// Player 1 strategies whose enumerated counterstrategy pair passed the
    /// equilibrium test.
    pub equilibria_found: usize,
    /// Largest componentwise value difference among those equilibria.
    pub equilibrium_value_spread: f64,
}

/// Mixed-radix enumeration of every assignment of actions to `states`,
/// starting from `base`.
fn for_each_assignment(g: &Game, states: &[usize], base: &Strategy, mut f: impl FnMut(&Strategy)) {
    let mut digits = vec![0usize; states.len()];
    let mut pi = base.clone();
    for &s in states {
        pi.set(s, g.actions_of(s)[0]);
    }
    loop {
        f(&pi);
        let mut i = 0;
        loop {
            if i == states.len() {
                return;
            }
            let s = states[i];
            digits[i] += 1;
            if digits[i] < g.actions_of(s).len() {
                pi.set(s, g.actions_of(s)[digits[i]]);
                break;
            }
            digits[i] = 0;
            pi.set(s, g.actions_of(s)[0]);
            i += 1;
        }
    }
}

/// Player 2's exact minimizing counterstrategy against `pi`'s Player 1 part,
/// by enumeration of `1^T v`.
fn enumerate_counterstrategy(g: &Game, pi: &Strategy, p2_states: &[usize]) -> (Strategy, ValueVector) {
    let mut best: Option<(Strategy, ValueVector, f64)> = None;
    for_each_assignment(g, p2_states, pi, |cand| {
        let v = g.value_of(cand);
        let total = v.sum();
        if best.as_ref().is_none_or(|(_, _, t)| total < *t) {
            best = Some((cand.clone(), v, total));
        }
    });
    let (s, v, _) = best.expect("at least one strategy");
    (s, v)
}

/// Equilibrium by exhaustive enumeration: for every Player 1 strategy find
/// Player 2's minimizing reply, keep the Player 1 strategy whose pair has
/// the largest `1^T v`, and certify the winner with [`is_equilibrium`].
pub fn brute_force_equilibrium(g: &Game) -> Result<OracleResult, OracleError> {
    let count = g.strategy_count();
    if count > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge { count, limit: ENUMERATION_LIMIT });
    }
    let p1: Vec<usize> = g.states_of(Player::One).collect();
    let p2: Vec<usize> = g.states_of(Player::Two).collect();
    let tol = g.scaled_eps(DEFAULT_EPS);
    let base = Strategy::lowest_index(g);

    let mut best: Option<(Strategy, ValueVector, f64)> = None;
    let mut equilibria: Vec<ValueVector> = Vec::new();
    for_each_assignment(g, &p1, &base, |pi1| {
        let (pair, v) = enumerate_counterstrategy(g, pi1, &p2);
        let rc = g.modified_reward(&pair, &v);
        let p1_optimal = p1
            .iter()
            .flat_map(|&s| g.actions_of(s))
            .all(|&a| rc[a] <= tol);
        if p1_optimal {
            equilibria.push(v.clone());
        }
        let total = v.sum();
        if best.as_ref().is_none_or(|(_, _, t)| total > *t) {
            best = Some((pair, v, total));
        }
    });
    let (strategy, value, _) = best.expect("at least one strategy");

    let check = is_equilibrium(g, &strategy, DEFAULT_EPS);
    if let Some((action, reduced_cost)) = check.witness {
        return Err(OracleError::Certification { action, reduced_cost });
    }
    let spread = equilibria
        .iter()
        .map(|v| v.max_abs_diff(&value))
        .fold(0.0, f64::max);
    Ok(OracleResult {
        strategy,
        value,
        equilibria_found: equilibria.len(),
        equilibrium_value_spread: spread,
    })
}

/// Parameters of a random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub num_states: usize,
    /// Inclusive range for `|A_s|`.
    pub actions_per_state: (usize, usize),
    pub gamma: f64,
    pub seed: u64,
    /// One-hot transition rows.
    pub deterministic: bool,
    /// Every state owned by Player 1 (a plain MDP).
    pub player2_empty: bool,
    /// Half-open range for rewards.
    pub reward_range: (f64, f64),
}

impl GenSpec {
    /// 2 to 3 actions per state, rewards in `[-1, 1)`, stochastic, both
    /// players present.
    pub fn new(num_states: usize, gamma: f64, seed: u64) -> Self {
        Self {
            num_states,
            actions_per_state: (2, 3),
            gamma,
            seed,
            deterministic: false,
            player2_empty: false,
            reward_range: (-1.0, 1.0),
        }
    }

    fn check(&self) -> Result<(), GameError> {
        let bad = |m: &str| Err(GameError::InvalidSpec(m.to_string()));
        if self.num_states == 0 {
            return bad("num_states must be positive");
        }
        let (lo, hi) = self.actions_per_state;
        if lo == 0 || lo > hi {
            return bad("actions_per_state must be a nonempty range of positive counts");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        let (rlo, rhi) = self.reward_range;
        if !(rlo.is_finite() && rhi.is_finite() && rlo < rhi) {
            return bad("reward_range must be a finite nonempty interval");
        }
        Ok(())
    }
}

/// Draws a game from `spec`. Identical specs give bit-identical games.
pub fn generate(spec: &GenSpec) -> Result<Game, GameError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let l = spec.num_states;
    let owner: Vec<Player> = (0..l)
        .map(|_| {
            if spec.player2_empty || rng.random_bool(0.5) {
                Player::One
            } else {
                Player::Two
            }
        })
        .collect();
    let (lo, hi) = spec.actions_per_state;
    let mut action_state = Vec::new();
    let mut transition = Vec::new();
    let mut reward = Vec::new();
    for s in 0..l {
        let k = rng.random_range(lo..=hi);
        for _ in 0..k {
            action_state.push(s);
            transition.push(random_row(&mut rng, l, spec.deterministic));
            reward.push(rng.random_range(spec.reward_range.0..spec.reward_range.1));
        }
    }
    Game::new(owner, action_state, transition, reward, spec.gamma)
}

fn random_row(rng: &mut ChaCha8Rng, l: usize, deterministic: bool) -> Vec<f64> {
    let mut row = vec![0.0; l];
    if deterministic {
        row[rng.random_range(0..l)] = 1.0;
        return row;
    }
    // positive draws, some pushed to zero so rows are not all dense
    for p in row.iter_mut() {
        let u: f64 = rng.random();
        *p = if u < 0.3 { 0.0 } else { u };
    }
    if row.iter().all(|&p| p == 0.0) {
        row[rng.random_range(0..l)] = 1.0;
    }
    let total: f64 = row.iter().sum();
    for p in row.iter_mut() {
        *p /= total;
    }
    row
}
