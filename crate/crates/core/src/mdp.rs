//! Optimal counterstrategies: with one player's strategy frozen the game is an
//! MDP over the other player's states, solved exactly by Howard policy
//! iteration.

use crate::game::{Game, Player, Strategy, ValueVector};

#[derive(Debug, Clone, PartialEq)]
pub struct CounterstrategyResult {
    /// Full strategy; the frozen player's choices are untouched.
    pub strategy: Strategy,
    pub value: ValueVector,
    pub improvement_steps: usize,
}

/// Best action for `player` at `state` by reduced cost, lowest index on ties.
pub(crate) fn best_action(g: &Game, rc: &[f64], state: usize, player: Player) -> usize {
    let mut acts = g.actions_of(state).iter().copied();
    let mut best = acts.next().expect("validated game has an action per state");
    for a in acts {
        let better = match player {
            Player::One => rc[a] > rc[best],
            Player::Two => rc[a] < rc[best],
        };
        if better {
            best = a;
        }
    }
    best
}

/// Optimal counterstrategy of `optimizing` against the other player's part
/// of `frozen`, starting from `warm_start`'s choices on the optimizing
/// player's states.
///
/// Every iteration switches each optimizing state whose best reduced cost
/// beats the current action by more than the scaled `eps`. On return the
/// reduced costs of the optimizing player's actions satisfy the one-sided
/// sign condition at that tolerance.
pub fn best_response(
    g: &Game,
    frozen: &Strategy,
    optimizing: Player,
    warm_start: &Strategy,
    eps: f64,
) -> CounterstrategyResult {
    let tol = g.scaled_eps(eps);
    let mut pi = warm_start.merge(frozen, optimizing, g);
    let mut steps = 0;
    loop {
        let v = g.value_of(&pi);
        let rc = g.modified_reward(&pi, &v);
        let mut switched = false;
        for s in g.states_of(optimizing) {
            let best = best_action(g, &rc, s, optimizing);
            let gain = match optimizing {
                Player::One => rc[best],
                Player::Two => -rc[best],
            };
            if gain > tol {
                pi.set(s, best);
                switched = true;
            }
        }
        if !switched {
            return CounterstrategyResult { strategy: pi, value: v, improvement_steps: steps };
        }
        steps += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCheck {
    pub holds: bool,
    /// Worst violating action and its reduced cost, when `holds` is false.
    pub witness: Option<(usize, f64)>,
}

/// Tests `(r^pi)_{A1} <= tol` and `(r^pi)_{A2} >= -tol` with
/// `tol = eps * (1 + max|r|)`.
pub fn is_equilibrium(g: &Game, pi: &Strategy, eps: f64) -> EquilibriumCheck {
    let tol = g.scaled_eps(eps);
    let v = g.value_of(pi);
    let rc = g.modified_reward(pi, &v);
    let mut witness: Option<(usize, f64)> = None;
    for (a, &c) in rc.iter().enumerate() {
        let excess = match g.owner_of_action(a) {
            Player::One => c,
            Player::Two => -c,
        };
        if excess > tol && witness.is_none_or(|(w, _)| excess > rc[w].abs()) {
            witness = Some((a, c));
        }
    }
    EquilibriumCheck { holds: witness.is_none(), witness }
}
