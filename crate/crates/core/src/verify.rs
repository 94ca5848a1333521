//! Self-check suite run by `tbsg verify`: flux identities, reduced-cost
//! signs, oracle agreement, trace contraction and the binary transformation,
//! each reported as one pass/fail/skip line.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{solve, Algorithm, SolveOptions};
use crate::game::{validate_game, Game, Player, Strategy, ValueVector};
use crate::mdp::{best_response, is_equilibrium};
use crate::monitor::contraction_monitor;
use crate::oracle::brute_force_equilibrium;
use crate::transform::{pull_back_strategy, to_binary};

/// Relative tolerance of the flux-sum identity.
pub const FLUX_SUM_TOL: f64 = 1e-9;
/// Relative tolerance of the value/flux identities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Componentwise agreement between algorithms and the oracle.
pub const VALUE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Validate,
    Flux,
    Signs,
    Oracle,
    Contraction,
    Transform,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Validate, Check::Flux, Check::Signs, Check::Oracle, Check::Contraction, Check::Transform];

    pub fn name(self) -> &'static str {
        match self {
            Check::Validate => "validate",
            Check::Flux => "flux",
            Check::Signs => "signs",
            Check::Oracle => "oracle",
            Check::Contraction => "contraction",
            Check::Transform => "transform",
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: Check,
    pub outcome: Outcome,
    pub detail: String,
}

/// `|a - b| <= tol * max(|a|, |b|, 1)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Checks the flux identities for `pi`, and the value-difference identity
/// for the pair `(pi, other)`. Returns one message per failure.
pub fn flux_identity_failures(g: &Game, pi: &Strategy, other: &Strategy) -> Vec<String> {
    let mut out = Vec::new();
    let l = g.num_states() as f64;
    let horizon = l / (1.0 - g.gamma());
    let x = g.flux_of(pi);
    let v = g.value_of(pi);

    let total = x.sum();
    if (total - horizon).abs() > FLUX_SUM_TOL * horizon {
        out.push(format!("flux sums to {total}, expected {horizon}"));
    }
    for (a, &xa) in x.iter().enumerate() {
        if pi.uses(g, a) {
            if xa < 1.0 - IDENTITY_TOL || xa > horizon + 1e-9 {
                out.push(format!("flux of on-strategy action {a} is {xa}, outside [1, {horizon}]"));
            }
        } else if xa != 0.0 {
            out.push(format!("off-strategy action {a} has flux {xa}"));
        }
    }
    let xr: f64 = x.iter().zip(g.rewards()).map(|(x, r)| x * r).sum();
    if !rel_close(v.sum(), xr, IDENTITY_TOL) {
        out.push(format!("1^T v = {} but x^T r = {xr}", v.sum()));
    }

    let v_other = g.value_of(other);
    let rc = g.modified_reward(pi, &v);
    let x_other = g.flux_of(other);
    let lhs = v_other.sum() - v.sum();
    let rhs: f64 = x_other.iter().zip(rc.iter()).map(|(x, r)| x * r).sum();
    let scale = v_other.sum().abs().max(v.sum().abs()).max(1.0);
    if (lhs - rhs).abs() > IDENTITY_TOL * scale {
        out.push(format!("1^T(v' - v) = {lhs} but x'^T r^pi = {rhs}"));
    }
    out
}

/// Equilibrium value from the oracle when the game is small enough,
/// otherwise from a converged simplex run.
fn reference_value(g: &Game, eps: f64) -> (ValueVector, &'static str) {
    match brute_force_equilibrium(g) {
        Ok(res) => (res.value, "oracle"),
        Err(_) => {
            let opts = SolveOptions { eps, ..SolveOptions::default() };
            (solve(g, Algorithm::Simplex, &Strategy::lowest_index(g), &opts).value, "simplex run")
        }
    }
}

fn report(check: Check, failures: Vec<String>, ok_detail: String) -> CheckReport {
    if failures.is_empty() {
        CheckReport { check, outcome: Outcome::Pass, detail: ok_detail }
    } else {
        let shown: Vec<String> = failures.iter().take(3).cloned().collect();
        let more = failures.len().saturating_sub(3);
        let mut detail = shown.join("; ");
        if more > 0 {
            detail.push_str(&format!(" (+{more} more)"));
        }
        CheckReport { check, outcome: Outcome::Fail, detail }
    }
}

pub fn run_check(g: &Game, check: Check, eps: f64, seed: u64) -> CheckReport {
    if check != Check::Validate {
        let violations = validate_game(g);
        if !violations.is_empty() {
            return report(check, vec![format!("game is invalid: {}", violations[0])], String::new());
        }
    }
    let opts = SolveOptions { eps, ..SolveOptions::default() };
    match check {
        Check::Validate => {
            let fails = validate_game(g).iter().map(ToString::to_string).collect();
            report(check, fails, "all invariants hold".into())
        }
        Check::Flux => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let strategies: Vec<Strategy> = std::iter::once(Strategy::lowest_index(g))
                .chain((0..20).map(|_| Strategy::random(g, &mut rng)))
                .collect();
            let mut fails = Vec::new();
            for (i, pi) in strategies.iter().enumerate() {
                let other = &strategies[(i + 1) % strategies.len()];
                fails.extend(flux_identity_failures(g, pi, other));
            }
            report(check, fails, format!("{} strategies", strategies.len()))
        }
        Check::Signs => {
            let mut fails = Vec::new();
            let tol = g.scaled_eps(eps);
            let start = Strategy::lowest_index(g);
            for player in [Player::One, Player::Two] {
                let br = best_response(g, &start, player, &start, eps);
                let rc = g.modified_reward(&br.strategy, &br.value);
                for s in g.states_of(player) {
                    for &a in g.actions_of(s) {
                        let bad = match player {
                            Player::One => rc[a] > tol,
                            Player::Two => rc[a] < -tol,
                        };
                        if bad {
                            fails.push(format!("{player} best response leaves action {a} at reduced cost {}", rc[a]));
                        }
                    }
                }
            }
            for alg in Algorithm::ALL {
                let rep = solve(g, alg, &start, &opts);
                if let Some((a, c)) = is_equilibrium(g, &rep.equilibrium, 10.0 * eps).witness {
                    fails.push(format!("{alg} result violates the sign test at action {a} ({c})"));
                }
            }
            report(check, fails, "counterstrategies and equilibria".into())
        }
        Check::Oracle => match brute_force_equilibrium(g) {
            Err(e) => CheckReport { check, outcome: Outcome::Skip, detail: e.to_string() },
            Ok(truth) => {
                let mut fails = Vec::new();
                if truth.equilibrium_value_spread > 1e-9 {
                    fails.push(format!("enumerated equilibria differ by {}", truth.equilibrium_value_spread));
                }
                for alg in Algorithm::ALL {
                    let rep = solve(g, alg, &Strategy::lowest_index(g), &opts);
                    let diff = rep.value.max_abs_diff(&truth.value);
                    if diff > VALUE_TOL {
                        fails.push(format!("{alg} value differs from the oracle by {diff}"));
                    }
                }
                report(check, fails, format!("{} enumerated equilibria", truth.equilibria_found))
            }
        },
        Check::Contraction => {
            let (v_star, source) = reference_value(g, eps);
            let mut fails = Vec::new();
            for alg in Algorithm::ALL {
                let rep = solve(g, alg, &Strategy::lowest_index(g), &opts);
                let mon = contraction_monitor(g, &rep, &v_star, eps);
                fails.extend(mon.violations.iter().map(|v| format!("{alg}: {v:?}")));
            }
            report(check, fails, format!("reference from {source}"))
        }
        Check::Transform => {
            let tg = match to_binary(g) {
                Ok(tg) => tg,
                Err(e) => return report(check, vec![e.to_string()], String::new()),
            };
            let mut fails = Vec::new();
            let (m, l) = (g.num_actions(), g.num_states());
            if tg.game.num_states() > m + l * tg.depth {
                fails.push(format!("{} states exceed m + l*p = {}", tg.game.num_states(), m + l * tg.depth));
            }
            if let Some(s) = (0..tg.game.num_states()).find(|&s| tg.game.actions_of(s).len() != 2) {
                fails.push(format!("constructed state {s} does not have exactly 2 actions"));
            }
            let rep = solve(&tg.game, Algorithm::Simplex, &Strategy::lowest_index(&tg.game), &opts);
            if tg.uses_dummy(&rep.equilibrium) {
                fails.push("constructed equilibrium uses a dummy action".into());
            }
            let pi = pull_back_strategy(&tg, &rep.equilibrium);
            if !is_equilibrium(g, &pi, 10.0 * eps).holds {
                fails.push("pulled-back strategy is not an equilibrium".into());
            }
            let (v, _) = reference_value(g, eps);
            for s in 0..l {
                let expected = tg.scale_c * v[s];
                if (rep.value[s] - expected).abs() > VALUE_TOL {
                    fails.push(format!("state {s}: constructed value {} vs c*v = {expected}", rep.value[s]));
                }
            }
            report(check, fails, format!("{} constructed states, p = {}", tg.game.num_states(), tg.depth))
        }
    }
}

pub fn run_checks(g: &Game, checks: &[Check], eps: f64, seed: u64) -> Vec<CheckReport> {
    checks.iter().map(|&c| run_check(g, c, eps, seed)).collect()
}
