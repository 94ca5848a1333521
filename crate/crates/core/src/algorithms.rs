//! Outer equilibrium algorithms. All three alternate a Player 1 update with
//! a full Player 2 counterstrategy and differ only in how Player 1 moves:
//!
//! * [`strategy_iteration`]: every improvable Player 1 state switches to its
//!   best reduced-cost action;
//! * [`simplex_strategy_iteration`]: only the single Player 1 action with the
//!   largest reduced cost enters (one simplex pivot);
//! * [`modified_simplex_strategy_iteration`]: every single-state deviation is
//!   evaluated against Player 2's reply and the one with the largest `1^T v`
//!   is kept.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::format::fmt_f64;
use crate::game::{Game, ModifiedReward, Player, Strategy, ValueVector, DEFAULT_EPS};
use crate::mdp::{best_action, best_response, is_equilibrium};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Strategy,
    Simplex,
    ModifiedSimplex,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Strategy, Algorithm::Simplex, Algorithm::ModifiedSimplex];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Strategy => "strategy",
            Algorithm::Simplex => "simplex",
            Algorithm::ModifiedSimplex => "modified-simplex",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strategy" => Ok(Algorithm::Strategy),
            "simplex" => Ok(Algorithm::Simplex),
            "modified-simplex" => Ok(Algorithm::ModifiedSimplex),
            other => Err(format!(
                "unknown algorithm `{other}` (expected strategy, simplex or modified-simplex)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Unscaled tolerance; sign tests use `eps * (1 + max|r|)`.
    pub eps: f64,
    /// Maximum number of Player 1 updates.
    pub max_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, max_iters: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub sum_v: f64,
    /// Largest reduced cost over Player 1 actions at this iterate (0 when
    /// Player 1 owns no states).
    pub max_rc_p1: f64,
    /// Player 1 `(state, action)` switches that produced this iterate.
    pub switched: Vec<(usize, usize)>,
    pub strategy: Strategy,
    pub value: ValueVector,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub best_response_calls: usize,
    pub best_response_steps: usize,
    /// Single-state deviations evaluated (modified simplex only).
    pub candidate_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub equilibrium: Strategy,
    pub value: ValueVector,
    pub iterations: usize,
    /// One record per iterate, starting with the initial one.
    pub trace: Vec<TraceRecord>,
    pub status: SolveStatus,
    /// Whether the final strategy passes the equilibrium test at `10 * eps`.
    pub certified: bool,
    pub counters: Counters,
}

impl SolveReport {
    /// Trace as CSV with header `iter,sum_v,max_rc_p1,switched_state,switched_action`.
    /// Multiple switches in one iteration are joined with `;`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,sum_v,max_rc_p1,switched_state,switched_action\n");
        for rec in &self.trace {
            let states: Vec<String> = rec.switched.iter().map(|(s, _)| s.to_string()).collect();
            let actions: Vec<String> = rec.switched.iter().map(|(_, a)| a.to_string()).collect();
            writeln!(
                out,
                "{},{},{},{},{}",
                rec.iter,
                fmt_f64(rec.sum_v),
                fmt_f64(rec.max_rc_p1),
                states.join(";"),
                actions.join(";")
            )
            .unwrap();
        }
        out
    }
}

fn max_player_one_rc(g: &Game, rc: &ModifiedReward) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for s in g.states_of(Player::One) {
        for &a in g.actions_of(s) {
            if best.is_none_or(|(_, b)| rc[a] > b) {
                best = Some((a, rc[a]));
            }
        }
    }
    best
}

/// Bookkeeping shared by the three loops.
struct Run<'g> {
    g: &'g Game,
    opts: SolveOptions,
    pi: Strategy,
    v: ValueVector,
    rc: ModifiedReward,
    trace: Vec<TraceRecord>,
    counters: Counters,
}

impl<'g> Run<'g> {
    fn start(g: &'g Game, start: &Strategy, opts: SolveOptions) -> Self {
        let mut counters = Counters::default();
        let br = best_response(g, start, Player::Two, start, opts.eps);
        counters.best_response_calls += 1;
        counters.best_response_steps += br.improvement_steps;
        let rc = g.modified_reward(&br.strategy, &br.value);
        let mut run = Run { g, opts, pi: br.strategy, v: br.value, rc, trace: Vec::new(), counters };
        run.record(Vec::new());
        run
    }

    fn tol(&self) -> f64 {
        self.g.scaled_eps(self.opts.eps)
    }

    fn iterations(&self) -> usize {
        self.trace.len() - 1
    }

    fn record(&mut self, switched: Vec<(usize, usize)>) {
        let max_rc_p1 = max_player_one_rc(self.g, &self.rc).map_or(0.0, |(_, c)| c);
        self.trace.push(TraceRecord {
            iter: self.trace.len(),
            sum_v: self.v.sum(),
            max_rc_p1,
            switched,
            strategy: self.pi.clone(),
            value: self.v.clone(),
        });
    }

    /// Re-optimizes Player 2 against `pi1` and moves to the resulting pair.
    fn advance(&mut self, pi1: Strategy, switched: Vec<(usize, usize)>) {
        let br = best_response(self.g, &pi1, Player::Two, &pi1, self.opts.eps);
        self.counters.best_response_calls += 1;
        self.counters.best_response_steps += br.improvement_steps;
        self.adopt(br.strategy, br.value, switched);
    }

    fn adopt(&mut self, pi: Strategy, v: ValueVector, switched: Vec<(usize, usize)>) {
        self.rc = self.g.modified_reward(&pi, &v);
        self.pi = pi;
        self.v = v;
        self.record(switched);
    }

    fn finish(self, algorithm: Algorithm, status: SolveStatus) -> SolveReport {
        let certified = is_equilibrium(self.g, &self.pi, 10.0 * self.opts.eps).holds;
        SolveReport {
            algorithm,
            iterations: self.trace.len() - 1,
            equilibrium: self.pi,
            value: self.v,
            trace: self.trace,
            status,
            certified,
            counters: self.counters,
        }
    }
}

/// Classic strategy iteration: all improvable Player 1 states switch at once,
/// then Player 2 re-optimizes.
pub fn strategy_iteration(g: &Game, start: &Strategy, opts: &SolveOptions) -> SolveReport {
    let mut run = Run::start(g, start, *opts);
    loop {
        let tol = run.tol();
        let switches: Vec<(usize, usize)> = g
            .states_of(Player::One)
            .filter_map(|s| {
                let best = best_action(g, &run.rc, s, Player::One);
                (run.rc[best] > tol).then_some((s, best))
            })
            .collect();
        if switches.is_empty() {
            return run.finish(Algorithm::Strategy, SolveStatus::Converged);
        }
        if run.iterations() >= opts.max_iters {
            return run.finish(Algorithm::Strategy, SolveStatus::IterationLimit);
        }
        let mut pi1 = run.pi.clone();
        for &(s, a) in &switches {
            pi1.set(s, a);
        }
        run.advance(pi1, switches);
    }
}

/// Simplex strategy iteration: the Player 1 action with the largest reduced
/// cost (lowest index on ties) enters, then Player 2 re-optimizes.
pub fn simplex_strategy_iteration(g: &Game, start: &Strategy, opts: &SolveOptions) -> SolveReport {
    let mut run = Run::start(g, start, *opts);
    loop {
        let entering = max_player_one_rc(g, &run.rc).filter(|&(_, c)| c > run.tol());
        let Some((a, _)) = entering else {
            return run.finish(Algorithm::Simplex, SolveStatus::Converged);
        };
        if run.iterations() >= opts.max_iters {
            return run.finish(Algorithm::Simplex, SolveStatus::IterationLimit);
        }
        let s = g.state_of(a);
        run.advance(run.pi.with_choice(s, a), vec![(s, a)]);
    }
}

/// Modified simplex strategy iteration: every single-state Player 1
/// deviation is paired with Player 2's reply, and the pair with the largest
/// `1^T v` is adopted (lowest state, then lowest action on ties). Stops when
/// no deviation improves `1^T v` by more than the scaled tolerance.
pub fn modified_simplex_strategy_iteration(
    g: &Game,
    start: &Strategy,
    opts: &SolveOptions,
) -> SolveReport {
    let mut run = Run::start(g, start, *opts);
    loop {
        let current = run.v.sum();
        let mut best: Option<(f64, usize, usize, Strategy, ValueVector)> = None;
        for s in g.states_of(Player::One) {
            for &a in g.actions_of(s) {
                let cand = run.pi.with_choice(s, a);
                let br = best_response(g, &cand, Player::Two, &run.pi, opts.eps);
                run.counters.candidate_evaluations += 1;
                run.counters.best_response_calls += 1;
                run.counters.best_response_steps += br.improvement_steps;
                let total = br.value.sum();
                if best.as_ref().is_none_or(|b| total > b.0) {
                    best = Some((total, s, a, br.strategy, br.value));
                }
            }
        }
        let best = best.filter(|b| b.0 >= current && b.0 - current > run.tol());
        let Some((_, s, a, pi, v)) = best else {
            return run.finish(Algorithm::ModifiedSimplex, SolveStatus::Converged);
        };
        if run.iterations() >= opts.max_iters {
            return run.finish(Algorithm::ModifiedSimplex, SolveStatus::IterationLimit);
        }
        run.adopt(pi, v, vec![(s, a)]);
    }
}

pub fn solve(g: &Game, algorithm: Algorithm, start: &Strategy, opts: &SolveOptions) -> SolveReport {
    match algorithm {
        Algorithm::Strategy => strategy_iteration(g, start, opts),
        Algorithm::Simplex => simplex_strategy_iteration(g, start, opts),
        Algorithm::ModifiedSimplex => modified_simplex_strategy_iteration(g, start, opts),
    }
}
