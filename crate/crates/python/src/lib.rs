//! Python bindings. Strategies cross the boundary as lists of action ids,
//! value and reward vectors as lists of floats.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tbsg_core::verify::{run_checks, Check};
use tbsg_core::{
    self as core, Algorithm, GenSpec, Player, SolveOptions, SolveStatus, Strategy, DEFAULT_EPS,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn player(tag: u8) -> PyResult<Player> {
    match tag {
        1 => Ok(Player::One),
        2 => Ok(Player::Two),
        _ => Err(PyValueError::new_err(format!("player must be 1 or 2, got {tag}"))),
    }
}

#[pyclass(name = "Game", module = "tbsg", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGame {
    inner: core::Game,
}

impl PyGame {
    fn strategy(&self, choices: Vec<usize>) -> PyResult<Strategy> {
        Strategy::for_game(&self.inner, choices).map_err(value_err)
    }

    fn start(&self, choices: Option<Vec<usize>>) -> PyResult<Strategy> {
        match choices {
            Some(c) => self.strategy(c),
            None => Ok(Strategy::lowest_index(&self.inner)),
        }
    }
}

#[pymethods]
impl PyGame {
    /// owners[s] is 1 or 2; action a lives at state action_state[a].
    #[new]
    fn new(
        owners: Vec<u8>,
        action_state: Vec<usize>,
        transitions: Vec<Vec<f64>>,
        rewards: Vec<f64>,
        gamma: f64,
    ) -> PyResult<Self> {
        let owners = owners.into_iter().map(player).collect::<PyResult<Vec<_>>>()?;
        if transitions.len() != action_state.len() || rewards.len() != action_state.len() {
            return Err(PyValueError::new_err("one transition row and one reward per action"));
        }
        let inner = core::Game::new(owners, action_state, transitions, rewards, gamma).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        core::parse_game(text).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    #[pyo3(signature = (states, gamma=0.9, seed=0, min_actions=2, max_actions=3, deterministic=false, mdp=false, reward_range=(-1.0, 1.0)))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        states: usize,
        gamma: f64,
        seed: u64,
        min_actions: usize,
        max_actions: usize,
        deterministic: bool,
        mdp: bool,
        reward_range: (f64, f64),
    ) -> PyResult<Self> {
        let spec = GenSpec {
            num_states: states,
            actions_per_state: (min_actions, max_actions),
            gamma,
            seed,
            deterministic,
            player2_empty: mdp,
            reward_range,
        };
        core::generate(&spec).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        core::write_game(&self.inner)
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn owners(&self) -> Vec<u8> {
        self.inner.owners().iter().map(|p| p.tag()).collect()
    }

    #[getter]
    fn rewards(&self) -> Vec<f64> {
        self.inner.rewards().to_vec()
    }

    fn actions_of(&self, state: usize) -> PyResult<Vec<usize>> {
        if state >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("no state {state}")));
        }
        Ok(self.inner.actions_of(state).to_vec())
    }

    fn state_of(&self, action: usize) -> PyResult<usize> {
        if action >= self.inner.num_actions() {
            return Err(PyValueError::new_err(format!("no action {action}")));
        }
        Ok(self.inner.state_of(action))
    }

    fn transition(&self, action: usize) -> PyResult<Vec<f64>> {
        if action >= self.inner.num_actions() {
            return Err(PyValueError::new_err(format!("no action {action}")));
        }
        Ok(self.inner.transition(action).to_vec())
    }

    fn lowest_index_strategy(&self) -> Vec<usize> {
        Strategy::lowest_index(&self.inner).into_inner()
    }

    fn random_strategy(&self, seed: u64) -> Vec<usize> {
        Strategy::random(&self.inner, &mut ChaCha8Rng::seed_from_u64(seed)).into_inner()
    }

    fn value_of(&self, strategy: Vec<usize>) -> PyResult<Vec<f64>> {
        Ok(self.inner.value_of(&self.strategy(strategy)?).into_inner())
    }

    fn modified_reward(&self, strategy: Vec<usize>) -> PyResult<Vec<f64>> {
        let pi = self.strategy(strategy)?;
        let v = self.inner.value_of(&pi);
        Ok(self.inner.modified_reward(&pi, &v).into_inner())
    }

    fn flux_of(&self, strategy: Vec<usize>) -> PyResult<Vec<f64>> {
        Ok(self.inner.flux_of(&self.strategy(strategy)?).into_inner())
    }

    /// Invariant violations as messages; empty for a well-formed game.
    fn violations(&self) -> Vec<String> {
        core::validate_game(&self.inner).iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(states={}, actions={}, gamma={})",
            self.inner.num_states(),
            self.inner.num_actions(),
            self.inner.gamma()
        )
    }
}

type TraceRow = (usize, f64, f64, Vec<(usize, usize)>);

#[pyclass(name = "SolveReport", module = "tbsg", frozen)]
struct PySolveReport {
    inner: core::SolveReport,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm.tag()
    }

    #[getter]
    fn equilibrium(&self) -> Vec<usize> {
        self.inner.equilibrium.choices().to_vec()
    }

    #[getter]
    fn value(&self) -> Vec<f64> {
        self.inner.value.to_vec()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    /// "converged" or "iteration-limit".
    #[getter]
    fn status(&self) -> &'static str {
        match self.inner.status {
            SolveStatus::Converged => "converged",
            SolveStatus::IterationLimit => "iteration-limit",
        }
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.certified
    }

    /// (iter, sum_v, max_rc_p1, [(state, action), ...]) per iterate.
    #[getter]
    fn trace(&self) -> Vec<TraceRow> {
        self.inner
            .trace
            .iter()
            .map(|t| (t.iter, t.sum_v, t.max_rc_p1, t.switched.clone()))
            .collect()
    }

    #[getter]
    fn best_response_calls(&self) -> usize {
        self.inner.counters.best_response_calls
    }

    fn trace_csv(&self) -> String {
        self.inner.trace_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(algorithm={}, status={}, iterations={}, certified={})",
            self.algorithm(),
            self.status(),
            self.inner.iterations,
            if self.inner.certified { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "TransformedGame", module = "tbsg", frozen)]
struct PyTransformedGame {
    inner: core::TransformedGame,
}

impl PyTransformedGame {
    fn strategy(&self, choices: Vec<usize>) -> PyResult<Strategy> {
        Strategy::for_game(&self.inner.game, choices).map_err(value_err)
    }
}

#[pymethods]
impl PyTransformedGame {
    #[getter]
    fn game(&self) -> PyGame {
        PyGame { inner: self.inner.game.clone() }
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn scale_c(&self) -> f64 {
        self.inner.scale_c
    }

    /// Original state for each constructed state, None for internal nodes.
    #[getter]
    fn original_state_of(&self) -> Vec<Option<usize>> {
        self.inner.original_state_of.clone()
    }

    fn pull_back(&self, strategy: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(core::pull_back_strategy(&self.inner, &self.strategy(strategy)?).into_inner())
    }

    /// (original action, constructed states on the path).
    fn final_action(&self, strategy: Vec<usize>, state: usize) -> PyResult<(usize, Vec<usize>)> {
        let pi = self.strategy(strategy)?;
        if state >= self.inner.trees.len() {
            return Err(PyValueError::new_err(format!("no original state {state}")));
        }
        let fa = core::final_action(&self.inner, &pi, state);
        Ok((fa.action, fa.path))
    }

    fn uses_dummy(&self, strategy: Vec<usize>) -> PyResult<bool> {
        Ok(self.inner.uses_dummy(&self.strategy(strategy)?))
    }

    fn map_text(&self) -> String {
        self.inner.map_text()
    }
}

#[pyfunction]
#[pyo3(signature = (game, algorithm="simplex", start=None, eps=DEFAULT_EPS, max_iters=100_000))]
fn solve(
    py: Python<'_>,
    game: &PyGame,
    algorithm: &str,
    start: Option<Vec<usize>>,
    eps: f64,
    max_iters: usize,
) -> PyResult<PySolveReport> {
    let algorithm: Algorithm = algorithm.parse().map_err(value_err)?;
    if eps.is_nan() || eps <= 0.0 || max_iters == 0 {
        return Err(PyValueError::new_err("eps must be positive and max_iters at least 1"));
    }
    let start = game.start(start)?;
    let opts = SolveOptions { eps, max_iters };
    let inner = py.detach(|| core::solve(&game.inner, algorithm, &start, &opts));
    Ok(PySolveReport { inner })
}

/// Optimal strategy of `player` against `frozen`; returns (strategy, value, steps).
#[pyfunction]
#[pyo3(signature = (game, frozen, player, warm_start=None, eps=DEFAULT_EPS))]
fn best_response(
    game: &PyGame,
    frozen: Vec<usize>,
    player: u8,
    warm_start: Option<Vec<usize>>,
    eps: f64,
) -> PyResult<(Vec<usize>, Vec<f64>, usize)> {
    let frozen = game.strategy(frozen)?;
    let warm = match warm_start {
        Some(w) => game.strategy(w)?,
        None => frozen.clone(),
    };
    let r = core::best_response(&game.inner, &frozen, self::player(player)?, &warm, eps);
    Ok((r.strategy.into_inner(), r.value.into_inner(), r.improvement_steps))
}

/// (holds, worst violating (action, reduced cost) or None).
#[pyfunction]
#[pyo3(signature = (game, strategy, eps=DEFAULT_EPS))]
fn is_equilibrium(game: &PyGame, strategy: Vec<usize>, eps: f64) -> PyResult<(bool, Option<(usize, f64)>)> {
    let c = core::is_equilibrium(&game.inner, &game.strategy(strategy)?, eps);
    Ok((c.holds, c.witness))
}

/// Exhaustive search; returns (strategy, value, equilibria found).
#[pyfunction]
fn brute_force_equilibrium(py: Python<'_>, game: &PyGame) -> PyResult<(Vec<usize>, Vec<f64>, usize)> {
    let r = py
        .detach(|| core::brute_force_equilibrium(&game.inner))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((r.strategy.into_inner(), r.value.into_inner(), r.equilibria_found))
}

#[pyfunction]
fn to_binary(game: &PyGame) -> PyResult<PyTransformedGame> {
    core::to_binary(&game.inner).map(|inner| PyTransformedGame { inner }).map_err(value_err)
}

/// Invariant checks; returns (check, "PASS"|"FAIL"|"SKIP", detail) rows.
#[pyfunction]
#[pyo3(signature = (game, checks=None, eps=DEFAULT_EPS, seed=0))]
fn verify(
    py: Python<'_>,
    game: &PyGame,
    checks: Option<Vec<String>>,
    eps: f64,
    seed: u64,
) -> PyResult<Vec<(String, String, String)>> {
    let checks: Vec<Check> = match checks {
        Some(names) => names.iter().map(|n| n.parse().map_err(value_err)).collect::<PyResult<_>>()?,
        None => Check::ALL.to_vec(),
    };
    let reports = py.detach(|| run_checks(&game.inner, &checks, eps, seed));
    Ok(reports
        .into_iter()
        .map(|r| (r.check.name().to_string(), r.outcome.to_string(), r.detail))
        .collect())
}

#[pymodule]
fn tbsg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PySolveReport>()?;
    m.add_class::<PyTransformedGame>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(best_response, m)?)?;
    m.add_function(wrap_pyfunction!(is_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(to_binary, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("ALGORITHMS", Algorithm::ALL.map(Algorithm::tag).to_vec())?;
    Ok(())
}
