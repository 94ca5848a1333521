//! Checks a solve trace against a known equilibrium value: monotonicity,
//! one-step contraction of the optimality gap for the simplex family,
//! the M-step contraction that defines a geometrically converging
//! algorithm, and the per-iteration sign properties that go with it.

use crate::algorithms::{Algorithm, SolveReport};
use crate::game::{Game, Player, ValueVector};
use crate::mdp::is_equilibrium;

/// Slack on gap inequalities.
pub const GAP_TOL: f64 = 1e-8;
/// Slack on the monotonicity of `1^T v`.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MonitorViolation {
    /// `1^T v` dropped from iterate `iter` to `iter + 1`.
    Monotonicity { iter: usize, drop: f64 },
    /// Some component of the iterate exceeds the equilibrium value.
    AboveEquilibrium { iter: usize, excess: f64 },
    /// One-step contraction failed between `iter` and `iter + 1`.
    OneStep { iter: usize, gap_next: f64, allowed: f64 },
    /// M-step contraction failed between `iter` and `iter + horizon`.
    MultiStep { iter: usize, gap_later: f64, allowed: f64 },
    /// Player 2 is not at an optimal counterstrategy at `iter`.
    CounterstrategySign { iter: usize, action: usize, reduced_cost: f64 },
    /// An action adopted at `iter + 1` had negative reduced cost at `iter`.
    AdoptedNegative { iter: usize, action: usize, reduced_cost: f64 },
    /// No improvement from `iter`, yet iterate `iter` is not an equilibrium.
    StalledOffEquilibrium { iter: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCheck {
    /// `1^T(v* - v^{n+1}) / 1^T(v* - v^n)` per step; `None` when the gap at
    /// `n` is already below [`GAP_TOL`].
    pub ratios: Vec<Option<f64>>,
    /// `1 - (1 - gamma) / l`.
    pub bound: f64,
    /// The M of the M-step contraction check.
    pub horizon: usize,
    pub violations: Vec<MonitorViolation>,
}

impl ContractionCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Steps after which the gap must have shrunk by `(1 - gamma)^2 / l^2`:
/// `(2 / (1 - gamma)) ln(l / (1 - gamma))` for strategy iteration,
/// `l` times that for the simplex variants.
pub fn contraction_horizon(algorithm: Algorithm, l: usize, gamma: f64) -> usize {
    let l = l as f64;
    let base = 2.0 / (1.0 - gamma) * (l / (1.0 - gamma)).ln();
    let m = match algorithm {
        Algorithm::Strategy => base,
        Algorithm::Simplex | Algorithm::ModifiedSimplex => l * base,
    };
    m.ceil().max(1.0) as usize
}

pub fn contraction_monitor(
    g: &Game,
    report: &SolveReport,
    v_star: &ValueVector,
    eps: f64,
) -> ContractionCheck {
    let l = g.num_states() as f64;
    let gamma = g.gamma();
    let bound = 1.0 - (1.0 - gamma) / l;
    let horizon = contraction_horizon(report.algorithm, g.num_states(), gamma);
    let tol = g.scaled_eps(eps);
    let trace = &report.trace;
    let gaps: Vec<f64> = trace.iter().map(|r| v_star.sum() - r.sum_v).collect();
    let mut violations = Vec::new();
    let mut ratios = Vec::new();

    for (n, rec) in trace.iter().enumerate() {
        let excess = rec.value.iter().zip(v_star.iter()).map(|(v, s)| v - s).fold(f64::MIN, f64::max);
        if excess > GAP_TOL {
            violations.push(MonitorViolation::AboveEquilibrium { iter: n, excess });
        }
        let rc = g.modified_reward(&rec.strategy, &rec.value);
        for s in g.states_of(Player::Two) {
            for &a in g.actions_of(s) {
                if rc[a] < -tol {
                    violations.push(MonitorViolation::CounterstrategySign { iter: n, action: a, reduced_cost: rc[a] });
                }
            }
        }
        let Some(next) = trace.get(n + 1) else { continue };

        let gain = next.sum_v - rec.sum_v;
        if gain < -MONOTONE_TOL {
            violations.push(MonitorViolation::Monotonicity { iter: n, drop: -gain });
        }
        if gain.abs() <= MONOTONE_TOL && !is_equilibrium(g, &rec.strategy, 10.0 * eps).holds {
            violations.push(MonitorViolation::StalledOffEquilibrium { iter: n });
        }
        for &(s, a) in &next.switched {
            if rec.strategy.choice(s) != a && rc[a] < -tol {
                violations.push(MonitorViolation::AdoptedNegative { iter: n, action: a, reduced_cost: rc[a] });
            }
        }

        ratios.push((gaps[n] > GAP_TOL).then(|| gaps[n + 1] / gaps[n]));
        if report.algorithm != Algorithm::Strategy {
            let allowed = bound * gaps[n] + GAP_TOL;
            if gaps[n + 1] > allowed {
                violations.push(MonitorViolation::OneStep { iter: n, gap_next: gaps[n + 1], allowed });
            }
        }
    }

    let shrink = (1.0 - gamma).powi(2) / (l * l);
    for n in 0..gaps.len().saturating_sub(horizon) {
        let allowed = shrink * gaps[n] + GAP_TOL;
        if gaps[n + horizon] > allowed {
            violations.push(MonitorViolation::MultiStep { iter: n, gap_later: gaps[n + horizon], allowed });
        }
    }

    ContractionCheck { ratios, bound, horizon, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{solve, SolveOptions};
    use crate::game::{Strategy, DEFAULT_EPS};
    use crate::oracle::{brute_force_equilibrium, generate, GenSpec};

    #[test]
    fn single_record_trace_is_vacuous() {
        let g = generate(&GenSpec::new(3, 0.9, 4)).unwrap();
        let truth = brute_force_equilibrium(&g).unwrap();
        let rep = solve(&g, Algorithm::Simplex, &truth.strategy, &SolveOptions::default());
        let check = contraction_monitor(&g, &rep, &truth.value, DEFAULT_EPS);
        assert!(check.ratios.is_empty());
        assert!(check.passed());
    }

    #[test]
    fn traces_satisfy_every_property() {
        for seed in 0..40 {
            let gamma = [0.5, 0.9][seed as usize % 2];
            let g = generate(&GenSpec::new(5, gamma, 300 + seed)).unwrap();
            let truth = brute_force_equilibrium(&g).unwrap();
            for alg in Algorithm::ALL {
                let rep = solve(&g, alg, &Strategy::lowest_index(&g), &SolveOptions::default());
                let check = contraction_monitor(&g, &rep, &truth.value, DEFAULT_EPS);
                assert!(check.passed(), "{alg} seed {seed}: {:?}", check.violations);
                for r in check.ratios.iter().flatten() {
                    assert!(*r <= check.bound + 1e-6 || alg == Algorithm::Strategy);
                }
            }
        }
    }

    #[test]
    fn wrong_reference_value_is_caught() {
        let g = generate(&GenSpec::new(4, 0.9, 12)).unwrap();
        let rep = solve(&g, Algorithm::Simplex, &Strategy::lowest_index(&g), &SolveOptions::default());
        let truth = brute_force_equilibrium(&g).unwrap();
        let low = ValueVector(truth.value.iter().map(|v| v - 1.0).collect());
        let check = contraction_monitor(&g, &rep, &low, DEFAULT_EPS);
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, MonitorViolation::AboveEquilibrium { .. })));
    }

    #[test]
    fn horizons() {
        // l = 4, gamma = 0.5: 2/(0.5) * ln(8) = 8.3178 -> 9, simplex 33.27 -> 34
        assert_eq!(contraction_horizon(Algorithm::Strategy, 4, 0.5), 9);
        assert_eq!(contraction_horizon(Algorithm::Simplex, 4, 0.5), 34);
    }
}
