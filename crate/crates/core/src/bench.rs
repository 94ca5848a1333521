//! Iteration-count sweep over generated games, reported as CSV next to the
//! theoretical iteration rates.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::algorithms::{solve, Algorithm, SolveOptions, SolveStatus};
use crate::format::fmt_f64;
use crate::game::{Strategy, DEFAULT_EPS};
use crate::oracle::{generate, GenSpec};

pub const CSV_HEADER: &str =
    "l,m,gamma,seed,algorithm,iterations,wall_ns,certified,bound,algorithm_bound,ratio";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub sizes: Vec<usize>,
    pub gammas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    pub actions_per_state: (usize, usize),
    pub eps: f64,
    pub max_iters: usize,
    /// Record wall-clock time; when false `wall_ns` is 0 and output is
    /// fully deterministic.
    pub timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            sizes: vec![3, 5, 8],
            gammas: vec![0.5, 0.9, 0.99],
            seeds: (0..5).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            actions_per_state: (2, 3),
            eps: DEFAULT_EPS,
            max_iters: 100_000,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub l: usize,
    pub m: usize,
    pub gamma: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub wall_ns: u128,
    pub certified: bool,
    pub status: SolveStatus,
    /// `(m l / (1 - gamma)) ln(l / (1 - gamma))`.
    pub bound: f64,
    /// Rate of this algorithm: `bound` for the simplex variants, `bound / l`
    /// for strategy iteration.
    pub algorithm_bound: f64,
}

impl BenchRow {
    pub fn ratio(&self) -> f64 {
        self.iterations as f64 / self.algorithm_bound
    }
}

pub fn iteration_bound(l: usize, m: usize, gamma: f64) -> f64 {
    let (l, m) = (l as f64, m as f64);
    m * l / (1.0 - gamma) * (l / (1.0 - gamma)).ln()
}

pub fn algorithm_bound(algorithm: Algorithm, l: usize, m: usize, gamma: f64) -> f64 {
    match algorithm {
        Algorithm::Strategy => iteration_bound(l, m, gamma) / l as f64,
        Algorithm::Simplex | Algorithm::ModifiedSimplex => iteration_bound(l, m, gamma),
    }
}

/// Seed of the game generated for one sweep cell.
pub fn cell_seed(seed: u64, l: usize, gamma_index: usize) -> u64 {
    seed ^ ((l as u64) << 32) ^ ((gamma_index as u64) << 48)
}

/// Runs every (size, gamma, seed, algorithm) cell. Cells run in parallel;
/// rows come back in sweep order.
pub fn run_sweep(spec: &SweepSpec) -> Vec<BenchRow> {
    let mut cells = Vec::new();
    for &l in &spec.sizes {
        for (gi, &gamma) in spec.gammas.iter().enumerate() {
            for &seed in &spec.seeds {
                for &alg in &spec.algorithms {
                    cells.push((l, gi, gamma, seed, alg));
                }
            }
        }
    }
    let opts = SolveOptions { eps: spec.eps, max_iters: spec.max_iters };
    cells
        .into_par_iter()
        .map(|(l, gi, gamma, seed, alg)| {
            let mut gen = GenSpec::new(l, gamma, cell_seed(seed, l, gi));
            gen.actions_per_state = spec.actions_per_state;
            let g = generate(&gen).expect("sweep spec yields valid generator specs");
            let start = Strategy::lowest_index(&g);
            let t0 = Instant::now();
            let rep = solve(&g, alg, &start, &opts);
            let wall_ns = if spec.timing { t0.elapsed().as_nanos() } else { 0 };
            let m = g.num_actions();
            BenchRow {
                l,
                m,
                gamma,
                seed,
                algorithm: alg,
                iterations: rep.iterations,
                wall_ns,
                certified: rep.certified && rep.status == SolveStatus::Converged,
                status: rep.status,
                bound: iteration_bound(l, m, gamma),
                algorithm_bound: algorithm_bound(alg, l, m, gamma),
            }
        })
        .collect()
}

pub fn rows_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.l,
            r.m,
            fmt_f64(r.gamma),
            r.seed,
            r.algorithm,
            r.iterations,
            r.wall_ns,
            r.certified,
            fmt_f64(r.bound),
            fmt_f64(r.algorithm_bound),
            fmt_f64(r.ratio())
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_arithmetic() {
        // m=6, l=2, gamma=0.5: 6*2/0.5 * ln(4) = 24 * 1.3862943611198906
        assert!((iteration_bound(2, 6, 0.5) - 33.27106466687737).abs() < 1e-12);
        assert!((algorithm_bound(Algorithm::Strategy, 2, 6, 0.5) - 16.635532333438686).abs() < 1e-12);
    }

    #[test]
    fn small_sweep_cardinality_and_order() {
        let spec = SweepSpec {
            sizes: vec![2, 3],
            gammas: vec![0.5],
            seeds: vec![0, 1],
            timing: false,
            ..SweepSpec::default()
        };
        let rows = run_sweep(&spec);
        assert_eq!(rows.len(), 2 * 2 * 3);
        assert_eq!(rows[0].algorithm, Algorithm::Strategy);
        assert_eq!(rows[3].seed, 1);
        assert_eq!(rows[6].l, 3);
        assert!(rows.iter().all(|r| r.certified && r.wall_ns == 0));
        let csv = rows_csv(&rows);
        assert_eq!(csv.lines().count(), 13);
        assert_eq!(csv, rows_csv(&run_sweep(&spec)));
    }
}
