//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbsg_core::bench::{algorithm_bound, rows_csv, run_sweep, SweepSpec};
use tbsg_core::{
    brute_force_equilibrium, generate, is_equilibrium, pull_back_strategy, solve, to_binary,
    write_game, Algorithm, Game, GenSpec, Player, SolveOptions, SolveReport, Strategy,
    DEFAULT_EPS,
};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(failures: &[String], ok: String) -> Verdict {
    match failures.first() {
        None => Verdict { passed: true, detail: ok },
        Some(first) => Verdict {
            passed: false,
            detail: format!("{} failure(s), first: {first}", failures.len()),
        },
    }
}

fn small_game(seed: u64) -> Game {
    let l = 2 + (seed % 5) as usize;
    let gamma = [0.5, 0.9][((seed / 5) % 2) as usize];
    generate(&GenSpec::new(l, gamma, 10_000 + seed)).unwrap()
}

fn run_all(g: &Game) -> Vec<SolveReport> {
    let start = Strategy::lowest_index(g);
    Algorithm::ALL
        .iter()
        .map(|&alg| solve(g, alg, &start, &SolveOptions::default()))
        .collect()
}

fn oracle_equivalence() -> Verdict {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let games = 210;
    for seed in 0..games {
        let g = small_game(seed);
        let truth = brute_force_equilibrium(&g).unwrap();
        for rep in run_all(&g) {
            let diff = rep.value.max_abs_diff(&truth.value);
            if diff > 1e-6 || !rep.certified {
                fails.push(format!("seed {seed} {}: max diff {diff:e}", rep.algorithm));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if secs > 60.0 {
        fails.push(format!("took {secs:.1}s, budget 60s"));
    }
    verdict(&fails, format!("{games} games x 3 algorithms within 1e-6 in {secs:.2}s"))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn flux_identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let pairs = 1000;
    for i in 0..pairs {
        let mut spec = GenSpec::new(1 + i % 8, [0.5, 0.9, 0.99][i % 3], 20_000 + i as u64);
        spec.actions_per_state = (1, 4);
        spec.reward_range = (-5.0, 5.0);
        let g = generate(&spec).unwrap();
        let pi = Strategy::random(&g, &mut rng);
        let other = Strategy::random(&g, &mut rng);
        let l = g.num_states() as f64;
        let horizon = l / (1.0 - g.gamma());

        let x = g.flux_of(&pi);
        let v = g.value_of(&pi);
        let e1 = rel_err(x.sum(), horizon);
        let in_range = (0..g.num_actions()).all(|a| {
            if pi.uses(&g, a) {
                x[a] >= 1.0 - 1e-8 && x[a] <= horizon + 1e-9
            } else {
                x[a] == 0.0
            }
        });
        let xr: f64 = x.iter().zip(g.rewards()).map(|(x, r)| x * r).sum();
        let e3 = rel_err(v.sum(), xr);

        let v_other = g.value_of(&other);
        let x_other = g.flux_of(&other);
        let rc = g.modified_reward(&pi, &v);
        let lhs = v_other.sum() - v.sum();
        let rhs: f64 = x_other.iter().zip(rc.iter()).map(|(x, r)| x * r).sum();
        let e4 = (lhs - rhs).abs() / v_other.sum().abs().max(v.sum().abs()).max(1.0);

        worst = worst.max(e1).max(e3).max(e4);
        if e1 > 1e-8 || !in_range || e3 > 1e-8 || e4 > 1e-8 {
            fails.push(format!("pair {i}: sum err {e1:e}, bounds {in_range}, xr err {e3:e}, diff err {e4:e}"));
        }
    }
    verdict(&fails, format!("{pairs} pairs, worst relative error {worst:.2e}"))
}

fn contraction() -> Verdict {
    let mut fails = Vec::new();
    let mut traces = 0;
    let mut steps = 0;
    let mut worst_ratio = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..300 {
        let g = small_game(5000 + seed / 2);
        let truth = brute_force_equilibrium(&g).unwrap();
        let start = if seed % 2 == 0 { Strategy::lowest_index(&g) } else { Strategy::random(&g, &mut rng) };
        let rep = solve(&g, Algorithm::Simplex, &start, &SolveOptions::default());
        traces += 1;
        let factor = 1.0 - (1.0 - g.gamma()) / g.num_states() as f64;
        let gap = |n: usize| truth.value.sum() - rep.trace[n].sum_v;
        for n in 0..rep.iterations {
            steps += 1;
            if gap(n + 1) > factor * gap(n) + 1e-8 {
                fails.push(format!("seed {seed} step {n}: {} > {}", gap(n + 1), factor * gap(n)));
            }
            if gap(n) > 1e-8 {
                worst_ratio = worst_ratio.max(gap(n + 1) / gap(n) / factor);
            }
        }
    }
    verdict(&fails, format!("{traces} simplex traces, {steps} steps, max gap ratio / bound {worst_ratio:.3}"))
}

fn monotonicity() -> Verdict {
    let mut fails = Vec::new();
    let mut traces = 0;
    for seed in 0..200 {
        let g = small_game(seed);
        for rep in run_all(&g) {
            traces += 1;
            for w in rep.trace.windows(2) {
                if w[1].sum_v < w[0].sum_v - 1e-9 {
                    fails.push(format!("seed {seed} {} iter {}", rep.algorithm, w[0].iter));
                }
            }
        }
    }
    verdict(&fails, format!("{traces} traces nondecreasing"))
}

fn iteration_budget() -> Verdict {
    let spec = SweepSpec::default();
    let rows = run_sweep(&spec);
    let mut fails = Vec::new();
    let mut worst = [0.0f64; 3];
    for r in &rows {
        let cap = 10.0 * algorithm_bound(r.algorithm, r.l, r.m, r.gamma);
        if !r.certified || r.iterations as f64 > cap {
            fails.push(format!(
                "l={} m={} gamma={} seed={} {}: {} iterations, cap {cap:.1}, certified {}",
                r.l, r.m, r.gamma, r.seed, r.algorithm, r.iterations, r.certified
            ));
        }
        let k = Algorithm::ALL.iter().position(|&a| a == r.algorithm).unwrap();
        worst[k] = worst[k].max(r.ratio());
    }
    let csv = rows_csv(&rows);
    if csv.lines().count() != rows.len() + 1 {
        fails.push("CSV row count mismatch".into());
    }
    verdict(
        &fails,
        format!(
            "{} rows; max iterations/rate: strategy {:.3}, simplex {:.3}, modified-simplex {:.3} (cap 10)",
            rows.len(),
            worst[0],
            worst[1],
            worst[2]
        ),
    )
}

fn transformation() -> Verdict {
    let mut fails = Vec::new();
    let mut games = 0;
    let mut seed = 0u64;
    while games < 60 {
        seed += 1;
        let mut spec = GenSpec::new(2 + (seed % 4) as usize, [0.5, 0.9][(seed % 2) as usize], 30_000 + seed);
        spec.actions_per_state = (1, 4);
        let g = generate(&spec).unwrap();
        if g.num_actions() < 2 || g.strategy_count() > 5e4 {
            continue;
        }
        games += 1;
        let truth = brute_force_equilibrium(&g).unwrap();
        let tg = to_binary(&g).unwrap();
        let (m, l) = (g.num_actions(), g.num_states());
        let p = (m as f64).log2().ceil() as usize;
        if tg.game.num_states() > m + l * p {
            fails.push(format!("seed {seed}: {} states > {}", tg.game.num_states(), m + l * p));
        }
        if (0..tg.game.num_states()).any(|s| tg.game.actions_of(s).len() != 2) {
            fails.push(format!("seed {seed}: a state without exactly two actions"));
        }
        let c = g.gamma().powf((p as f64 - 1.0) / p as f64);
        let rep = solve(&tg.game, Algorithm::Simplex, &Strategy::lowest_index(&tg.game), &SolveOptions::default());
        if tg.uses_dummy(&rep.equilibrium) {
            fails.push(format!("seed {seed}: dummy action in equilibrium"));
        }
        if !is_equilibrium(&g, &pull_back_strategy(&tg, &rep.equilibrium), 10.0 * DEFAULT_EPS).holds {
            fails.push(format!("seed {seed}: pulled-back strategy not an equilibrium"));
        }
        for s in 0..l {
            if (rep.value[s] - c * truth.value[s]).abs() > 1e-6 {
                fails.push(format!("seed {seed} state {s}: V = {} vs c*v = {}", rep.value[s], c * truth.value[s]));
            }
        }
    }
    verdict(&fails, format!("{games} games: two actions per state, size bound, no dummies, V = c*v"))
}

/// Bellman iteration for a pure maximizing MDP until the sup-norm residual
/// is at most 1e-12.
fn value_iteration(g: &Game) -> Vec<f64> {
    let l = g.num_states();
    let mut v = vec![0.0; l];
    loop {
        let next: Vec<f64> = (0..l)
            .map(|s| {
                g.actions_of(s)
                    .iter()
                    .map(|&a| {
                        let ev: f64 = g.transition(a).iter().zip(&v).map(|(p, x)| p * x).sum();
                        g.reward(a) + g.gamma() * ev
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if residual <= 1e-12 {
            return v;
        }
    }
}

fn mdp_specialization() -> Verdict {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let games = 60;
    for seed in 0..games {
        let mut spec = GenSpec::new(2 + (seed % 7) as usize, [0.5, 0.9, 0.99][(seed % 3) as usize], 40_000 + seed);
        spec.player2_empty = true;
        spec.deterministic = true;
        spec.actions_per_state = (1, 4);
        let g = generate(&spec).unwrap();
        assert!(g.owners().iter().all(|&p| p == Player::One));
        let reference = value_iteration(&g);
        let rep = solve(&g, Algorithm::Simplex, &Strategy::lowest_index(&g), &SolveOptions::default());
        let diff = rep.value.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff);
        if diff > 1e-8 {
            fails.push(format!("seed {seed}: diff {diff:e}"));
        }
    }
    verdict(&fails, format!("{games} deterministic MDPs, max diff {worst:.2e}"))
}

fn determinism() -> Verdict {
    let mut fails = Vec::new();
    let artifacts = |seed: u64| -> Vec<String> {
        let g = generate(&GenSpec::new(5, 0.9, seed)).unwrap();
        let mut out = vec![write_game(&g)];
        for rep in run_all(&g) {
            out.push(rep.trace_csv());
            out.push(format!("{:?} {:?}", rep.equilibrium, rep.value.iter().map(|x| x.to_bits()).collect::<Vec<_>>()));
        }
        let tg = to_binary(&g).unwrap();
        out.push(write_game(&tg.game));
        out.push(tg.map_text());
        out
    };
    for seed in 0..20 {
        if artifacts(seed) != artifacts(seed) {
            fails.push(format!("seed {seed}: artifacts differ between runs"));
        }
    }
    let spec = SweepSpec { sizes: vec![3, 4], seeds: vec![0, 1, 2], timing: false, ..SweepSpec::default() };
    if rows_csv(&run_sweep(&spec)) != rows_csv(&run_sweep(&spec)) {
        fails.push("bench CSV differs between runs".into());
    }
    verdict(&fails, "games, traces, transforms and bench CSV byte-identical across runs".into())
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 flux identities", flux_identities),
        ("3 simplex contraction", contraction),
        ("4 monotonicity", monotonicity),
        ("5 iteration budget", iteration_budget),
        ("6 binary transformation", transformation),
        ("7 MDP specialization", mdp_specialization),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
