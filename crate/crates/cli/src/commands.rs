use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbsg_core::bench::{rows_csv, run_sweep, SweepSpec};
use tbsg_core::format::fmt_f64;
use tbsg_core::verify::{run_checks, Check, Outcome};
use tbsg_core::{
    generate, parse_game, solve, to_binary, write_game, Game, GenSpec, SolveOptions, SolveStatus,
    Strategy,
};

use crate::config::{BenchArgs, Cli, Command, GenArgs, RunConfig, SolveArgs, TransformArgs, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;

type CmdResult = Result<u8, String>;

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_game(path: &Path) -> Result<Game, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_game(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(" ")
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let cfg = RunConfig::resolve(args.tol.eps, args.tol.max_iters)?;
    let game = read_game(&args.input)?;
    let start = match args.start_seed {
        Some(seed) => Strategy::random(&game, &mut ChaCha8Rng::seed_from_u64(seed)),
        None => Strategy::lowest_index(&game),
    };
    let opts = SolveOptions { eps: cfg.eps, max_iters: cfg.max_iters };
    let rep = solve(&game, args.algorithm, &start, &opts);

    let status = match rep.status {
        SolveStatus::Converged => "converged",
        SolveStatus::IterationLimit => "iteration-limit",
    };
    let choices: Vec<String> = rep.equilibrium.choices().iter().map(ToString::to_string).collect();
    let text = format!(
        "algorithm {}\nstatus {status}\ncertified {}\niterations {}\nstrategy {}\nvalue {}\n",
        rep.algorithm,
        rep.certified,
        rep.iterations,
        choices.join(" "),
        join_f64(&rep.value)
    );
    emit(args.output.as_deref(), &text)?;
    if let Some(path) = &args.trace {
        fs::write(path, rep.trace_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    Ok(match rep.status {
        SolveStatus::IterationLimit => {
            eprintln!("iteration limit {} reached before equilibrium", cfg.max_iters);
            EXIT_BUDGET
        }
        SolveStatus::Converged if rep.certified => EXIT_OK,
        SolveStatus::Converged => {
            eprintln!("result failed equilibrium certification");
            EXIT_INPUT
        }
    })
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let spec = GenSpec {
        num_states: args.states,
        actions_per_state: (args.min_actions, args.max_actions),
        gamma: args.gamma,
        seed: args.seed,
        deterministic: args.deterministic,
        player2_empty: args.mdp,
        reward_range: (args.reward_min, args.reward_max),
    };
    let game = generate(&spec).map_err(|e| e.to_string())?;
    emit(args.output.as_deref(), &write_game(&game))?;
    Ok(EXIT_OK)
}

fn cmd_transform(args: TransformArgs) -> CmdResult {
    let game = read_game(&args.input)?;
    let tg = to_binary(&game).map_err(|e| e.to_string())?;
    emit(args.output.as_deref(), &write_game(&tg.game))?;
    if let Some(path) = &args.map {
        fs::write(path, tg.map_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let cfg = RunConfig::resolve(args.eps, 1)?;
    let game = match &args.input {
        Some(path) => read_game(path)?,
        None => generate(&GenSpec::new(args.states, args.gamma, args.seed)).map_err(|e| e.to_string())?,
    };
    let checks = if args.checks.is_empty() { Check::ALL.to_vec() } else { args.checks.clone() };
    let reports = run_checks(&game, &checks, cfg.eps, args.seed);
    println!("{:<12} {:<6} detail", "check", "result");
    for r in &reports {
        println!("{:<12} {:<6} {}", r.check.name(), r.outcome, r.detail);
    }
    let failed: Vec<&str> =
        reports.iter().filter(|r| r.outcome == Outcome::Fail).map(|r| r.check.name()).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(EXIT_INPUT)
    }
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let cfg = RunConfig::resolve(args.tol.eps, args.tol.max_iters)?;
    if args.sizes.contains(&0) || args.min_actions == 0 || args.min_actions > args.max_actions {
        return Err("sizes and action counts must be positive, with --min-actions <= --max-actions".into());
    }
    if args.gammas.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
        return Err("every gamma must lie in (0, 1)".into());
    }
    let spec = SweepSpec {
        sizes: args.sizes,
        gammas: args.gammas,
        seeds: (0..args.seeds).collect(),
        algorithms: args.algorithms,
        actions_per_state: (args.min_actions, args.max_actions),
        eps: cfg.eps,
        max_iters: cfg.max_iters,
        timing: !args.no_timing,
    };
    let rows = run_sweep(&spec);
    emit(args.output.as_deref(), &rows_csv(&rows))?;
    let uncertified = rows.iter().filter(|r| !r.certified).count();
    if uncertified > 0 {
        eprintln!("{uncertified} runs did not reach a certified equilibrium");
    }
    Ok(EXIT_OK)
}
