use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tbsg_core::{generate, solve, write_game, Algorithm, GenSpec, SolveOptions, Strategy};

fn tbsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbsg"))
        .args(args)
        .env_remove("TBSG_EPS")
        .output()
        .expect("spawn tbsg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen_file(dir: &Path, name: &str, states: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = tbsg(&["gen", "--states", &states.to_string(), "--seed", &seed.to_string(), "--output", p(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

#[test]
fn solve_prints_certified_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 5, 3);
    for alg in ["strategy", "simplex", "modified-simplex"] {
        let out = tbsg(&["solve", "--input", p(&game), "--algorithm", alg]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains(&format!("algorithm {alg}\n")));
        assert!(text.contains("status converged\n"));
        assert!(text.contains("certified true\n"));
        let strategy = text.lines().find(|l| l.starts_with("strategy ")).unwrap();
        assert_eq!(strategy.split_whitespace().count(), 6);
    }
}

#[test]
fn algorithms_report_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 6, 11);
    let values: Vec<Vec<f64>> = ["strategy", "simplex", "modified-simplex"]
        .iter()
        .map(|alg| {
            let text = stdout(&tbsg(&["solve", "--input", p(&game), "--algorithm", alg]));
            let line = text.lines().find(|l| l.starts_with("value ")).unwrap().to_string();
            line.split_whitespace().skip(1).map(|x| x.parse().unwrap()).collect()
        })
        .collect();
    for v in &values[1..] {
        for (a, b) in v.iter().zip(&values[0]) {
            assert!((a - b).abs() <= 1e-6);
        }
    }
}

#[test]
fn malformed_gamma_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 3, 0);
    let text = fs::read_to_string(&game).unwrap();
    let bad: String = text
        .lines()
        .map(|l| if l.starts_with("gamma ") { "gamma 1.5".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    let bad_path = dir.path().join("bad.txt");
    fs::write(&bad_path, bad).unwrap();
    let out = tbsg(&["solve", "--input", p(&bad_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    fs::write(&bad_path, text.replace("gamma ", "gamma x")).unwrap();
    let out = tbsg(&["solve", "--input", p(&bad_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 4"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = tbsg(&["solve", "--input", "/nonexistent/game.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn iteration_budget_exit_code() {
    let game = (0..200)
        .map(|seed| generate(&GenSpec::new(6, 0.9, seed)).unwrap())
        .find(|g| {
            let rep = solve(g, Algorithm::Simplex, &Strategy::lowest_index(g), &SolveOptions::default());
            rep.iterations >= 2
        })
        .expect("a game needing two updates");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, write_game(&game)).unwrap();
    let out = tbsg(&["solve", "--input", p(&path), "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stdout(&out).contains("status iteration-limit"));
    let out = tbsg(&["solve", "--input", p(&path), "--max-iters", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 7, 42);
    let text = fs::read_to_string(&game).unwrap();
    let parsed = tbsg_core::parse_game(&text).unwrap();
    assert_eq!(write_game(&parsed), text);

    let again = gen_file(dir.path(), "h.txt", 7, 42);
    assert_eq!(fs::read(&again).unwrap(), text.as_bytes());
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 6, 5);
    let run = |tag: &str| {
        let trace = dir.path().join(format!("trace-{tag}.csv"));
        let out = tbsg(&["solve", "--input", p(&game), "--trace", p(&trace), "--start-seed", "9"]);
        assert!(out.status.success());
        (stdout(&out), fs::read_to_string(&trace).unwrap())
    };
    let (a, ta) = run("a");
    let (b, tb) = run("b");
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert!(ta.starts_with("iter,sum_v,max_rc_p1,switched_state,switched_action\n"));
}

#[test]
fn verify_generated_game_passes() {
    let out = tbsg(&["verify", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    for check in ["validate", "flux", "signs", "oracle", "contraction", "transform"] {
        let line = text.lines().find(|l| l.starts_with(check)).unwrap();
        assert!(line.contains("PASS"), "{line}");
    }
}

#[test]
fn verify_rejects_short_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(
        &path,
        "tbsg 1\nstates 2\nactions 2\ngamma 0.9\nowners 1 2\n\
         action 0 state 0 reward 1 next 0:0.5\n\
         action 1 state 1 reward 0 next 0:1\n",
    )
    .unwrap();
    let out = tbsg(&["verify", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 6"), "{}", stderr(&out));
}

#[test]
fn transform_rejects_single_action_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.txt");
    fs::write(&path, "tbsg 1\nstates 1\nactions 1\ngamma 0.5\nowners 1\naction 0 state 0 reward 1 next 0:1\n")
        .unwrap();
    let out = tbsg(&["verify", "--input", p(&path), "--check", "transform"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("unsupported instance"), "{}", stdout(&out));

    let out = tbsg(&["transform", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unsupported instance"));
}

#[test]
fn transform_writes_binary_game_and_map() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 4, 2);
    let out_path = dir.path().join("bin.txt");
    let map_path = dir.path().join("bin.map");
    let out = tbsg(&["transform", "--input", p(&game), "--output", p(&out_path), "--map", p(&map_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tg = tbsg_core::parse_game(&fs::read_to_string(&out_path).unwrap()).unwrap();
    for s in 0..tg.num_states() {
        assert_eq!(tg.actions_of(s).len(), 2);
    }
    let map = fs::read_to_string(&map_path).unwrap();
    assert_eq!(map.lines().filter(|l| l.starts_with("newstate ")).count(), tg.num_states());

    let out = tbsg(&["solve", "--input", p(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bench_sweep_has_every_row() {
    let out = tbsg(&["bench", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "l,m,gamma,seed,algorithm,iterations,wall_ns,certified,bound,algorithm_bound,ratio"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 135);
    assert!(rows.iter().all(|r| r.split(',').nth(7) == Some("true")));
    assert!(rows.iter().all(|r| r.split(',').nth(6) == Some("0")));
    assert_eq!(stdout(&tbsg(&["bench", "--no-timing"])), text);
}

#[test]
fn bench_rejects_bad_gamma() {
    let out = tbsg(&["bench", "--gammas", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eps_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let game = gen_file(dir.path(), "g.txt", 3, 1);
    let bad = Command::new(env!("CARGO_BIN_EXE_tbsg"))
        .args(["solve", "--input", p(&game)])
        .env("TBSG_EPS", "nope")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("TBSG_EPS"));

    let ok = Command::new(env!("CARGO_BIN_EXE_tbsg"))
        .args(["solve", "--input", p(&game), "--eps", "1e-9"])
        .env("TBSG_EPS", "nope")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let neg = tbsg(&["solve", "--input", p(&game), "--eps", "-1"]);
    assert_eq!(neg.status.code(), Some(1));
}
