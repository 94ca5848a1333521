//! Line-oriented game text format.
//!
//! ```text
//! tbsg 1
//! states 2
//! actions 3
//! gamma 0.9
//! owners 1 2
//! action 0 state 0 reward 1.5 next 0:0.5 1:0.5
//! action 1 state 0 reward 0 next 1:1
//! action 2 state 1 reward -1 next 0:1
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Parsing is strict about
//! keys, ordering, duplicate ids and row sums. Floats are written with 17
//! significant digits so that write/parse/write is byte-identical.

use std::fmt::Write as _;

use crate::error::{FormatError, GameError};
use crate::game::{validate_game, Game, Player, ROW_SUM_TOL};

/// Tolerance on row sums accepted by the parser.
pub const PARSE_ROW_SUM_TOL: f64 = 1e-9;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_game(g: &Game) -> String {
    let mut out = String::new();
    writeln!(out, "tbsg 1").unwrap();
    writeln!(out, "states {}", g.num_states()).unwrap();
    writeln!(out, "actions {}", g.num_actions()).unwrap();
    writeln!(out, "gamma {}", fmt_f64(g.gamma())).unwrap();
    let owners: Vec<String> = g.owners().iter().map(|p| p.tag().to_string()).collect();
    writeln!(out, "owners {}", owners.join(" ")).unwrap();
    for a in 0..g.num_actions() {
        write!(out, "action {a} state {} reward {} next", g.state_of(a), fmt_f64(g.reward(a))).unwrap();
        for (t, &p) in g.transition(a).iter().enumerate() {
            if p != 0.0 {
                write!(out, " {t}:{}", fmt_f64(p)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, as (line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                self.last = i + 1;
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        let (n, toks) = self
            .next_tokens()
            .ok_or_else(|| FormatError::new(self.last + 1, format!("expected `{key}`, found end of input")))?;
        if toks[0] != key {
            return Err(FormatError::new(n, format!("expected `{key}`, found `{}`", toks[0])));
        }
        Ok((n, toks))
    }
}

fn single<'a>(line: usize, toks: &[&'a str]) -> Result<&'a str, FormatError> {
    match toks {
        [_, v] => Ok(v),
        _ => Err(FormatError::new(line, format!("`{}` takes exactly one value", toks[0]))),
    }
}

fn parse_usize(line: usize, what: &str, s: &str) -> Result<usize, FormatError> {
    s.parse().map_err(|_| FormatError::new(line, format!("invalid {what} `{s}`")))
}

fn parse_f64(line: usize, what: &str, s: &str) -> Result<f64, FormatError> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(FormatError::new(line, format!("invalid {what} `{s}`"))),
    }
}

pub fn parse_game(text: &str) -> Result<Game, FormatError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (n, toks) = lines.expect("tbsg")?;
    if single(n, &toks)? != "1" {
        return Err(FormatError::new(n, format!("unsupported format version `{}`", toks[1])));
    }
    let (n, toks) = lines.expect("states")?;
    let l = parse_usize(n, "state count", single(n, &toks)?)?;
    if l == 0 {
        return Err(FormatError::new(n, "state count must be positive"));
    }
    let (n, toks) = lines.expect("actions")?;
    let m = parse_usize(n, "action count", single(n, &toks)?)?;
    if m == 0 {
        return Err(FormatError::new(n, "action count must be positive"));
    }
    let (n, toks) = lines.expect("gamma")?;
    let gamma = parse_f64(n, "gamma", single(n, &toks)?)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(FormatError::new(n, format!("gamma {gamma} is outside (0, 1)")));
    }
    let (n, toks) = lines.expect("owners")?;
    if toks.len() - 1 != l {
        return Err(FormatError::new(n, format!("expected {l} owner tags, found {}", toks.len() - 1)));
    }
    let owner = toks[1..]
        .iter()
        .map(|t| match *t {
            "1" => Ok(Player::One),
            "2" => Ok(Player::Two),
            other => Err(FormatError::new(n, format!("owner tag must be 1 or 2, found `{other}`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut slots: Vec<Option<(usize, f64, Vec<f64>)>> = vec![None; m];
    while let Some((n, toks)) = lines.next_tokens() {
        if toks[0] != "action" {
            return Err(FormatError::new(n, format!("unknown key `{}`", toks[0])));
        }
        if toks.len() < 8 || toks[2] != "state" || toks[4] != "reward" || toks[6] != "next" {
            return Err(FormatError::new(
                n,
                "expected `action <id> state <sid> reward <float> next <sid>:<prob> ...`",
            ));
        }
        let id = parse_usize(n, "action id", toks[1])?;
        if id >= m {
            return Err(FormatError::new(n, format!("action id {id} out of range 0..{m}")));
        }
        if slots[id].is_some() {
            return Err(FormatError::new(n, format!("duplicate action id {id}")));
        }
        let s = parse_usize(n, "state id", toks[3])?;
        if s >= l {
            return Err(FormatError::new(n, format!("state {s} out of range 0..{l}")));
        }
        let r = parse_f64(n, "reward", toks[5])?;
        let mut row = vec![0.0; l];
        let mut seen = vec![false; l];
        for entry in &toks[7..] {
            let (t, p) = entry
                .split_once(':')
                .ok_or_else(|| FormatError::new(n, format!("expected `<sid>:<prob>`, found `{entry}`")))?;
            let t = parse_usize(n, "target state", t)?;
            if t >= l {
                return Err(FormatError::new(n, format!("target state {t} out of range 0..{l}")));
            }
            if seen[t] {
                return Err(FormatError::new(n, format!("target state {t} listed twice")));
            }
            seen[t] = true;
            let p = parse_f64(n, "probability", p)?;
            if p < 0.0 {
                return Err(FormatError::new(n, format!("negative probability {p}")));
            }
            row[t] = p;
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > PARSE_ROW_SUM_TOL {
            return Err(FormatError::new(
                n,
                format!("transition probabilities of action {id} sum to {sum}, not 1"),
            ));
        }
        // within parse tolerance but outside the model's: renormalize
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            row.iter_mut().for_each(|p| *p /= sum);
        }
        slots[id] = Some((s, r, row));
    }

    let end = lines.last;
    let mut action_state = Vec::with_capacity(m);
    let mut transition = Vec::with_capacity(m);
    let mut reward = Vec::with_capacity(m);
    for (id, slot) in slots.into_iter().enumerate() {
        let (s, r, row) = slot.ok_or_else(|| FormatError::new(end, format!("action {id} is missing")))?;
        action_state.push(s);
        reward.push(r);
        transition.push(row);
    }
    let g = Game::new_unchecked(owner, action_state, transition, reward, gamma);
    let violations = validate_game(&g);
    if !violations.is_empty() {
        return Err(FormatError::new(0, GameError::Invalid(violations).to_string()));
    }
    Ok(g)
}
