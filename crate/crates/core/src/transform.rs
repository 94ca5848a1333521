//! Reduction of a general game to one where every state has exactly two
//! actions.
//!
//! Every original state `s` becomes the root of a tree whose leaves sit at
//! depth `p = ceil(log2 m)` and correspond one-to-one with `A_s`. The top
//! `p - ceil(log2 |A_s|)` levels are a unary chain; below that the tree is
//! left-complete binary with leaves in ascending action order. Internal
//! nodes other than the root are new states owned by `s`'s owner; moving
//! down the tree is deterministic with reward 0, and a leaf edge is the
//! original action (same reward, same transition row onto original
//! states). The new discount is `gamma^(1/p)`, so one original step takes
//! `p` constructed steps and values at original states scale by
//! `gamma^((p-1)/p)`.
//!
//! States that end up with a single action get a dummy twin with the same
//! transition row and a reward worse by 1 for the owner.

use std::fmt::Write as _;

use crate::error::TransformError;
use crate::game::{validate_game, Game, Player, Strategy};
use crate::error::GameError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeChild {
    /// Index of the child node within the same tree.
    Node(usize),
    /// Original action reached through this edge.
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// State id in the constructed game.
    pub state: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<TreeChild>,
}

/// Tree of one original state. Nodes are stored breadth-first, node 0 is the
/// root (the original state itself).
#[derive(Debug, Clone, PartialEq)]
pub struct StateTree {
    pub root: usize,
    pub nodes: Vec<TreeNode>,
}

impl StateTree {
    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .flat_map(|n| &n.children)
            .filter(|c| matches!(c, TreeChild::Leaf(_)))
            .count()
    }
}

/// What an action of the constructed game stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionOrigin {
    /// Copy of this original action.
    Original(usize),
    /// Deterministic move to a child node (a constructed state).
    Move { to: usize },
    /// Padding twin of another constructed action.
    Dummy { twin: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedGame {
    pub game: Game,
    /// Original state for each constructed state; `None` for tree nodes.
    pub original_state_of: Vec<Option<usize>>,
    /// `(original state, node index)` of every constructed state.
    pub node_of: Vec<(usize, usize)>,
    pub trees: Vec<StateTree>,
    pub action_origin: Vec<ActionOrigin>,
    /// Tree depth `ceil(log2 m)`.
    pub depth: usize,
    /// `gamma^(1/p)`.
    pub delta: f64,
    /// `gamma^((p-1)/p)`.
    pub scale_c: f64,
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Builds the node layout for a tree with `k` leaves at depth `p`. Level
/// `t` holds `ceil(k / 2^(p-t))` nodes; node `j` on a level has children
/// `2j` and `2j + 1` on the next one, when they exist.
fn tree_layout(k: usize, p: usize) -> Vec<Vec<Vec<usize>>> {
    let count = |t: usize| k.div_ceil(1usize << (p - t));
    (0..p)
        .map(|t| {
            let below = count(t + 1);
            (0..count(t))
                .map(|j| [2 * j, 2 * j + 1].into_iter().filter(|&c| c < below).collect())
                .collect()
        })
        .collect()
}

pub fn to_binary(g: &Game) -> Result<TransformedGame, TransformError> {
    let violations = validate_game(g);
    if !violations.is_empty() {
        return Err(GameError::Invalid(violations).into());
    }
    let m = g.num_actions();
    if m < 2 {
        return Err(TransformError::TooFewActions(m));
    }
    let l = g.num_states();
    let p = ceil_log2(m);

    let mut owner: Vec<Player> = g.owners().to_vec();
    let mut original_state_of: Vec<Option<usize>> = (0..l).map(Some).collect();
    let mut node_of: Vec<(usize, usize)> = (0..l).map(|s| (s, 0)).collect();
    let mut trees = Vec::with_capacity(l);

    for s in 0..l {
        let actions = g.actions_of(s);
        let layout = tree_layout(actions.len(), p);
        // breadth-first node numbering: offset of each level
        let mut offsets = Vec::with_capacity(p);
        let mut total = 0;
        for level in &layout {
            offsets.push(total);
            total += level.len();
        }
        let mut nodes = Vec::with_capacity(total);
        for (t, level) in layout.iter().enumerate() {
            for (j, kids) in level.iter().enumerate() {
                let idx = offsets[t] + j;
                let state = if idx == 0 {
                    s
                } else {
                    owner.push(g.owner(s));
                    original_state_of.push(None);
                    node_of.push((s, idx));
                    owner.len() - 1
                };
                let parent = (t > 0).then(|| offsets[t - 1] + j / 2);
                let children = kids
                    .iter()
                    .map(|&c| {
                        if t + 1 == p {
                            TreeChild::Leaf(actions[c])
                        } else {
                            TreeChild::Node(offsets[t + 1] + c)
                        }
                    })
                    .collect();
                nodes.push(TreeNode { state, depth: t, parent, children });
            }
        }
        trees.push(StateTree { root: s, nodes });
    }

    let n_states = owner.len();
    let mut action_state = Vec::new();
    let mut transition = Vec::new();
    let mut reward = Vec::new();
    let mut action_origin = Vec::new();
    for (state, &(s, idx)) in node_of.iter().enumerate() {
        let tree = &trees[s];
        let node = &tree.nodes[idx];
        for child in &node.children {
            let (row, r, origin) = match *child {
                TreeChild::Leaf(a) => {
                    let mut row = g.transition(a).to_vec();
                    row.resize(n_states, 0.0);
                    (row, g.reward(a), ActionOrigin::Original(a))
                }
                TreeChild::Node(c) => {
                    let to = tree.nodes[c].state;
                    let mut row = vec![0.0; n_states];
                    row[to] = 1.0;
                    (row, 0.0, ActionOrigin::Move { to })
                }
            };
            action_state.push(state);
            transition.push(row);
            reward.push(r);
            action_origin.push(origin);
        }
        if node.children.len() == 1 {
            let twin = action_origin.len() - 1;
            let worse = match owner[state] {
                Player::One => -1.0,
                Player::Two => 1.0,
            };
            action_state.push(state);
            transition.push(transition[twin].clone());
            reward.push(reward[twin] + worse);
            action_origin.push(ActionOrigin::Dummy { twin });
        }
    }

    let gamma = g.gamma();
    let delta = gamma.powf(1.0 / p as f64);
    let scale_c = gamma.powf((p as f64 - 1.0) / p as f64);
    let game = Game::new(owner, action_state, transition, reward, delta)?;
    Ok(TransformedGame {
        game,
        original_state_of,
        node_of,
        trees,
        action_origin,
        depth: p,
        delta,
        scale_c,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalAction {
    /// Original action reached.
    pub action: usize,
    /// Constructed states visited, starting at the original state.
    pub path: Vec<usize>,
}

impl TransformedGame {
    /// Constructed action with dummy twins resolved to the real action.
    fn resolve(&self, action: usize) -> ActionOrigin {
        match self.action_origin[action] {
            ActionOrigin::Dummy { twin } => self.action_origin[twin],
            other => other,
        }
    }

    /// Whether `pi_new` uses any padding action.
    pub fn uses_dummy(&self, pi_new: &Strategy) -> bool {
        pi_new
            .choices()
            .iter()
            .any(|&a| matches!(self.action_origin[a], ActionOrigin::Dummy { .. }))
    }

    /// Mapping file: `# map` header, then one `newstate <id> from <origin>`
    /// line per constructed state.
    pub fn map_text(&self) -> String {
        let mut out = String::from("# map\n");
        for (state, &(s, idx)) in self.node_of.iter().enumerate() {
            if idx == 0 {
                writeln!(out, "newstate {state} from {s}").unwrap();
            } else {
                writeln!(out, "newstate {state} from tree:{s}/{idx}").unwrap();
            }
        }
        out
    }
}

/// Follows `pi_new` from original state `s` through its tree until an
/// original action is taken. A dummy action is followed like its twin.
pub fn final_action(tg: &TransformedGame, pi_new: &Strategy, s: usize) -> FinalAction {
    let mut path = vec![s];
    let mut cur = s;
    loop {
        match tg.resolve(pi_new.choice(cur)) {
            ActionOrigin::Original(a) => return FinalAction { action: a, path },
            ActionOrigin::Move { to } => {
                path.push(to);
                cur = to;
            }
            ActionOrigin::Dummy { .. } => unreachable!("dummy twins are never dummies"),
        }
    }
}

/// Original strategy that takes, at every original state, its final action
/// under `pi_new`.
pub fn pull_back_strategy(tg: &TransformedGame, pi_new: &Strategy) -> Strategy {
    let l = tg.trees.len();
    Strategy::new((0..l).map(|s| final_action(tg, pi_new, s).action).collect())
}
