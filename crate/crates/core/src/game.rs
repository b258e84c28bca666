//! Hash-consed store of short games, disjunctive sums and misère outcomes.
//!
//! Every game lives in a [`GameStore`] and is addressed by a [`GameRef`].
//! Option sets are deduplicated and sorted before interning, so two refs are
//! equal exactly when the underlying canonical trees are identical.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game {0} is not impartial")]
    NotImpartial(GameRef),
}

/// Misère outcome class of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Left wins whoever moves first.
    L,
    /// Right wins whoever moves first.
    R,
    /// The previous player (the one not to move) wins.
    P,
    /// The next player (the one to move) wins.
    N,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome::L, Outcome::R, Outcome::P, Outcome::N];

    fn from_wins(left_first: bool, right_first: bool) -> Self {
        match (left_first, right_first) {
            (true, true) => Outcome::N,
            (false, false) => Outcome::P,
            (true, false) => Outcome::L,
            (false, true) => Outcome::R,
        }
    }

    /// Left wins when Left moves first.
    pub fn left_wins_first(self) -> bool {
        matches!(self, Outcome::L | Outcome::N)
    }

    /// Right wins when Right moves first.
    pub fn right_wins_first(self) -> bool {
        matches!(self, Outcome::R | Outcome::N)
    }

    pub fn ge(self, other: Outcome) -> bool {
        outcome_ge(self, other)
    }
}

/// The outcome partial order: `L >= P >= R`, `L >= N >= R`, `P` and `N`
/// incomparable.
pub fn outcome_ge(a: Outcome, b: Outcome) -> bool {
    use Outcome::*;
    match (a, b) {
        _ if a == b => true,
        (L, _) | (_, R) => true,
        _ => false,
    }
}

impl PartialOrd for Outcome {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (outcome_ge(*self, *other), outcome_ge(*other, *self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::L => "L",
            Outcome::R => "R",
            Outcome::P => "P",
            Outcome::N => "N",
        };
        f.write_str(s)
    }
}

/// Handle to an interned game. Only meaningful for the store that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameRef(u32);

impl GameRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GameRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Canonical node: sorted, duplicate-free option sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameNode {
    left: Box<[GameRef]>,
    right: Box<[GameRef]>,
}

impl GameNode {
    pub fn left(&self) -> &[GameRef] {
        &self.left
    }

    pub fn right(&self) -> &[GameRef] {
        &self.right
    }
}

#[derive(Debug, Clone, Copy)]
struct NodeMeta {
    impartial: bool,
    birthday: u32,
    /// `Some(n)` when the node is structurally the Nim heap of size `n`.
    heap: Option<u32>,
}

/// Interning table plus the memo tables that hang off it.
#[derive(Debug)]
pub struct GameStore {
    nodes: Vec<GameNode>,
    meta: Vec<NodeMeta>,
    index: HashMap<GameNode, GameRef>,
    heaps: Vec<GameRef>,
    outcomes: Vec<Option<Outcome>>,
    grundy: Vec<Option<u32>>,
    sums: HashMap<(GameRef, GameRef), GameRef>,
}

impl Default for GameStore {
    fn default() -> Self {
        Self::new()
    }
}

impl GameStore {
    pub fn new() -> Self {
        let mut store = GameStore {
            nodes: Vec::new(),
            meta: Vec::new(),
            index: HashMap::new(),
            heaps: Vec::new(),
            outcomes: Vec::new(),
            grundy: Vec::new(),
            sums: HashMap::new(),
        };
        let zero = store.make_game([], []);
        store.heaps.push(zero);
        store
    }

    /// Number of distinct games interned so far.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns the game `{left | right}`. Duplicate options are dropped.
    ///
    /// Panics if any option was not issued by this store.
    pub fn make_game<L, R>(&mut self, left: L, right: R) -> GameRef
    where
        L: IntoIterator<Item = GameRef>,
        R: IntoIterator<Item = GameRef>,
    {
        let left = self.canonical_set(left);
        let right = self.canonical_set(right);
        let node = GameNode { left, right };
        if let Some(&g) = self.index.get(&node) {
            return g;
        }

        let meta = self.compute_meta(&node);
        let id = u32::try_from(self.nodes.len()).expect("game store overflow");
        let g = GameRef(id);
        self.nodes.push(node.clone());
        self.meta.push(meta);
        self.outcomes.push(None);
        self.grundy.push(None);
        self.index.insert(node, g);
        g
    }

    fn canonical_set<I: IntoIterator<Item = GameRef>>(&self, options: I) -> Box<[GameRef]> {
        let mut v: Vec<GameRef> = options.into_iter().collect();
        for g in &v {
            assert!(g.index() < self.nodes.len(), "{g} is not a ref of this store");
        }
        v.sort_unstable();
        v.dedup();
        v.into_boxed_slice()
    }

    fn compute_meta(&self, node: &GameNode) -> NodeMeta {
        let impartial =
            node.left == node.right && node.left.iter().all(|g| self.meta[g.index()].impartial);
        let birthday = node
            .left
            .iter()
            .chain(node.right.iter())
            .map(|g| self.meta[g.index()].birthday + 1)
            .max()
            .unwrap_or(0);
        // A heap of size n has exactly the heaps 0..n as options.
        let heap = if impartial {
            let mut sizes: Vec<u32> = Vec::with_capacity(node.left.len());
            for g in node.left.iter() {
                match self.meta[g.index()].heap {
                    Some(n) => sizes.push(n),
                    None => break,
                }
            }
            sizes.sort_unstable();
            let n = node.left.len();
            (sizes.len() == n && sizes.iter().enumerate().all(|(i, &s)| s as usize == i))
                .then_some(n as u32)
        } else {
            None
        };
        NodeMeta {
            impartial,
            birthday,
            heap,
        }
    }

    pub fn node(&self, g: GameRef) -> &GameNode {
        &self.nodes[g.index()]
    }

    pub fn left_options(&self, g: GameRef) -> &[GameRef] {
        &self.nodes[g.index()].left
    }

    pub fn right_options(&self, g: GameRef) -> &[GameRef] {
        &self.nodes[g.index()].right
    }

    /// Options of an impartial game (its Left and Right sets coincide).
    pub fn options(&self, g: GameRef) -> &[GameRef] {
        debug_assert!(self.is_impartial(g));
        &self.nodes[g.index()].left
    }

    pub fn zero(&self) -> GameRef {
        self.heaps[0]
    }

    pub fn is_zero(&self, g: GameRef) -> bool {
        g == self.zero()
    }

    pub fn is_impartial(&self, g: GameRef) -> bool {
        self.meta[g.index()].impartial
    }

    /// Height of the game tree.
    pub fn birthday(&self, g: GameRef) -> u32 {
        self.meta[g.index()].birthday
    }

    /// Size of the Nim heap `g` is identical to, if any.
    pub fn heap_size(&self, g: GameRef) -> Option<u32> {
        self.meta[g.index()].heap
    }

    /// The Nim heap of size `n`, whose options are all smaller heaps.
    pub fn nim_heap(&mut self, n: u32) -> GameRef {
        while self.heaps.len() <= n as usize {
            let options = self.heaps.clone();
            let next = self.make_game(options.iter().copied(), options.iter().copied());
            self.heaps.push(next);
        }
        self.heaps[n as usize]
    }

    /// Disjunctive sum: a move is a move in exactly one summand.
    pub fn sum(&mut self, g: GameRef, h: GameRef) -> GameRef {
        if self.is_zero(g) {
            return h;
        }
        if self.is_zero(h) {
            return g;
        }
        let key = if g <= h { (g, h) } else { (h, g) };
        if let Some(&s) = self.sums.get(&key) {
            return s;
        }

        let (gl, gr) = {
            let node = self.node(g);
            (node.left.to_vec(), node.right.to_vec())
        };
        let (hl, hr) = {
            let node = self.node(h);
            (node.left.to_vec(), node.right.to_vec())
        };
        let mut left = Vec::with_capacity(gl.len() + hl.len());
        for x in gl {
            left.push(self.sum(x, h));
        }
        for x in hl {
            left.push(self.sum(g, x));
        }
        let mut right = Vec::with_capacity(gr.len() + hr.len());
        for x in gr {
            right.push(self.sum(x, h));
        }
        for x in hr {
            right.push(self.sum(g, x));
        }

        let s = self.make_game(left, right);
        self.sums.insert(key, s);
        s
    }

    /// Sum of any number of games; the empty sum is `0`.
    pub fn sum_all<I: IntoIterator<Item = GameRef>>(&mut self, games: I) -> GameRef {
        games
            .into_iter()
            .fold(self.zero(), |acc, g| self.sum(acc, g))
    }

    /// Misère outcome: a player with no legal move wins.
    pub fn misere_outcome(&mut self, g: GameRef) -> Outcome {
        if let Some(o) = self.outcomes[g.index()] {
            return o;
        }
        let node = self.nodes[g.index()].clone();

        let mut left_first = node.left.is_empty();
        for &x in node.left.iter() {
            if left_first {
                break;
            }
            // Left moves to x and wins iff Right, now first in x, loses.
            left_first = !self.misere_outcome(x).right_wins_first();
        }
        let mut right_first = node.right.is_empty();
        for &x in node.right.iter() {
            if right_first {
                break;
            }
            right_first = !self.misere_outcome(x).left_wins_first();
        }

        let o = Outcome::from_wins(left_first, right_first);
        self.outcomes[g.index()] = Some(o);
        o
    }

    /// Normal-play Grundy value (mex of the options' values).
    pub fn normal_grundy(&mut self, g: GameRef) -> Result<u32, GameError> {
        if !self.is_impartial(g) {
            return Err(GameError::NotImpartial(g));
        }
        Ok(self.grundy_unchecked(g))
    }

    fn grundy_unchecked(&mut self, g: GameRef) -> u32 {
        if let Some(v) = self.grundy[g.index()] {
            return v;
        }
        let options = self.nodes[g.index()].left.clone();
        let mut seen: Vec<u32> = options.iter().map(|&x| self.grundy_unchecked(x)).collect();
        seen.sort_unstable();
        seen.dedup();
        let mex = seen
            .iter()
            .enumerate()
            .find(|&(i, &v)| v as usize != i)
            .map_or(seen.len(), |(i, _)| i) as u32;
        self.grundy[g.index()] = Some(mex);
        mex
    }

    /// Renders `g` in the notation accepted by the game-expression parser:
    /// `0`, `*n` for Nim heaps, `{a,b|c}` otherwise.
    pub fn display(&self, g: GameRef) -> String {
        self.display_with(g, |_| None)
    }

    /// Like [`Self::display`], but any subgame for which `label` returns a
    /// name is printed as that name.
    pub fn display_with<F>(&self, g: GameRef, label: F) -> String
    where
        F: Fn(GameRef) -> Option<String>,
    {
        let mut out = String::new();
        self.write_game(g, &label, &mut out);
        out
    }

    fn write_game<F>(&self, g: GameRef, label: &F, out: &mut String)
    where
        F: Fn(GameRef) -> Option<String>,
    {
        if let Some(name) = label(g) {
            out.push_str(&name);
            return;
        }
        match self.heap_size(g) {
            Some(0) => out.push('0'),
            Some(n) => {
                out.push('*');
                out.push_str(&n.to_string());
            }
            None => {
                let node = self.node(g);
                out.push('{');
                for (i, &x) in node.left.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_game(x, label, out);
                }
                out.push('|');
                for (i, &x) in node.right.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_game(x, label, out);
                }
                out.push('}');
            }
        }
    }
}
