//! Nim positions as heap multisets.
//!
//! A position is stored as a nondecreasing sequence of positive heap sizes,
//! which identifies it up to isomorphism. Positions are totally ordered by the
//! quasi-lexicographic (shortlex) order: shorter sequences first, then
//! lexicographic comparison.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::game::{GameRef, GameStore, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NimPosition(Vec<u32>);

impl NimPosition {
    /// Normalizes arbitrary heap sizes: zeros dropped, sorted ascending.
    pub fn new<I: IntoIterator<Item = u32>>(heaps: I) -> Self {
        let mut v: Vec<u32> = heaps.into_iter().filter(|&h| h > 0).collect();
        v.sort_unstable();
        NimPosition(v)
    }

    /// The position `(·)` with no heaps.
    pub fn zero() -> Self {
        NimPosition(Vec::new())
    }

    pub fn heaps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Normal-play nim-sum of the heaps.
    pub fn nim_sum(&self) -> u32 {
        self.0.iter().fold(0, |acc, &h| acc ^ h)
    }

    /// Every position reachable by taking at least one stone from one heap,
    /// deduplicated and listed in increasing order.
    pub fn options(&self) -> Vec<NimPosition> {
        let mut out = BTreeSet::new();
        for (i, &h) in self.0.iter().enumerate() {
            // Equal heaps give identical option sets.
            if i > 0 && self.0[i - 1] == h {
                continue;
            }
            for left in 0..h {
                let mut v = self.0.clone();
                v[i] = left;
                out.insert(NimPosition::new(v));
            }
        }
        out.into_iter().collect()
    }

    /// The position with its largest heap removed; `None` for `(·)`.
    pub fn without_largest(&self) -> Option<NimPosition> {
        let (_, rest) = self.0.split_last()?;
        Some(NimPosition(rest.to_vec()))
    }

    /// Applies the reduction steps:
    /// (i) while two or more heaps are odd, shrink the two smallest odd heaps by one;
    /// (ii) if the remaining odd heap is not the largest, shrink it by one and
    ///      grow a largest heap by one;
    /// (iii) drop empty heaps.
    pub fn reduced_form(&self) -> ReducedNimPosition {
        let mut v = self.0.clone();
        loop {
            let odd: Vec<usize> = (0..v.len()).filter(|&i| v[i] % 2 == 1).take(2).collect();
            if odd.len() < 2 {
                break;
            }
            v[odd[0]] -= 1;
            v[odd[1]] -= 1;
            v.sort_unstable();
        }
        if let Some(i) = v.iter().position(|&h| h % 2 == 1) {
            let max = *v.iter().max().expect("nonempty");
            if v[i] < max {
                let last_max = v.iter().rposition(|&h| h == max).expect("max present");
                v[i] -= 1;
                v[last_max] += 1;
            }
        }
        ReducedNimPosition(NimPosition::new(v))
    }

    /// True when at most one heap is odd and any odd heap is the unique maximum.
    pub fn is_reduced(&self) -> bool {
        let mut odd = self.0.iter().filter(|&&h| h % 2 == 1);
        match (odd.next(), odd.next()) {
            (None, _) => true,
            (Some(_), Some(_)) => false,
            (Some(&o), None) => self.0.iter().filter(|&&h| h >= o).count() == 1,
        }
    }

    /// Outcome by the misère Nim rule. Always `P` or `N`.
    pub fn closed_outcome(&self) -> Outcome {
        let next_wins = if self.0.iter().any(|&h| h >= 2) {
            self.nim_sum() != 0
        } else {
            self.0.len().is_multiple_of(2)
        };
        if next_wins {
            Outcome::N
        } else {
            Outcome::P
        }
    }

    /// Winning replies: the options that are `P` positions.
    pub fn best_moves(&self) -> Vec<NimPosition> {
        self.options()
            .into_iter()
            .filter(|q| q.closed_outcome() == Outcome::P)
            .collect()
    }

    /// Builds the sum of heaps in `store`. `(·)` maps to `0`.
    pub fn to_game(&self, store: &mut GameStore) -> GameRef {
        let heaps: Vec<GameRef> = self.0.iter().map(|&h| store.nim_heap(h)).collect();
        store.sum_all(heaps)
    }
}

impl Ord for NimPosition {
    fn cmp(&self, other: &Self) -> Ordering {
        quasi_lex_cmp(self, other)
    }
}

impl PartialOrd for NimPosition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NimPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Serialized in its text form, e.g. `"1+1+4"`.
impl Serialize for NimPosition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<ReducedNimPosition> for NimPosition {
    fn from(r: ReducedNimPosition) -> Self {
        r.0
    }
}

/// A position in reduced form: at most one odd heap, and if present it is the
/// unique largest heap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedNimPosition(NimPosition);

impl ReducedNimPosition {
    /// Wraps `p` if it already satisfies the reduced-form invariants.
    pub fn new(p: NimPosition) -> Option<Self> {
        p.is_reduced().then_some(ReducedNimPosition(p))
    }

    pub fn position(&self) -> &NimPosition {
        &self.0
    }
}

impl fmt::Display for ReducedNimPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Shortlex order on heap sequences.
pub fn quasi_lex_cmp(a: &NimPosition, b: &NimPosition) -> Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0))
}

/// `n + 1` for even `n`, `n - 1` for odd `n`.
pub fn xor1(n: u32) -> u32 {
    n ^ 1
}

/// All positions with at most `max_heaps` heaps of size at most `max_size`,
/// in strictly increasing shortlex order starting from `(·)`.
pub fn enumerate_positions(max_heaps: usize, max_size: u32) -> Vec<NimPosition> {
    fn extend(prefix: &mut Vec<u32>, len: usize, max_size: u32, out: &mut Vec<NimPosition>) {
        if prefix.len() == len {
            out.push(NimPosition(prefix.clone()));
            return;
        }
        let lo = prefix.last().copied().unwrap_or(1);
        for h in lo..=max_size {
            prefix.push(h);
            extend(prefix, len, max_size, out);
            prefix.pop();
        }
    }

    let mut out = vec![NimPosition::zero()];
    if max_size == 0 {
        return out;
    }
    for len in 1..=max_heaps {
        extend(&mut Vec::with_capacity(len), len, max_size, &mut out);
    }
    out
}
