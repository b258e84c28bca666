//! Brute-force cross-checks and the classification harness.
//!
//! Equivalence is defined by a quantifier over all (impartial) games. The
//! oracle truncates that quantifier to a finite [`ContextSet`] and searches it
//! for distinguishing contexts. A found context refutes equivalence; finding
//! none proves nothing.
//!
//! Classification and the `verify_*` suites use the recursive tests from
//! [`crate::equivalence`] and compare them against Nim-side predictions.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::equivalence::{CheckMode, EquivCache};
use crate::game::{GameError, GameRef, GameStore, Outcome};
use crate::nim::{enumerate_positions, xor1, NimPosition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("birthday {requested} exceeds the configured limit {limit}")]
    BirthdayLimit { requested: u32, limit: u32 },
    #[error("{what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: usize,
        budget: usize,
    },
    #[error("{0} contexts cannot probe this relation")]
    KindMismatch(ContextKind),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextKind {
    Impartial,
    Partizan,
}

impl std::fmt::Display for ContextKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ContextKind::Impartial => "impartial",
            ContextKind::Partizan => "partizan",
        })
    }
}

/// A finite stand-in for "all games" or "all impartial games".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSet {
    kind: ContextKind,
    max_birthday: u32,
    games: Vec<GameRef>,
}

impl ContextSet {
    pub fn kind(&self) -> ContextKind {
        self.kind
    }

    pub fn max_birthday(&self) -> u32 {
        self.max_birthday
    }

    pub fn games(&self) -> &[GameRef] {
        &self.games
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    /// Appends the games not already present, keeping generation order.
    pub fn extend<I: IntoIterator<Item = GameRef>>(&mut self, store: &GameStore, games: I) {
        let mut seen: HashSet<GameRef> = self.games.iter().copied().collect();
        for g in games {
            if self.kind == ContextKind::Impartial && !store.is_impartial(g) {
                continue;
            }
            if seen.insert(g) {
                self.max_birthday = self.max_birthday.max(store.birthday(g));
                self.games.push(g);
            }
        }
    }
}

/// Caps that keep every run deterministic and bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest birthday accepted by [`Oracle::enumerate_impartial`].
    pub impartial_birthday_limit: u32,
    /// Largest birthday accepted by [`Oracle::enumerate_partizan`].
    pub partizan_birthday_limit: u32,
    /// Largest number of position pairs a classify or verify run may compare.
    pub max_pairs: usize,
    /// Largest context set built by [`Oracle::context_universe`].
    pub max_contexts: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            impartial_birthday_limit: 4,
            partizan_birthday_limit: 2,
            max_pairs: 100_000,
            max_contexts: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_heaps: usize,
    pub max_size: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivClass {
    pub representative: NimPosition,
    pub members: Vec<NimPosition>,
}

/// Partition of an enumerated range of positions into equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub context: ContextKind,
    pub bounds: Bounds,
    pub classes: Vec<EquivClass>,
}

impl ClassReport {
    pub fn class_of(&self, p: &NimPosition) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(p))
    }
}

/// Result of a verification suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl VerifyReport {
    fn new(suite: &'static str) -> Self {
        VerifyReport {
            suite,
            checked: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(describe());
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One pair examined by [`Oracle::cross_check_refutations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWitness {
    pub first: NimPosition,
    pub second: NimPosition,
    /// First distinguishing context, rendered in game notation.
    pub witness: Option<String>,
}

/// Agreement between the recursive impartial test and context search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefutationReport {
    pub contexts: usize,
    pub equivalent_pairs: usize,
    /// Pairs judged inequivalent, with the witness found (if any).
    pub inequivalent: Vec<PairWitness>,
    /// Pairs judged equivalent that a context nevertheless separates.
    pub contradictions: Vec<PairWitness>,
}

impl RefutationReport {
    /// Inequivalent pairs no context in the set separates.
    pub fn gaps(&self) -> impl Iterator<Item = &PairWitness> {
        self.inequivalent.iter().filter(|p| p.witness.is_none())
    }
}

/// Game store, verdict cache and enumeration caches bundled together.
#[derive(Debug)]
pub struct Oracle {
    pub store: GameStore,
    pub cache: EquivCache,
    config: OracleConfig,
    impartial_days: Vec<Vec<GameRef>>,
    partizan_days: Vec<Vec<GameRef>>,
    /// Nim positions built through [`Oracle::game`], for readable output.
    labels: HashMap<GameRef, NimPosition>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new(OracleConfig::default())
    }
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        Self::with_mode(config, CheckMode::Fast)
    }

    pub fn with_mode(config: OracleConfig, mode: CheckMode) -> Self {
        let store = GameStore::new();
        let zero = store.zero();
        Oracle {
            store,
            cache: EquivCache::with_mode(mode),
            config,
            impartial_days: vec![vec![zero]],
            partizan_days: vec![vec![zero]],
            labels: HashMap::new(),
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn game(&mut self, p: &NimPosition) -> GameRef {
        let g = p.to_game(&mut self.store);
        if p.len() > 1 {
            self.labels.entry(g).or_insert_with(|| p.clone());
        }
        g
    }

    /// Game notation for `g`, writing Nim sums built by [`Oracle::game`] as
    /// `a+b+...`.
    pub fn describe(&self, g: GameRef) -> String {
        self.store
            .display_with(g, |x| self.labels.get(&x).map(|p| p.to_string()))
    }

    /// All canonical impartial games of birthday at most `max_birthday`, each
    /// day built from option subsets of the games before it.
    pub fn enumerate_impartial(&mut self, max_birthday: u32) -> Result<ContextSet, OracleError> {
        let limit = self.config.impartial_birthday_limit;
        if max_birthday > limit {
            return Err(OracleError::BirthdayLimit {
                requested: max_birthday,
                limit,
            });
        }
        while self.impartial_days.len() <= max_birthday as usize {
            let prev = self.impartial_days.last().expect("day 0").clone();
            let next = extend_day(&prev, |subset| {
                self.store.make_game(subset.iter().copied(), subset.iter().copied())
            });
            self.impartial_days.push(next);
        }
        Ok(ContextSet {
            kind: ContextKind::Impartial,
            max_birthday,
            games: self.impartial_days[max_birthday as usize].clone(),
        })
    }

    /// All canonical partizan games of birthday at most `max_birthday`.
    pub fn enumerate_partizan(&mut self, max_birthday: u32) -> Result<ContextSet, OracleError> {
        let limit = self.config.partizan_birthday_limit;
        if max_birthday > limit {
            return Err(OracleError::BirthdayLimit {
                requested: max_birthday,
                limit,
            });
        }
        while self.partizan_days.len() <= max_birthday as usize {
            let prev = self.partizan_days.last().expect("day 0").clone();
            let subsets = subsets_of(&prev);
            let mut seen: HashSet<GameRef> = prev.iter().copied().collect();
            let mut next = prev.clone();
            for left in &subsets {
                for right in &subsets {
                    let g = self
                        .store
                        .make_game(left.iter().copied(), right.iter().copied());
                    if seen.insert(g) {
                        next.push(g);
                    }
                }
            }
            self.partizan_days.push(next);
        }
        Ok(ContextSet {
            kind: ContextKind::Partizan,
            max_birthday,
            games: self.partizan_days[max_birthday as usize].clone(),
        })
    }

    /// Context universe used by the harness.
    ///
    /// Impartial: games of birthday `<= birthday` followed by every Nim
    /// position within `bounds`. Partizan: that set, then all partizan games of
    /// birthday `<= 2`, then the day-one partizan games `{0|}`, `{|0}`, `{0|0}`
    /// added to each impartial context.
    pub fn context_universe(
        &mut self,
        kind: ContextKind,
        birthday: u32,
        bounds: Bounds,
    ) -> Result<ContextSet, OracleError> {
        let mut set = self.enumerate_impartial(birthday)?;
        let nim: Vec<GameRef> = enumerate_positions(bounds.max_heaps, bounds.max_size)
            .iter()
            .map(|p| self.game(p))
            .collect();
        set.extend(&self.store, nim);

        if kind == ContextKind::Partizan {
            set.kind = ContextKind::Partizan;
            let partizan = self.enumerate_partizan(self.config.partizan_birthday_limit)?;
            set.extend(&self.store, partizan.games);
            let zero = self.store.zero();
            let atoms = [
                self.store.make_game([zero], []),
                self.store.make_game([], [zero]),
                self.store.make_game([zero], [zero]),
            ];
            let impartial: Vec<GameRef> = set
                .games
                .iter()
                .copied()
                .filter(|&g| self.store.is_impartial(g))
                .collect();
            let mut sums = Vec::with_capacity(atoms.len() * impartial.len());
            for &a in &atoms {
                for &x in &impartial {
                    sums.push(self.store.sum(a, x));
                }
            }
            set.extend(&self.store, sums);
        }

        if set.len() > self.config.max_contexts {
            return Err(OracleError::Budget {
                what: "context universe",
                needed: set.len(),
                budget: self.config.max_contexts,
            });
        }
        Ok(set)
    }

    /// Outcomes of `g + x` for each context `x`, in context order.
    pub fn outcome_signature(&mut self, g: GameRef, contexts: &ContextSet) -> Vec<Outcome> {
        contexts
            .games
            .iter()
            .map(|&x| {
                let s = self.store.sum(g, x);
                self.store.misere_outcome(s)
            })
            .collect()
    }

    /// First context `x` (in generation order) with
    /// `o(g + x) != o(h + x)`. Impartial context sets probe `≡` and require
    /// impartial `g` and `h`; partizan ones probe `=`.
    pub fn refute_equiv(
        &mut self,
        g: GameRef,
        h: GameRef,
        contexts: &ContextSet,
    ) -> Result<Option<GameRef>, OracleError> {
        if contexts.kind == ContextKind::Impartial
            && !(self.store.is_impartial(g) && self.store.is_impartial(h))
        {
            return Err(OracleError::KindMismatch(contexts.kind));
        }
        for &x in &contexts.games {
            let gx = self.store.sum(g, x);
            let hx = self.store.sum(h, x);
            if self.store.misere_outcome(gx) != self.store.misere_outcome(hx) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }

    /// Some context `t` with `o(g + t) = o(h + t) = P`.
    pub fn confirm_linked(
        &mut self,
        g: GameRef,
        h: GameRef,
        contexts: &ContextSet,
    ) -> Result<Option<GameRef>, OracleError> {
        if contexts.kind != ContextKind::Impartial {
            return Err(OracleError::KindMismatch(contexts.kind));
        }
        for x in [g, h] {
            if !self.store.is_impartial(x) {
                return Err(GameError::NotImpartial(x).into());
            }
        }
        for &t in &contexts.games {
            let gt = self.store.sum(g, t);
            let ht = self.store.sum(h, t);
            if self.store.misere_outcome(gt) == Outcome::P
                && self.store.misere_outcome(ht) == Outcome::P
            {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// Recursive-test verdict for two Nim positions.
    pub fn equivalent(
        &mut self,
        p: &NimPosition,
        q: &NimPosition,
        kind: ContextKind,
    ) -> bool {
        let g = self.game(p);
        let h = self.game(q);
        match kind {
            ContextKind::Impartial => self
                .cache
                .impartial_equiv(&mut self.store, g, h)
                .expect("Nim positions are impartial"),
            ContextKind::Partizan => self.cache.partizan_eq(&self.store, g, h),
        }
    }

    fn positions_within_budget(&self, bounds: Bounds) -> Result<Vec<NimPosition>, OracleError> {
        let positions = enumerate_positions(bounds.max_heaps, bounds.max_size);
        let n = positions.len();
        let pairs = n * n.saturating_sub(1) / 2;
        if pairs > self.config.max_pairs {
            return Err(OracleError::Budget {
                what: "pairwise comparison",
                needed: pairs,
                budget: self.config.max_pairs,
            });
        }
        Ok(positions)
    }

    /// Partitions the positions within the bounds by the recursive test for
    /// `kind`. Classes and members appear in shortlex order.
    pub fn classify(
        &mut self,
        max_heaps: usize,
        max_size: u32,
        kind: ContextKind,
    ) -> Result<ClassReport, OracleError> {
        let bounds = Bounds {
            max_heaps,
            max_size,
        };
        let positions = self.positions_within_budget(bounds)?;
        let mut classes: Vec<EquivClass> = Vec::new();
        for p in positions {
            let mut home = None;
            for (i, class) in classes.iter().enumerate() {
                let rep = class.representative.clone();
                if self.equivalent(&rep, &p, kind) {
                    home = Some(i);
                    break;
                }
            }
            match home {
                Some(i) => classes[i].members.push(p),
                None => classes.push(EquivClass {
                    representative: p.clone(),
                    members: vec![p],
                }),
            }
        }
        Ok(ClassReport {
            context: kind,
            bounds,
            classes,
        })
    }

    /// Impartial equivalence coincides with equality of reduced forms on every
    /// pair in range, and every position is equivalent to its reduced form.
    pub fn verify_reduced_fibers(
        &mut self,
        max_heaps: usize,
        max_size: u32,
    ) -> Result<VerifyReport, OracleError> {
        let positions = self.positions_within_budget(Bounds {
            max_heaps,
            max_size,
        })?;
        let reduced: Vec<NimPosition> = positions
            .iter()
            .map(|p| p.reduced_form().into())
            .collect();
        let mut report = VerifyReport::new("reduced-fibers");

        for (p, r) in positions.iter().zip(&reduced) {
            let ok = self.equivalent(p, r, ContextKind::Impartial);
            report.check(ok, || format!("{p} is not equivalent to its reduced form {r}"));
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let (p, q) = (&positions[i], &positions[j]);
                let equiv = self.equivalent(p, q, ContextKind::Impartial);
                let same = reduced[i] == reduced[j];
                report.check(equiv == same, || {
                    format!(
                        "{p} vs {q}: equivalent={equiv}, reduced forms {} and {}",
                        reduced[i], reduced[j]
                    )
                });
            }
        }
        Ok(report)
    }

    /// Partizan equality holds only between identical positions.
    pub fn verify_partizan_singletons(
        &mut self,
        max_heaps: usize,
        max_size: u32,
    ) -> Result<VerifyReport, OracleError> {
        let positions = self.positions_within_budget(Bounds {
            max_heaps,
            max_size,
        })?;
        let mut report = VerifyReport::new("partizan-singletons");
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let (p, q) = (&positions[i], &positions[j]);
                let eq = self.equivalent(p, q, ContextKind::Partizan);
                report.check(!eq, || format!("{p} = {q} in the partizan context"));
            }
        }
        Ok(report)
    }

    /// The general two-sided order test and the impartial three-condition test
    /// return the same verdict on every pair in range (diagonal included).
    pub fn verify_specialization(
        &mut self,
        max_heaps: usize,
        max_size: u32,
    ) -> Result<VerifyReport, OracleError> {
        let positions = self.positions_within_budget(Bounds {
            max_heaps,
            max_size,
        })?;
        let games: Vec<GameRef> = positions.iter().map(|p| self.game(p)).collect();
        let mut report = VerifyReport::new("specialization");
        for i in 0..games.len() {
            for j in i..games.len() {
                let (g, h) = (games[i], games[j]);
                let general = self.cache.partizan_eq_general(&self.store, g, h);
                let special = self.cache.partizan_eq_impartial(&self.store, g, h)?;
                report.check(general == special, || {
                    format!(
                        "{} vs {}: general={general}, specialized={special}",
                        positions[i], positions[j]
                    )
                });
            }
        }
        Ok(report)
    }

    /// `n + 1 ≡ n ⊕ 1` for every `n <= max_n`.
    pub fn verify_adding_one(&mut self, max_n: u32) -> Result<VerifyReport, OracleError> {
        let mut report = VerifyReport::new("adding1");
        let one = self.store.nim_heap(1);
        for n in 0..=max_n {
            let heap = self.store.nim_heap(n);
            let lhs = self.store.sum(heap, one);
            let rhs = self.store.nim_heap(xor1(n));
            let ok = self.cache.impartial_equiv(&mut self.store, lhs, rhs)?;
            report.check(ok, || format!("{n}+1 is not equivalent to {}", xor1(n)));
        }
        Ok(report)
    }

    /// The shortlex-order lemmas on options and reduced forms, plus
    /// idempotence of reduction.
    pub fn verify_order_lemmas(
        &self,
        max_heaps: usize,
        max_size: u32,
    ) -> Result<VerifyReport, OracleError> {
        let positions = enumerate_positions(max_heaps, max_size);
        let mut report = VerifyReport::new("lemmas");
        for p in &positions {
            let options = p.options();
            let reduced: NimPosition = p.reduced_form().into();

            for q in &options {
                report.check(q < p, || format!("option {q} does not precede {p}"));
                let rq: NimPosition = q.reduced_form().into();
                report.check(rq < *p, || {
                    format!("reduced option {rq} (from {q}) does not precede {p}")
                });
            }
            if let Some(rest) = p.without_largest() {
                let least = options.iter().min();
                report.check(least == Some(&rest), || {
                    format!("least option of {p} is {least:?}, expected {rest}")
                });
            }
            report.check(reduced <= *p, || format!("reduced form {reduced} follows {p}"));
            report.check(reduced.reduced_form().position() == &reduced, || {
                format!("reduction of {p} is not idempotent")
            });
            report.check(reduced.is_reduced(), || format!("{reduced} is not reduced"));

            if p.is_reduced() {
                if let Some(rest) = p.without_largest() {
                    let least = options
                        .iter()
                        .map(|q| NimPosition::from(q.reduced_form()))
                        .min();
                    report.check(least.as_ref() == Some(&rest), || {
                        format!("least reduced option of {p} is {least:?}, expected {rest}")
                    });
                }
            }
        }
        Ok(report)
    }

    /// Compares the recursive impartial test with context search over every
    /// pair in range. Equivalent pairs must never be separated; for
    /// inequivalent pairs the first separating context is recorded.
    pub fn cross_check_refutations(
        &mut self,
        max_heaps: usize,
        max_size: u32,
        birthday: u32,
    ) -> Result<RefutationReport, OracleError> {
        let bounds = Bounds {
            max_heaps,
            max_size,
        };
        let positions = self.positions_within_budget(bounds)?;
        let contexts = self.context_universe(ContextKind::Impartial, birthday, bounds)?;
        let games: Vec<GameRef> = positions.iter().map(|p| self.game(p)).collect();
        let signatures: Vec<Vec<Outcome>> = games
            .iter()
            .map(|&g| self.outcome_signature(g, &contexts))
            .collect();

        let mut report = RefutationReport {
            contexts: contexts.len(),
            ..Default::default()
        };
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let equiv = self.equivalent(&positions[i], &positions[j], ContextKind::Impartial);
                let witness = signatures[i]
                    .iter()
                    .zip(&signatures[j])
                    .position(|(a, b)| a != b)
                    .map(|k| self.describe(contexts.games[k]));
                let pair = PairWitness {
                    first: positions[i].clone(),
                    second: positions[j].clone(),
                    witness,
                };
                if equiv {
                    report.equivalent_pairs += 1;
                    if pair.witness.is_some() {
                        report.contradictions.push(pair);
                    }
                } else {
                    report.inequivalent.push(pair);
                }
            }
        }
        Ok(report)
    }
}

impl Oracle {
    /// Searches `contexts` for witnesses to the pairs `report` left without
    /// one. Returns how many gaps were closed.
    pub fn close_gaps(
        &mut self,
        report: &mut RefutationReport,
        contexts: &ContextSet,
    ) -> Result<usize, OracleError> {
        let mut closed = 0;
        for i in 0..report.inequivalent.len() {
            if report.inequivalent[i].witness.is_some() {
                continue;
            }
            let g = self.game(&report.inequivalent[i].first.clone());
            let h = self.game(&report.inequivalent[i].second.clone());
            if let Some(x) = self.refute_equiv(g, h, contexts)? {
                report.inequivalent[i].witness = Some(self.describe(x));
                closed += 1;
            }
        }
        report.contexts = report.contexts.max(contexts.len());
        Ok(closed)
    }
}

/// The games of the next day: every option subset of `prev`, in bitmask order,
/// appended to `prev` when new.
fn extend_day(prev: &[GameRef], mut make: impl FnMut(&[GameRef]) -> GameRef) -> Vec<GameRef> {
    let mut seen: HashSet<GameRef> = prev.iter().copied().collect();
    let mut next = prev.to_vec();
    for subset in subsets_of(prev) {
        let g = make(&subset);
        if seen.insert(g) {
            next.push(g);
        }
    }
    next
}

fn subsets_of(items: &[GameRef]) -> Vec<Vec<GameRef>> {
    assert!(items.len() < usize::BITS as usize);
    (0usize..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &g)| g)
                .collect()
        })
        .collect()
}
