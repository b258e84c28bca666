//! Recursive decision procedures for misère equivalence and order.
//!
//! Impartial equivalence `G ≡ H` (same outcome in every sum with an impartial
//! game) holds iff
//!
//! 1. for every `H'` some `H''` satisfies `H'' ≡ G` or some `G'` satisfies `G' ≡ H'`,
//! 2. for every `G'` some `G''` satisfies `G'' ≡ H` or some `H'` satisfies `H' ≡ G'`,
//! 3. if `G` is `0` then `H` is an `N` position, and vice versa.
//!
//! The partizan order `G ≥ H` (outcome of `G + X` at least that of `H + X` for
//! every game `X`) holds iff
//!
//! 1. for every `H^L` some `H^LR ≤ G` or some `G^L ≥ H^L`,
//! 2. for every `G^R` some `G^RL ≥ H` or some `H^R ≤ G^R`,
//! 3. if `H` has no Left options neither does `G`,
//! 4. if `G` has no Right options neither does `H`.
//!
//! Every recursive call replaces a game by an option or an option of an
//! option, so the recursion terminates and the cache only ever holds final
//! verdicts.

use std::collections::HashMap;

use crate::game::{GameError, GameRef, GameStore, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    ImpartialEquiv,
    PartizanGe,
    /// Partizan equality restricted to impartial games.
    PartizanEqImpartial,
    Linked,
    Downlinked,
}

impl Relation {
    fn is_symmetric(self) -> bool {
        matches!(
            self,
            Relation::ImpartialEquiv | Relation::PartizanEqImpartial | Relation::Linked
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquivKey {
    relation: Relation,
    pair: (GameRef, GameRef),
}

impl EquivKey {
    pub fn new(relation: Relation, g: GameRef, h: GameRef) -> Self {
        let pair = if relation.is_symmetric() && h < g {
            (h, g)
        } else {
            (g, h)
        };
        EquivKey { relation, pair }
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn pair(&self) -> (GameRef, GameRef) {
        self.pair
    }
}

/// How [`EquivCache::partizan_eq`] treats two impartial inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// Use only the impartial specialization.
    #[default]
    Fast,
    /// Run the specialization and the general two-sided order test and panic
    /// if they disagree.
    CrossCheck,
}

/// Memo of decided verdicts. Entries are never overwritten.
///
/// Refs are only meaningful for one [`GameStore`]; use a cache with a single
/// store.
#[derive(Debug, Default)]
pub struct EquivCache {
    verdicts: HashMap<EquivKey, bool>,
    mode: CheckMode,
}

impl EquivCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_mode(mode: CheckMode) -> Self {
        EquivCache {
            verdicts: HashMap::new(),
            mode,
        }
    }

    pub fn mode(&self) -> CheckMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.verdicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verdicts.is_empty()
    }

    pub fn get(&self, key: &EquivKey) -> Option<bool> {
        self.verdicts.get(key).copied()
    }

    fn record(&mut self, key: EquivKey, verdict: bool) -> bool {
        let prev = self.verdicts.insert(key, verdict);
        debug_assert!(prev.is_none() || prev == Some(verdict));
        verdict
    }

    /// `g ≡ h`: equal misère outcomes in sums with every impartial game.
    pub fn impartial_equiv(
        &mut self,
        store: &mut GameStore,
        g: GameRef,
        h: GameRef,
    ) -> Result<bool, GameError> {
        require_impartial(store, g)?;
        require_impartial(store, h)?;
        Ok(self.equiv(store, g, h))
    }

    fn equiv(&mut self, store: &mut GameStore, g: GameRef, h: GameRef) -> bool {
        if g == h {
            return true;
        }
        let key = EquivKey::new(Relation::ImpartialEquiv, g, h);
        if let Some(v) = self.get(&key) {
            return v;
        }

        let zero = store.zero();
        let verdict = (g != zero || store.misere_outcome(h) == Outcome::N)
            && (h != zero || store.misere_outcome(g) == Outcome::N)
            && self.equiv_side(store, g, h)
            && self.equiv_side(store, h, g);
        self.record(key, verdict)
    }

    /// For every option `h'` of `h`: some `h''` with `h'' ≡ g`, or some `g'`
    /// with `g' ≡ h'`.
    fn equiv_side(&mut self, store: &mut GameStore, g: GameRef, h: GameRef) -> bool {
        let h_opts = store.options(h).to_vec();
        let g_opts = store.options(g).to_vec();
        'outer: for hp in h_opts {
            let hpp: Vec<GameRef> = store.options(hp).to_vec();
            for x in hpp {
                if self.equiv(store, x, g) {
                    continue 'outer;
                }
            }
            for &gp in &g_opts {
                if self.equiv(store, gp, hp) {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Impartial `g` and `h` are linked iff no option of either is
    /// impartially equivalent to the other game.
    pub fn linked(
        &mut self,
        store: &mut GameStore,
        g: GameRef,
        h: GameRef,
    ) -> Result<bool, GameError> {
        require_impartial(store, g)?;
        require_impartial(store, h)?;
        let key = EquivKey::new(Relation::Linked, g, h);
        if let Some(v) = self.get(&key) {
            return Ok(v);
        }
        let g_opts = store.options(g).to_vec();
        let h_opts = store.options(h).to_vec();
        let mut verdict = true;
        for gp in g_opts {
            if self.equiv(store, gp, h) {
                verdict = false;
                break;
            }
        }
        if verdict {
            for hp in h_opts {
                if self.equiv(store, hp, g) {
                    verdict = false;
                    break;
                }
            }
        }
        Ok(self.record(key, verdict))
    }

    /// `g ≥ h` in the partizan misère order.
    pub fn partizan_ge(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        if g == h {
            return true;
        }
        let key = EquivKey::new(Relation::PartizanGe, g, h);
        if let Some(v) = self.get(&key) {
            return v;
        }
        let verdict = self.ge_uncached(store, g, h);
        self.record(key, verdict)
    }

    fn ge_uncached(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        let (gl, gr) = (store.left_options(g), store.right_options(g));
        let (hl, hr) = (store.left_options(h), store.right_options(h));

        if hl.is_empty() && !gl.is_empty() {
            return false;
        }
        if gr.is_empty() && !hr.is_empty() {
            return false;
        }

        // Every H^L: some H^LR <= G, or some G^L >= H^L.
        'left: for &x in hl {
            for &xr in store.right_options(x) {
                if self.partizan_ge(store, g, xr) {
                    continue 'left;
                }
            }
            for &y in gl {
                if self.partizan_ge(store, y, x) {
                    continue 'left;
                }
            }
            return false;
        }

        // Every G^R: some G^RL >= H, or some H^R <= G^R.
        'right: for &x in gr {
            for &xl in store.left_options(x) {
                if self.partizan_ge(store, xl, h) {
                    continue 'right;
                }
            }
            for &y in hr {
                if self.partizan_ge(store, x, y) {
                    continue 'right;
                }
            }
            return false;
        }

        true
    }

    /// `g` is downlinked to `h` iff no `g^L ≥ h` and no `h^R ≤ g`.
    pub fn downlinked(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        let key = EquivKey::new(Relation::Downlinked, g, h);
        if let Some(v) = self.get(&key) {
            return v;
        }
        let verdict = !store
            .left_options(g)
            .iter()
            .any(|&x| self.partizan_ge(store, x, h))
            && !store
                .right_options(h)
                .iter()
                .any(|&y| self.partizan_ge(store, g, y));
        self.record(key, verdict)
    }

    /// `g = h`: equal misère outcomes in sums with every game.
    ///
    /// Impartial pairs go through [`Self::partizan_eq_impartial`]; in
    /// [`CheckMode::CrossCheck`] the general test runs as well.
    pub fn partizan_eq(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        if store.is_impartial(g) && store.is_impartial(h) {
            let fast = self.eq_impartial(store, g, h);
            if self.mode == CheckMode::CrossCheck {
                let general = self.partizan_eq_general(store, g, h);
                assert_eq!(
                    fast, general,
                    "impartial specialization disagrees with the general order test on {g}, {h}"
                );
            }
            fast
        } else {
            self.partizan_eq_general(store, g, h)
        }
    }

    /// `g ≥ h` and `h ≥ g` via the general order test.
    pub fn partizan_eq_general(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        self.partizan_ge(store, g, h) && self.partizan_ge(store, h, g)
    }

    /// Partizan equality of impartial games via the three-condition test:
    /// options matched as for `≡` but with `=`, and `g` is `0` iff `h` is `0`.
    pub fn partizan_eq_impartial(
        &mut self,
        store: &GameStore,
        g: GameRef,
        h: GameRef,
    ) -> Result<bool, GameError> {
        require_impartial(store, g)?;
        require_impartial(store, h)?;
        Ok(self.eq_impartial(store, g, h))
    }

    fn eq_impartial(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        if g == h {
            return true;
        }
        let key = EquivKey::new(Relation::PartizanEqImpartial, g, h);
        if let Some(v) = self.get(&key) {
            return v;
        }
        let verdict = store.is_zero(g) == store.is_zero(h)
            && self.eq_side(store, g, h)
            && self.eq_side(store, h, g);
        self.record(key, verdict)
    }

    fn eq_side(&mut self, store: &GameStore, g: GameRef, h: GameRef) -> bool {
        'outer: for &hp in store.options(h) {
            for &x in store.options(hp) {
                if self.eq_impartial(store, x, g) {
                    continue 'outer;
                }
            }
            for &gp in store.options(g) {
                if self.eq_impartial(store, gp, hp) {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

fn require_impartial(store: &GameStore, g: GameRef) -> Result<(), GameError> {
    if store.is_impartial(g) {
        Ok(())
    } else {
        Err(GameError::NotImpartial(g))
    }
}
