use misere::oracle::{Bounds, ContextKind, Oracle};
use misere::{enumerate_positions, CheckMode, GameRef, GameStore, NimPosition, Outcome};
use proptest::prelude::*;

/// Game tree with raw option lists (duplicates allowed), evaluated without the
/// store.
#[derive(Debug, Clone)]
struct Tree {
    left: Vec<Tree>,
    right: Vec<Tree>,
}

impl Tree {
    fn wins(&self, left_to_move: bool) -> bool {
        let opts = if left_to_move { &self.left } else { &self.right };
        opts.is_empty() || opts.iter().any(|t| !t.wins(!left_to_move))
    }

    fn outcome(&self) -> Outcome {
        match (self.wins(true), self.wins(false)) {
            (true, true) => Outcome::N,
            (false, false) => Outcome::P,
            (true, false) => Outcome::L,
            (false, true) => Outcome::R,
        }
    }

    fn build(&self, store: &mut GameStore, reverse: bool) -> GameRef {
        let mut left: Vec<GameRef> = self.left.iter().map(|t| t.build(store, reverse)).collect();
        let mut right: Vec<GameRef> = self.right.iter().map(|t| t.build(store, reverse)).collect();
        if reverse {
            left.reverse();
            right.reverse();
        }
        store.make_game(left, right)
    }

    fn with_duplicates(&self) -> Tree {
        let dup = |v: &[Tree]| {
            let mut out: Vec<Tree> = v.iter().map(Tree::with_duplicates).collect();
            if let Some(first) = out.first().cloned() {
                out.push(first);
            }
            out
        };
        Tree {
            left: dup(&self.left),
            right: dup(&self.right),
        }
    }
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = Just(Tree {
        left: vec![],
        right: vec![],
    });
    leaf.prop_recursive(4, 24, 3, |inner| {
        (
            proptest::collection::vec(inner.clone(), 0..3),
            proptest::collection::vec(inner, 0..3),
        )
            .prop_map(|(left, right)| Tree { left, right })
    })
}

proptest! {
    #[test]
    fn interning_is_order_and_duplicate_insensitive(t in tree()) {
        let mut store = GameStore::new();
        let a = t.build(&mut store, false);
        let b = t.build(&mut store, true);
        let c = t.with_duplicates().build(&mut store, false);
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, c);
        prop_assert_eq!(store.misere_outcome(a), t.outcome());
        prop_assert_eq!(t.with_duplicates().outcome(), t.outcome());
    }

    #[test]
    fn sums_commute(s in tree(), t in tree()) {
        let mut store = GameStore::new();
        let g = s.build(&mut store, false);
        let h = t.build(&mut store, false);
        let gh = store.sum(g, h);
        let hg = store.sum(h, g);
        prop_assert_eq!(gh, hg);
        prop_assert_eq!(store.misere_outcome(gh), store.misere_outcome(hg));
        prop_assert_eq!(
            store.is_impartial(gh),
            store.is_impartial(g) && store.is_impartial(h)
        );
    }

    #[test]
    fn nim_order_lemmas(heaps in proptest::collection::vec(0u32..12, 0..7)) {
        let p = NimPosition::new(heaps);
        let options = p.options();
        let reduced: NimPosition = p.reduced_form().into();
        for q in &options {
            prop_assert!(q < &p);
            prop_assert!(NimPosition::from(q.reduced_form()) < p);
        }
        if let Some(rest) = p.without_largest() {
            prop_assert_eq!(options.iter().min(), Some(&rest));
        }
        prop_assert!(reduced <= p);
        prop_assert!(reduced.is_reduced());
        prop_assert_eq!(NimPosition::from(reduced.reduced_form()), reduced.clone());
        if p.is_reduced() {
            if let Some(rest) = p.without_largest() {
                let least = options.iter().map(|q| NimPosition::from(q.reduced_form())).min();
                prop_assert_eq!(least, Some(rest));
            }
        }
    }

    #[test]
    fn best_moves_are_exactly_the_p_options(heaps in proptest::collection::vec(0u32..9, 0..5)) {
        let p = NimPosition::new(heaps);
        let moves = p.best_moves();
        prop_assert_eq!(moves.is_empty(), p.is_zero() || p.closed_outcome() == Outcome::P);
        let mut store = GameStore::new();
        for q in &moves {
            let g = q.to_game(&mut store);
            prop_assert_eq!(store.misere_outcome(g), Outcome::P);
        }
    }
}

#[test]
fn impartial_games_have_symmetric_outcomes() {
    let mut oracle = Oracle::default();
    let games = oracle.enumerate_impartial(4).unwrap();
    assert_eq!(games.len(), 65536);
    for &g in games.games() {
        let o = oracle.store.misere_outcome(g);
        assert!(matches!(o, Outcome::P | Outcome::N), "{o}");
    }
}

#[test]
fn grundy_is_xor_of_heaps() {
    let mut store = GameStore::new();
    for p in enumerate_positions(5, 8) {
        let g = p.to_game(&mut store);
        assert_eq!(store.normal_grundy(g), Ok(p.nim_sum()), "{p}");
    }
}

#[test]
fn reduced_form_adds_one() {
    for n in 1..=20 {
        let p = NimPosition::new([n, 1]);
        assert_eq!(
            p.reduced_form().position(),
            &NimPosition::new([misere::xor1(n)])
        );
    }
}

/// Impartial games of birthday <= 3 plus the Nim positions up to 2 heaps of 3.
fn impartial_sample(oracle: &mut Oracle) -> Vec<GameRef> {
    let bounds = Bounds {
        max_heaps: 2,
        max_size: 3,
    };
    oracle
        .context_universe(ContextKind::Impartial, 3, bounds)
        .unwrap()
        .games()
        .to_vec()
}

#[test]
fn impartial_equivalence_is_an_equivalence_relation() {
    let mut oracle = Oracle::default();
    let games = impartial_sample(&mut oracle);
    let n = games.len();
    let mut eq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            eq[i][j] = oracle
                .cache
                .impartial_equiv(&mut oracle.store, games[i], games[j])
                .unwrap();
        }
    }
    for i in 0..n {
        assert!(eq[i][i]);
        for j in 0..n {
            assert_eq!(eq[i][j], eq[j][i]);
            for k in 0..n {
                if eq[i][j] && eq[j][k] {
                    assert!(eq[i][k]);
                }
            }
        }
    }
}

#[test]
fn partizan_order_is_a_preorder() {
    let mut oracle = Oracle::default();
    let mut games = oracle.enumerate_partizan(1).unwrap().games().to_vec();
    games.extend(impartial_sample(&mut oracle));
    let day_two = oracle.enumerate_partizan(2).unwrap();
    games.extend(day_two.games().iter().take(64));
    games.sort();
    games.dedup();
    let n = games.len();
    let mut ge = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            ge[i][j] = oracle.cache.partizan_ge(&oracle.store, games[i], games[j]);
        }
    }
    for i in 0..n {
        assert!(ge[i][i]);
        for j in 0..n {
            let eq = oracle.cache.partizan_eq(&oracle.store, games[i], games[j]);
            assert_eq!(eq, ge[i][j] && ge[j][i]);
            for k in 0..n {
                if ge[i][j] && ge[j][k] {
                    assert!(ge[i][k]);
                }
            }
        }
    }
}

#[test]
fn specialization_agrees_on_generic_impartial_games() {
    let mut oracle = Oracle::with_mode(Default::default(), CheckMode::CrossCheck);
    let games = impartial_sample(&mut oracle);
    for &g in &games {
        for &h in &games {
            // Panics on disagreement in cross-check mode.
            oracle.cache.partizan_eq(&oracle.store, g, h);
        }
    }
}

#[test]
fn recursive_verdicts_survive_context_search() {
    let mut oracle = Oracle::default();
    let games = impartial_sample(&mut oracle);
    let impartial = oracle.enumerate_impartial(3).unwrap();
    let partizan = oracle
        .context_universe(ContextKind::Partizan, 2, Bounds { max_heaps: 2, max_size: 2 })
        .unwrap();
    let zero = oracle.store.zero();
    for &g in &games {
        for &h in &games {
            let equiv = oracle.cache.impartial_equiv(&mut oracle.store, g, h).unwrap();
            let linked = oracle.cache.linked(&mut oracle.store, g, h).unwrap();
            if equiv {
                // Equivalent games are linked to no option of each other.
                for (x, y) in [(g, h), (h, g)] {
                    for yp in oracle.store.options(y).to_vec() {
                        assert!(!oracle.cache.linked(&mut oracle.store, x, yp).unwrap());
                    }
                }
                assert_eq!(oracle.refute_equiv(g, h, &impartial), Ok(None));
            }
            // A common P context proves linkage.
            if oracle.confirm_linked(g, h, &impartial).unwrap().is_some() {
                assert!(linked);
            }
            if oracle.cache.partizan_eq(&oracle.store, g, h) {
                assert_eq!(oracle.refute_equiv(g, h, &partizan), Ok(None));
            }
        }
        if oracle.cache.impartial_equiv(&mut oracle.store, zero, g).unwrap() {
            assert_eq!(oracle.store.misere_outcome(g), Outcome::N);
        }
        if oracle.cache.partizan_eq(&oracle.store, zero, g) {
            assert_eq!(g, zero);
        }
    }
}

#[test]
fn partizan_order_survives_context_search() {
    let mut oracle = Oracle::default();
    let games = oracle.enumerate_partizan(2).unwrap().games()[..48].to_vec();
    let contexts = oracle.enumerate_partizan(2).unwrap();
    for &g in &games {
        for &h in &games {
            if !oracle.cache.partizan_ge(&oracle.store, g, h) {
                continue;
            }
            for &x in contexts.games() {
                let gx = oracle.store.sum(g, x);
                let hx = oracle.store.sum(h, x);
                let (og, oh) = (oracle.store.misere_outcome(gx), oracle.store.misere_outcome(hx));
                assert!(
                    og.ge(oh),
                    "{} >= {} refuted by {}",
                    oracle.store.display(g),
                    oracle.store.display(h),
                    oracle.store.display(x)
                );
            }
        }
    }
}

#[test]
fn larger_context_sets_keep_refutations() {
    let mut oracle = Oracle::default();
    let small = oracle.enumerate_impartial(2).unwrap();
    let large = oracle
        .context_universe(ContextKind::Impartial, 3, Bounds { max_heaps: 2, max_size: 3 })
        .unwrap();
    let positions = enumerate_positions(2, 3);
    let games: Vec<GameRef> = positions.iter().map(|p| oracle.game(p)).collect();
    for &g in &games {
        for &h in &games {
            if oracle.refute_equiv(g, h, &small).unwrap().is_some() {
                assert!(oracle.refute_equiv(g, h, &large).unwrap().is_some());
            }
        }
    }
}

#[test]
fn two_twos_are_refuted_by_zero() {
    let mut oracle = Oracle::default();
    let contexts = oracle.enumerate_impartial(4).unwrap();
    let g = oracle.game(&NimPosition::new([2, 2]));
    let zero = oracle.store.zero();
    assert_eq!(oracle.refute_equiv(g, zero, &contexts), Ok(Some(zero)));
}

#[test]
fn linked_pairs_from_the_examples() {
    let mut oracle = Oracle::default();
    let zero = oracle.store.zero();
    let one = oracle.store.nim_heap(1);
    let two = oracle.store.nim_heap(2);
    let contexts = oracle.enumerate_impartial(3).unwrap();
    // 0 is an option of 2 and 0 ≡ 0, so 2 and 0 are not linked.
    assert_eq!(oracle.cache.linked(&mut oracle.store, two, zero), Ok(false));
    assert_eq!(oracle.confirm_linked(two, zero, &contexts), Ok(None));
    assert_eq!(oracle.confirm_linked(one, zero, &contexts), Ok(None));
    // 1 is an option of 2.
    assert_eq!(oracle.cache.linked(&mut oracle.store, two, one), Ok(false));
    // Neither 0 nor 1 is equivalent to 2, so 2 is linked to itself, with 2 as
    // a common P context.
    assert_eq!(oracle.cache.linked(&mut oracle.store, two, two), Ok(true));
    assert_eq!(oracle.confirm_linked(two, two, &contexts), Ok(Some(two)));
    assert_eq!(oracle.cache.linked(&mut oracle.store, one, one), Ok(true));
    assert_eq!(oracle.confirm_linked(one, one, &contexts), Ok(Some(zero)));
}

#[test]
fn classify_is_deterministic() {
    let run = || {
        let mut oracle = Oracle::default();
        let report = oracle.classify(3, 3, ContextKind::Impartial).unwrap();
        misere::cli::report_json(&report)
    };
    assert_eq!(run(), run());
}

#[test]
fn impartial_classes_are_reduced_form_fibers() {
    let mut oracle = Oracle::default();
    let report = oracle.classify(3, 4, ContextKind::Impartial).unwrap();
    for class in &report.classes {
        assert_eq!(class.representative, class.members[0]);
        assert!(class.members.windows(2).all(|w| w[0] < w[1]));
        let r = class.representative.reduced_form();
        assert!(class.members.iter().all(|m| m.reduced_form() == r));
    }
    let total: usize = report.classes.iter().map(|c| c.members.len()).sum();
    assert_eq!(total, enumerate_positions(3, 4).len());
}

/// Every inequivalent pair within 3 heaps of size 4 should be separated by an
/// impartial context of birthday <= 4 or a Nim position in range. Pairs that
/// are not are logged as known gaps.
#[test]
#[ignore = "slow in debug builds; run with --release -- --ignored"]
fn witness_obligation_at_birthday_four() {
    let bounds = Bounds {
        max_heaps: 3,
        max_size: 4,
    };
    let mut oracle = Oracle::default();
    let mut report = oracle.cross_check_refutations(3, 4, 3).unwrap();
    assert!(report.contradictions.is_empty());
    let contexts = oracle
        .context_universe(ContextKind::Impartial, 4, bounds)
        .unwrap();
    oracle.close_gaps(&mut report, &contexts).unwrap();
    let gaps: Vec<String> = report
        .gaps()
        .map(|p| format!("{} | {}", p.first, p.second))
        .collect();
    for g in &gaps {
        println!("known gap: {g}");
    }
    assert_eq!(gaps, ["1+4 | 2+3+4", "2+2 | 4+4", "3+3 | 4+4", "4+4 | 1+2+3"]);
}
