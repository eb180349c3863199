use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use diffuse_core::crystal::{promislow_group, AffineIso, CrystGroup, FiniteGroup, FiniteGroupJson};
use diffuse_core::data;
use diffuse_core::linalg::q;
use diffuse_core::linrep::{ball, ElementSet, Group, GroupDef, Mat2, MAX_BALL};
use diffuse_core::qfield::NumberField;
use diffuse_core::ravel::{find_ravel, find_ravel_with_order, is_ravel};
use diffuse_core::weeks::weeks_group;

fn weeks() -> &'static GroupDef {
    static G: OnceLock<GroupDef> = OnceLock::new();
    G.get_or_init(weeks_group)
}

fn weeks_ball4() -> &'static ElementSet<Mat2> {
    static B: OnceLock<ElementSet<Mat2>> = OnceLock::new();
    B.get_or_init(|| ball(weeks(), 4, MAX_BALL).unwrap().set)
}

fn promislow() -> &'static CrystGroup {
    static G: OnceLock<CrystGroup> = OnceLock::new();
    G.get_or_init(promislow_group)
}

/// A word-generated subgroup of SL₂(ℤ), from products of the two elementary matrices.
fn sl2z_group(words: &[Vec<bool>]) -> GroupDef {
    let k = NumberField::new(&[-1, 1]).unwrap();
    let u = Mat2([[k.one(), k.one()], [k.zero(), k.one()]]);
    let l = Mat2([[k.one(), k.zero()], [k.one(), k.one()]]);
    let gens = words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let m = w.iter().fold(Mat2::identity(&k), |acc, &up| acc.mul(if up { &u } else { &l }));
            ((b'a' + i as u8) as char, m)
        })
        .collect();
    GroupDef::new(k, gens, false, vec![]).unwrap()
}

fn subset<E: Clone>(set: &ElementSet<E>, mask: &[bool]) -> ElementSet<E> {
    let idx: Vec<usize> = (0..set.len()).filter(|&i| mask[i % mask.len()]).collect();
    set.select(&idx)
}

fn three_orders<G: Group>(g: &G, set: &ElementSet<G::Elem>, seed: u64) -> [ElementSet<G::Elem>; 3] {
    let n = set.len();
    let declared: Vec<usize> = (0..n).collect();
    let reversed: Vec<usize> = (0..n).rev().collect();
    let mut shuffled = declared.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    [
        find_ravel_with_order(g, set, &declared),
        find_ravel_with_order(g, set, &reversed),
        find_ravel_with_order(g, set, &shuffled),
    ]
}

fn is_subset<E: Clone>(a: &ElementSet<E>, b: &ElementSet<E>) -> bool {
    a.elements.keys().all(|k| b.elements.contains_key(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_nested_and_symmetric(words in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..4), 1..3)) {
        let g = sl2z_group(&words);
        let b2 = ball(&g, 2, MAX_BALL).unwrap();
        let b3 = ball(&g, 3, MAX_BALL).unwrap();
        prop_assert!(is_subset(&b2.set, &b3.set));
        for e in b3.set.iter() {
            prop_assert!(b3.set.contains(&g, &g.inv(&e.value)));
        }
        let sizes: Vec<usize> = (0..=3).map(|r| ball(&g, r, MAX_BALL).unwrap().set.len()).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ravel_search_is_order_independent(mask in prop::collection::vec(any::<bool>(), 3..12), seed in any::<u64>()) {
        let g = weeks();
        let set = subset(weeks_ball4(), &mask);
        let [a, b, c] = three_orders(g, &set, seed);
        prop_assert!(a.same_set(&b) && a.same_set(&c));
        prop_assert!(a.is_empty() || is_ravel(g, &a));
        prop_assert_ne!(a.len(), 1);
    }

    #[test]
    fn non_extremality_is_monotone(mask in prop::collection::vec(any::<bool>(), 2..8), drop in prop::collection::vec(any::<bool>(), 2..8)) {
        let g = weeks();
        let big = subset(weeks_ball4(), &mask);
        let small = subset(&big, &drop);
        prop_assert!(is_subset(&find_ravel(g, &small), &find_ravel(g, &big)));
    }

    #[test]
    fn crystal_ravel_search_is_order_independent(mask in prop::collection::vec(any::<bool>(), 2..6), seed in any::<u64>()) {
        let g = promislow();
        let set = subset(&g.ball_at(&[q(0), q(0), q(0)], &q(2)).unwrap(), &mask);
        let [a, b, c] = three_orders(g, &set, seed);
        prop_assert!(a.same_set(&b) && a.same_set(&c));
        prop_assert!(a.is_empty() || is_ravel(g, &a));
    }

    #[test]
    fn crystal_balls_are_nested_and_symmetric(
        e in prop::collection::vec((-4i64..=4, 1i64..=4), 3),
        r in (1i64..=12, 1i64..=4),
        extra in (0i64..=8, 1i64..=4),
    ) {
        let g = promislow();
        let e: Vec<_> = e.into_iter().map(|(p, d)| q(p) / q(d)).collect();
        let r1 = q(r.0) / q(r.1);
        let r2 = &r1 + q(extra.0) / q(extra.1);
        let small = g.ball_at(&e, &r1).unwrap();
        let large = g.ball_at(&e, &r2).unwrap();
        prop_assert!(is_subset(&small, &large));
        for x in small.iter() {
            prop_assert!(small.contains(g, &g.inv(&x.value)));
        }
    }

    #[test]
    fn holonomy_class_is_relabelling_invariant(which in 0usize..5, seed in any::<u64>()) {
        let (_, text) = data::FINITE_GROUPS[which];
        let j: FiniteGroupJson = serde_json::from_str(text).unwrap();
        let h = FiniteGroup::from_json(&j).unwrap();
        let mut perm: Vec<usize> = (0..h.order()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let relabelled = h.relabel(&perm);
        prop_assert_eq!(relabelled.holonomy_class().unwrap(), h.holonomy_class().unwrap());
        prop_assert_eq!(relabelled.derived_series(), h.derived_series());
    }
}

#[test]
fn z_and_z2_balls_have_no_ravel() {
    for name in ["z", "z2"] {
        let j = serde_json::from_str(data::matrix_group(name).unwrap()).unwrap();
        let g = GroupDef::from_json(&j).unwrap();
        for r in 1..=5 {
            let b = ball(&g, r, MAX_BALL).unwrap();
            for found in three_orders(&g, &b.set, r as u64) {
                assert!(found.is_empty(), "{name} radius {r}");
            }
        }
    }
}

#[test]
fn finite_cyclic_subgroups_are_their_own_ravel() {
    let k = NumberField::new(&[-1, 1]).unwrap();
    // orders 2, 3, 4, 6 inside SL₂(ℤ)
    let gens = [
        Mat2([[k.from_int(-1), k.zero()], [k.zero(), k.from_int(-1)]]),
        Mat2([[k.zero(), k.from_int(-1)], [k.one(), k.from_int(-1)]]),
        Mat2([[k.zero(), k.from_int(-1)], [k.one(), k.zero()]]),
        Mat2([[k.one(), k.from_int(-1)], [k.one(), k.zero()]]),
    ];
    for (m, order) in gens.into_iter().zip([2usize, 3, 4, 6]) {
        let g = GroupDef::new(k.clone(), vec![('r', m)], false, vec![]).unwrap();
        let b = ball(&g, order, MAX_BALL).unwrap();
        assert_eq!(b.set.len(), order);
        for found in three_orders(&g, &b.set, order as u64) {
            assert!(found.same_set(&b.set));
        }
    }
}

#[test]
fn ball_is_independent_of_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let b = ball(weeks(), 4, MAX_BALL).unwrap();
                let r = find_ravel(weeks(), &b.set);
                (b.set.elements.keys().cloned().collect::<Vec<_>>(), r.words())
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn crystal_keys_separate_translates() {
    let g = promislow();
    let id = AffineIso::identity(3);
    let t = AffineIso::translation(vec![q(1), q(0), q(0)]);
    assert_ne!(g.key(&id), g.key(&t));
    assert!(g.is_identity(&g.mul(&t, &g.inv(&t))));
}
