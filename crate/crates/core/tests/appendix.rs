use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use diffuse_core::weeks::appendix::{GAMMA_RELATORS, LAMBDA_RELATORS};
use diffuse_core::weeks::{appendix_tree, build_appendix_group, AppendixGroup};

fn group() -> &'static AppendixGroup {
    static G: OnceLock<AppendixGroup> = OnceLock::new();
    G.get_or_init(build_appendix_group)
}

#[test]
fn every_leaf_is_exactly_one() {
    let g = group();
    let leaves = appendix_tree().leaf_words();
    assert_eq!(leaves.len(), 23);
    for w in &leaves {
        let v = g.eval(w).unwrap();
        assert!(v.is_scalar(1), "{w}");
    }
}

#[test]
fn relators_embed_to_plus_minus_identity() {
    let g = group();
    let place = g.field.complex_place(0).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for r in LAMBDA_RELATORS.iter().chain(&GAMMA_RELATORS) {
        let m = g.eval(r).unwrap().embed_sl2(place, 1e-12).unwrap();
        let near = |s: Complex64| m[0][0].contains(s) && m[1][1].contains(s) && m[0][1].contains(zero) && m[1][0].contains(zero);
        assert!(near(one) || near(-one), "{r}");
    }
}

#[test]
fn generators_have_norm_one() {
    let g = group();
    for c in "abcdefghnmv".chars() {
        assert!(g.letter(c).unwrap().norm().is_one(), "{c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn congruence_subgroup_is_closed(word in prop::collection::vec(prop::sample::select(vec!['c', 'd', 'e', 'f', 'C', 'D', 'E', 'F']), 1..10)) {
        let g = group();
        let w: String = word.into_iter().collect();
        let u = g.eval(&w).unwrap();
        prop_assert!(g.level(&u).unwrap().at_least(3), "{w}");
        let t = &u.trace() - &g.field.from_int(2);
        prop_assert!(t.val_pi(&g.pi).unwrap().at_least(3), "{w}");
    }
}
