use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use proptest::prelude::*;

use diffuse_core::qfield::{NFElem, NumberField, Valuation};
use diffuse_core::quat::{QuatAlgebra, QuatElem};

fn cubic() -> &'static Arc<NumberField> {
    static K: OnceLock<Arc<NumberField>> = OnceLock::new();
    K.get_or_init(|| NumberField::new(&[-1, 1, 0, 1]).unwrap())
}

fn sextic() -> &'static Arc<NumberField> {
    static K: OnceLock<Arc<NumberField>> = OnceLock::new();
    K.get_or_init(|| NumberField::new(&[1, 0, 2, -1, 2, 0, 1]).unwrap())
}

fn algebra() -> &'static Arc<QuatAlgebra> {
    static D: OnceLock<Arc<QuatAlgebra>> = OnceLock::new();
    D.get_or_init(|| QuatAlgebra::new(cubic().from_int(-1), cubic().from_int(-3)).unwrap())
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, n)
}

fn rational_coeffs(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), n)
        .prop_map(|v| v.into_iter().map(|(p, q)| BigRational::new(p.into(), q.into())).collect())
}

fn pi() -> NFElem {
    &cubic().gen() + &cubic().one()
}

fn quat(c: &[Vec<i64>]) -> QuatElem {
    let k = cubic();
    algebra().elem(k.elem_i64(&c[0]), k.elem_i64(&c[1]), k.elem_i64(&c[2]), k.elem_i64(&c[3])).unwrap()
}

fn quat_coeffs() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(coeffs(3), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in rational_coeffs(6), b in rational_coeffs(6), c in rational_coeffs(6)) {
        let k = sextic();
        let (a, b, c) = (k.elem(&a).unwrap(), k.elem(&b).unwrap(), k.elem(&c).unwrap());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &a), &k.zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn norm_is_multiplicative(a in coeffs(3), b in coeffs(3)) {
        let k = cubic();
        let (a, b) = (k.elem_i64(&a), k.elem_i64(&b));
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn valuation_is_additive(a in coeffs(3), b in coeffs(3)) {
        let k = cubic();
        let (a, b) = (k.elem_i64(&a), k.elem_i64(&b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let p = pi();
        let (Valuation::Finite(va), Valuation::Finite(vb)) = (a.val_pi(&p).unwrap(), b.val_pi(&p).unwrap()) else {
            unreachable!("nonzero elements have finite valuation")
        };
        prop_assert_eq!((&a * &b).val_pi(&p).unwrap(), Valuation::Finite(va + vb));
    }

    #[test]
    fn embedding_is_a_homomorphism(a in coeffs(6), b in coeffs(6)) {
        let k = sextic();
        let (a, b) = (k.elem_i64(&a), k.elem_i64(&b));
        for place in 0..k.places().len() {
            let prod = a.embed(place, 1e-12).unwrap().ball().mul(&b.embed(place, 1e-12).unwrap().ball());
            let direct = (&a * &b).embed(place, 1e-12).unwrap().ball();
            let gap = (prod.center - direct.center).norm();
            prop_assert!(gap <= prod.radius + direct.radius, "place {place}: gap {gap}");
        }
    }

    #[test]
    fn quaternion_norm_and_trace(u in quat_coeffs(), v in quat_coeffs()) {
        let (u, v) = (quat(&u), quat(&v));
        let uv = u.mul(&v).unwrap();
        prop_assert_eq!(uv.norm(), &u.norm() * &v.norm());
        prop_assert_eq!(uv.trace(), v.mul(&u).unwrap().trace());
        prop_assert_eq!(uv.conj(), v.conj().mul(&u.conj()).unwrap());
    }

    #[test]
    fn quaternion_level_is_additive(u in quat_coeffs(), v in quat_coeffs()) {
        let (u, v) = (quat(&u), quat(&v));
        prop_assume!(!u.norm().is_zero() && !v.norm().is_zero());
        let p = pi();
        let (Valuation::Finite(a), Valuation::Finite(b)) = (u.w_valuation(&p).unwrap(), v.w_valuation(&p).unwrap()) else {
            unreachable!("a division algebra has no zero divisors")
        };
        prop_assert_eq!(u.mul(&v).unwrap().w_valuation(&p).unwrap(), Valuation::Finite(a + b));
    }
}
