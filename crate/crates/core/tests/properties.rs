use std::sync::OnceLock;

use bitangent_core::aronhold::{enumerate_aronhold_sets, AronholdSet, CharMatrix};
use bitangent_core::characteristic::{symplectic_pairing, triple_sign, Characteristic};
use bitangent_core::forms::TernaryForm;
use bitangent_core::quartic::{is_double_contact, proportionality, BinaryQuartic};
use num_complex::Complex64;
use proptest::prelude::*;

fn all_sets() -> &'static [AronholdSet] {
    static SETS: OnceLock<Vec<AronholdSet>> = OnceLock::new();
    SETS.get_or_init(enumerate_aronhold_sets)
}

fn characteristic() -> impl Strategy<Value = Characteristic> {
    (0usize..64).prop_map(Characteristic::from_index)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn nonzero_complex() -> impl Strategy<Value = Complex64> {
    complex().prop_filter("nonzero", |c| c.norm() > 1e-3)
}

proptest! {
    #[test]
    fn label_and_text_round_trip(m in characteristic()) {
        let (i, j) = m.label();
        prop_assert_eq!(Characteristic::from_label(i, j).unwrap(), m);
        prop_assert_eq!(m.to_string().parse::<Characteristic>().unwrap(), m);
        prop_assert_eq!(m.label_string().parse::<Characteristic>().unwrap(), m);
        prop_assert_eq!(Characteristic::from_index(m.index()), m);
    }

    #[test]
    fn addition_is_an_elementary_abelian_group(a in characteristic(), b in characteristic(), c in characteristic()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + a, Characteristic::ZERO);
        prop_assert_eq!(a + Characteristic::ZERO, a);
    }

    #[test]
    fn triple_sign_ignores_order(a in characteristic(), b in characteristic(), c in characteristic()) {
        let s = triple_sign(a, b, c);
        prop_assert!(s == 1 || s == -1);
        for t in [triple_sign(b, a, c), triple_sign(c, b, a), triple_sign(a, c, b), triple_sign(b, c, a)] {
            prop_assert_eq!(t, s);
        }
    }

    #[test]
    fn triple_sign_is_the_pairing_of_differences(a in characteristic(), b in characteristic(), c in characteristic()) {
        // e(a,b,c) = e(a+b, a+c) for the Weil pairing
        prop_assert_eq!(triple_sign(a, b, c), symplectic_pairing(a + b, a + c));
    }

    #[test]
    fn pairing_is_bilinear(a in characteristic(), b in characteristic(), c in characteristic()) {
        prop_assert_eq!(symplectic_pairing(a + b, c), symplectic_pairing(a, c) * symplectic_pairing(b, c));
        prop_assert_eq!(symplectic_pairing(a, b), symplectic_pairing(b, a));
    }

    #[test]
    fn proportionality_ignores_scale(
        q in proptest::collection::vec(complex(), 15),
        s in nonzero_complex(),
    ) {
        prop_assume!(q.iter().any(|c| c.norm() > 1e-3));
        let p: Vec<Complex64> = q.iter().map(|c| c * s).collect();
        prop_assert!(proportionality(&q, &p) < 1e-12);
        prop_assert!(proportionality(&p, &q) < 1e-12);
        let r = proportionality(&q, &q);
        prop_assert!((0.0..1e-15).contains(&r));
    }

    #[test]
    fn squares_of_binary_quadratics_have_double_contact(
        a in nonzero_complex(), b in complex(), c in complex(), k in nonzero_complex(),
    ) {
        // q = a s^2 + b s t + c t^2, g = k q^2
        let g = [a * a, 2.0 * a * b, b * b + 2.0 * a * c, 2.0 * b * c, c * c].map(|x| x * k);
        let dc = is_double_contact(&BinaryQuartic { coeffs: g }, 1e-6);
        prop_assert!(dc.is_double, "{:?}", dc);
    }

    #[test]
    fn product_of_forms_evaluates_pointwise(
        l1 in proptest::array::uniform3(complex()),
        l2 in proptest::array::uniform3(complex()),
        z in proptest::array::uniform3(complex()),
    ) {
        let (a, b) = (TernaryForm::linear(l1), TernaryForm::linear(l2));
        let f = &(&a * &b) * &(&a * &b);
        let expect = (a.eval(z) * b.eval(z)).powu(2);
        prop_assert!((f.eval(z) - expect).norm() <= 1e-10 * expect.norm().max(1.0));
    }

    #[test]
    fn characteristic_tables_cover_the_odds(idx in 0usize..288) {
        let set = &all_sets()[idx];
        let t = CharMatrix::new(set);
        let mut odd: Vec<_> = t.off_diagonal().into_iter().map(|(_, _, c)| c).collect();
        odd.sort();
        odd.dedup();
        prop_assert_eq!(odd.len(), 28);
        prop_assert!(odd.iter().all(|c| c.is_odd()));
        for i in 0..8 {
            prop_assert_eq!(t.entry(i, i), set.base());
        }
    }
}
