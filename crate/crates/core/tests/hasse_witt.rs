mod common;

use proptest::prelude::*;

use trigonal::ff::{FieldCtx, FieldElem};
use trigonal::hasse_witt::{hasse_witt, hasse_witt_plain, is_superspecial, symbolic_hasse_witt, targets};
use trigonal::mpoly::{MPoly, Ring};
use trigonal::parse::parse_poly;
use trigonal::quintic::{geometry_ring, ModelCase, QuinticModel};

/// Entries read straight off `F^(p-1)` computed by repeated multiplication.
fn naive_matrix(form: &MPoly) -> Vec<FieldElem> {
    let p = form.field().p();
    let mut h = MPoly::one(form.ring());
    for _ in 0..p - 1 {
        h = &h * form;
    }
    let t = targets(p);
    let mut out = Vec::new();
    for row in t {
        for e in row {
            out.push(h.coeff(&e));
        }
    }
    out
}

fn flat(form: &MPoly) -> Vec<FieldElem> {
    let h = hasse_witt_plain(form).unwrap();
    h.rows.iter().flatten().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn truncated_power_matches_naive_split(form in common::model_strategy(11, "x*y*z^3")) {
        prop_assert_eq!(flat(&form), naive_matrix(&form));
    }

    #[test]
    fn truncated_power_matches_naive_cusp(form in common::model_strategy(7, "x^2*z^3")) {
        prop_assert_eq!(flat(&form), naive_matrix(&form));
    }
}

#[test]
fn descent_and_root_independence() {
    common::nonsplit_descent(30).unwrap();
}

#[test]
fn rank_under_coordinate_changes() {
    common::rank_invariance(20).unwrap();
}

#[test]
fn known_non_superspecial_form() {
    let f = FieldCtx::canonical(11).unwrap();
    let m = QuinticModel::parse(&f, ModelCase::NonSplitNode1, "(x^2 - 2*y^2)*z^3 + x^5", Some(f.from_int(2))).unwrap();
    let h = hasse_witt(&m).unwrap();
    assert!(!h.is_zero());
    assert!(h.rank() > 0);
}

#[test]
fn fermat_type_forms_over_f13_are_not_superspecial() {
    // Superspecial genus-5 curves of this shape need q = 11 or 49.
    let f = FieldCtx::canonical(13).unwrap();
    let m = QuinticModel::parse(&f, ModelCase::SplitNode1, "x*y*z^3 + x^5 + y^5", None).unwrap();
    assert!(!is_superspecial(&m).unwrap());
}

#[test]
fn symbolic_entries_specialize() {
    let f = FieldCtx::canonical(11).unwrap();
    let ring = Ring::new(f.clone(), &["x", "y", "z", "a", "b"]).unwrap();
    let sym = parse_poly(&ring, "(x^2 - 2*y^2)*z^3 + a*x^5 + b*x^4*y + 9*a*x^3*y^2 + 4*b*x^2*y^3 + 9*a*x*y^4 + 3*b*y^5").unwrap();
    let model = QuinticModel::new(ModelCase::NonSplitNode1, sym, Some(f.from_int(2))).unwrap();
    let s = symbolic_hasse_witt(&model).unwrap();
    for (a, b) in [(1, 0), (0, 1), (3, 7), (0, 0)] {
        let values = [(0, f.from_int(a)), (1, f.from_int(b))];
        let got: Vec<FieldElem> = s.entries.iter().map(|e| e.substitute_values(&values).constant_value().unwrap()).collect();
        let text = format!(
            "(x^2 - 2*y^2)*z^3 + {a}*x^5 + {b}*x^4*y + {}*x^3*y^2 + {}*x^2*y^3 + {}*x*y^4 + {}*y^5",
            9 * a,
            4 * b,
            9 * a,
            3 * b
        );
        let concrete = QuinticModel::new(ModelCase::NonSplitNode1, parse_poly(&geometry_ring(&f), &text).unwrap(), Some(f.from_int(2)));
        let want: Vec<FieldElem> = hasse_witt(&concrete.unwrap()).unwrap().rows.iter().flatten().copied().collect();
        assert_eq!(got, want, "a = {a}, b = {b}");
        if (a, b) != (0, 0) {
            assert!(got.iter().all(|c| c.is_zero()), "family member ({a}, {b}) is superspecial");
        }
    }
}

#[test]
fn fermat_type_form_over_f49_is_not_superspecial() {
    let f = FieldCtx::canonical(49).unwrap();
    let m = QuinticModel::parse(&f, ModelCase::SplitNode1, "x*y*z^3 + x^5 + y^5", None).unwrap();
    assert!(hasse_witt(&m).unwrap().rank() > 0);
}
