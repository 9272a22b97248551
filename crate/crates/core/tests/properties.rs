mod common;

use proptest::prelude::*;

use trigonal::enumerator::{run_case, select_case, solve_exhaustive, RunOptions, RunReport};
use trigonal::ff::{extension_of_degree, FieldCtx, FieldElem};
use trigonal::groebner::{solve_over_fq, Budget, Ideal};
use trigonal::mpoly::{MPoly, Monomial, Ring};
use trigonal::parse::parse_poly;
use trigonal::quintic::{
    classify_singularity, geometry_ring, linear_change, node_split_type, quintic_monomials, rational_singular_points,
    z3_part, SingularityStatus,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() }
}

/// A quintic over `F_7` with `(0:0:1)` at least double: random `z^3` part
/// and random tail, or a fully random quintic.
fn quintic_f7() -> impl Strategy<Value = MPoly> {
    let with_node = (proptest::collection::vec(0u32..7, 3), proptest::collection::vec(0u32..7, 18)).prop_map(|(q, t)| {
        let f = common::field(7);
        let head: Vec<Monomial> =
            [[2, 0, 3], [1, 1, 3], [0, 2, 3]].iter().map(|e| Monomial::from_exponents(e).unwrap()).collect();
        &common::form_from(&f, &head, &q) + &common::form_from(&f, &common::tail_monomials(), &t)
    });
    let generic = proptest::collection::vec(0u32..7, 21)
        .prop_map(|c| common::form_from(&common::field(7), &quintic_monomials(), &c))
        .prop_filter("nonzero", |f| !f.is_zero());
    prop_oneof![3 => with_node, 1 => generic].prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(config())]

    /// The certificate never claims fewer singular points than a search over
    /// `P^2(F_7)` and `P^2(F_49)` finds.
    #[test]
    fn singularity_certificate_vs_search(form in quintic_f7()) {
        let report = classify_singularity(&form, &Budget::default()).unwrap();
        let (big, emb) = extension_of_degree(form.field(), 2).unwrap();
        let lifted = form.embed(&geometry_ring(&big), &emb).unwrap();
        let small = rational_singular_points(&form);
        let large = rational_singular_points(&lifted);
        match report.status {
            SingularityStatus::Smooth => prop_assert!(large.is_empty()),
            SingularityStatus::UniqueDouble { point, .. } => {
                prop_assert_eq!(small, vec![point]);
                prop_assert_eq!(large.len(), 1);
            }
            SingularityStatus::MultipleOrWorse => {}
        }
    }

    /// Split, non-split and cuspidal nodes stay so under `GL_2` on `x, y`.
    #[test]
    fn node_kind_under_gl2(q in proptest::collection::vec(0u32..11, 3), m in proptest::collection::vec(0u32..11, 4)) {
        let f = common::field(11);
        let e = |v: u32| f.from_int(v as i64);
        let det = f.sub(f.mul(e(m[0]), e(m[3])), f.mul(e(m[1]), e(m[2])));
        prop_assume!(!det.is_zero());
        let head: Vec<Monomial> =
            [[2, 0, 3], [1, 1, 3], [0, 2, 3]].iter().map(|x| Monomial::from_exponents(x).unwrap()).collect();
        let form = common::form_from(&f, &head, &q);
        prop_assume!(!form.is_zero());
        let z = FieldElem::ZERO;
        let t = [[e(m[0]), e(m[1]), z], [e(m[2]), e(m[3]), z], [z, z, FieldElem::ONE]];
        let moved = linear_change(&form, &t).unwrap();
        prop_assert_eq!(node_split_type(&f, z3_part(&form)), node_split_type(&f, z3_part(&moved)));
    }

    /// Exhaustive evaluation and Groebner-based solving agree.
    #[test]
    fn exhaustive_solver_agrees_with_groebner(
        system in proptest::collection::vec(proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), 0u32..5), 1..5), 1..4)
    ) {
        let f = common::field(5);
        let ring = Ring::new(f.clone(), &["u", "v", "w"]).unwrap();
        let eqs: Vec<MPoly> = system
            .iter()
            .map(|t| MPoly::from_terms(&ring, t.iter().map(|&((a, b, c), k)| (Monomial::from_exponents(&[a, b, c]).unwrap(), f.from_int(k as i64)))))
            .filter(|p| !p.is_zero())
            .collect();
        prop_assume!(!eqs.is_empty());
        let mut brute = solve_exhaustive(&eqs, &ring);
        brute.sort();
        let mut gb = solve_over_fq(&Ideal::new(&ring, eqs.clone()).unwrap(), &Budget::default()).unwrap().points;
        gb.sort();
        prop_assert_eq!(brute, gb);
    }

    /// Printed forms parse back to the same polynomial.
    #[test]
    fn form_text_round_trips(c in proptest::collection::vec(0u32..49, 21)) {
        let f = common::field(49);
        let mons = quintic_monomials();
        let ring = geometry_ring(&f);
        let form = MPoly::from_terms(&ring, mons.iter().zip(&c).map(|(&m, &k)| (m, FieldElem(k))).filter(|t| !t.1.is_zero()));
        prop_assert_eq!(parse_poly(&ring, &form.to_string()).unwrap(), form);
    }
}

#[test]
fn solver_against_scan() {
    common::solver_matches_scan(60).unwrap();
}

#[test]
fn powers_against_products() {
    common::pow_matches_naive(60).unwrap();
}

#[test]
fn products_are_reducible() {
    common::irreducibility_soundness(40).unwrap();
}

#[test]
fn runs_are_deterministic_and_serialize() {
    let f13 = FieldCtx::canonical(13).unwrap();
    let config = select_case(&f13, "nonsplit3").unwrap().remove(0);
    let opts = RunOptions { slices: Some((0, 3)), ..RunOptions::default() };
    let a = run_case(&config, &opts).unwrap();
    let b = run_case(&config, &opts).unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    let text = serde_json::to_string(&a).unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, a);
    assert_eq!(a.counters.slices_run, 3);
}
