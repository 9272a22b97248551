//! Random-model strategies and the invariant suites shared by the
//! property tests and the acceptance run. Every suite uses a fixed seed.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use trigonal::ff::{nonsquare, quadratic_extension, FieldCtx, FieldElem};
use trigonal::groebner::{solve_over_fq, Budget, Ideal};
use trigonal::hasse_witt::{hasse_witt, hasse_witt_plain, symbolic_nonsplit_with_root};
use trigonal::irreducibility::is_absolutely_irreducible;
use trigonal::mpoly::{MPoly, Monomial, Ring};
use trigonal::quintic::{geometry_ring, linear_change, quintic_monomials, QuinticModel};

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn field(q: u64) -> FieldCtx {
    FieldCtx::canonical(q).unwrap()
}

/// Quintic monomials with `z` exponent at most 2, i.e. those allowed
/// besides the `z^3` part of a model with its node at `(0:0:1)`.
pub fn tail_monomials() -> Vec<Monomial> {
    quintic_monomials().into_iter().filter(|m| m.exponent(2) <= 2).collect()
}

pub fn form_from(f: &FieldCtx, mons: &[Monomial], coeffs: &[u32]) -> MPoly {
    let ring = geometry_ring(f);
    MPoly::from_terms(&ring, mons.iter().zip(coeffs).map(|(&m, &c)| (m, f.from_int(c as i64))).filter(|t| !t.1.is_zero()))
}

/// `head + random tail` over `F_q` with integer coefficients in `0..q`.
pub fn model_strategy(q: u32, head: &'static str) -> impl Strategy<Value = MPoly> {
    let n = tail_monomials().len();
    proptest::collection::vec(0..q, n).prop_map(move |c| {
        let f = field(q as u64);
        let tail = form_from(&f, &tail_monomials(), &c);
        let head = trigonal::parse::parse_poly(&geometry_ring(&f), head).unwrap();
        &head + &tail
    })
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Polynomial powers against repeated multiplication.
pub fn pow_matches_naive(cases: u32) -> Result<(), String> {
    let strat = (proptest::collection::vec(((0u32..4, 0u32..4, 0u32..4), 1u32..13), 1..6), 0u32..9);
    finish(runner(cases).run(&strat, |(terms, e)| {
        let f = field(13);
        let ring = geometry_ring(&f);
        let g = MPoly::from_terms(
            &ring,
            terms.iter().map(|&((a, b, c), k)| (Monomial::from_exponents(&[a, b, c]).unwrap(), f.from_int(k as i64))),
        );
        let mut naive = MPoly::one(&ring);
        for _ in 0..e {
            naive = &naive * &g;
        }
        let fast = g.pow(e).unwrap();
        check(fast == naive, || format!("({g})^{e}"))
    }))
}

/// `solve_over_fq` against evaluation at every point of `F_7^3`.
pub fn solver_matches_scan(cases: u32) -> Result<(), String> {
    let poly = proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), 1u32..7), 1..5);
    let strat = proptest::collection::vec(poly, 1..4);
    finish(runner(cases).run(&strat, |system| {
        let f = field(7);
        let ring = Ring::new(f.clone(), &["u", "v", "w"]).unwrap();
        let mut gens: Vec<MPoly> = system
            .iter()
            .map(|terms| {
                MPoly::from_terms(
                    &ring,
                    terms.iter().map(|&((a, b, c), k)| (Monomial::from_exponents(&[a, b, c]).unwrap(), f.from_int(k as i64))),
                )
            })
            .collect();
        // Keep the systems from being mostly inconsistent: force a common
        // root at a point derived from the first polynomial.
        let anchor: Vec<FieldElem> = (0..3).map(|i| f.from_int(gens[0].len() as i64 + i)).collect();
        for g in gens.iter_mut() {
            let v = g.eval(&anchor).unwrap();
            *g = &*g - &MPoly::constant(&ring, v);
        }
        let ideal = Ideal::new(&ring, gens.clone()).unwrap();
        let sol = solve_over_fq(&ideal, &Budget::default()).unwrap();
        let mut got = sol.points.clone();
        got.sort();
        let mut want = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let p = vec![a, b, c];
                    if gens.iter().all(|g| g.eval(&p).unwrap().is_zero()) {
                        want.push(p);
                    }
                }
            }
        }
        want.sort();
        check(sol.complete && got == want, || format!("{} vs {} points", got.len(), want.len()))
    }))
}

/// The non-split matrix descends to `F_11`, does not depend on the sign
/// of `sqrt(eps)`, and has the rank of the matrix read off `F^(p-1)` in
/// the rational basis.
pub fn nonsplit_descent(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&model_strategy(11, "(x^2 - 2*y^2)*z^3"), |form| {
        let f = form.field().clone();
        let eps = nonsquare(&f);
        let ext = quadratic_extension(&f, eps).unwrap();
        let root = ext.sqrt_eps;
        let a = symbolic_nonsplit_with_root(&form, &ext, root, true).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = symbolic_nonsplit_with_root(&form, &ext, ext.field.neg(root), true)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(a.entries == b.entries, || format!("sign of the root matters for {form}"))?;
        let h = hasse_witt(&QuinticModel::new(trigonal::quintic::ModelCase::NonSplitNode1, form.clone(), Some(eps)).unwrap())
            .unwrap();
        let plain = hasse_witt_plain(&form).unwrap();
        check(h.rank() == plain.rank(), || format!("rank {} vs {} for {form}", h.rank(), plain.rank()))
    }))
}

/// Hasse-Witt rank under `z -> z + a x + b y`, which keeps the model shape.
pub fn rank_invariance(cases: u32) -> Result<(), String> {
    let strat = (prop_oneof![model_strategy(11, "x*y*z^3"), model_strategy(11, "(x^2 - 2*y^2)*z^3")], 0u32..11, 0u32..11);
    finish(runner(cases).run(&strat, |(form, a, b)| {
        let f = form.field().clone();
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        let t = [[o, z, z], [z, o, z], [f.from_int(a as i64), f.from_int(b as i64), o]];
        let moved = linear_change(&form, &t).unwrap();
        let r0 = hasse_witt(&QuinticModel::infer(form.clone()).unwrap()).unwrap().rank();
        let r1 = hasse_witt(&QuinticModel::infer(moved.clone()).unwrap()).unwrap().rank();
        check(r0 == r1, || format!("rank {r0} for {form} but {r1} for {moved}"))
    }))
}

/// Products of a linear and a quartic form, or of a quadratic and a cubic
/// form, are never reported absolutely irreducible.
pub fn irreducibility_soundness(cases: u32) -> Result<(), String> {
    let deg_mons = |d: u32| -> Vec<Monomial> {
        let mut v = Vec::new();
        for i in 0..=d {
            for j in 0..=d - i {
                v.push(Monomial::from_exponents(&[i, j, d - i - j]).unwrap());
            }
        }
        v
    };
    let strat = (0u32..2, proptest::collection::vec(0u32..11, 15), proptest::collection::vec(0u32..11, 15));
    finish(runner(cases).run(&strat, |(kind, c1, c2)| {
        let f = field(11);
        let (d1, d2) = if kind == 0 { (1, 4) } else { (2, 3) };
        let (m1, m2) = (deg_mons(d1), deg_mons(d2));
        let mut g = form_from(&f, &m1, &c1[..m1.len()]);
        let mut h = form_from(&f, &m2, &c2[..m2.len()]);
        let ring = geometry_ring(&f);
        if g.is_zero() {
            g = MPoly::var(&ring, 0).pow(d1).unwrap();
        }
        if h.is_zero() {
            h = MPoly::var(&ring, 2).pow(d2).unwrap();
        }
        let p = &g * &h;
        let irreducible = is_absolutely_irreducible(&p, &Budget::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(!irreducible, || format!("({g}) * ({h}) reported irreducible"))
    }))
}
