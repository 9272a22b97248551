//! Buchberger's algorithm with the sugar selection strategy and the
//! Gebauer–Möller pair criteria, plus the solvers built on top of it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{FieldCtx, FieldElem};
use crate::mpoly::{same_ring, MPoly, Monomial, PolyError, Ring, RingRef};

type Poly = Vec<(Monomial, FieldElem)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Resource caps for a single basis computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// S-pairs reduced.
    pub max_pairs: usize,
    /// Basis elements alive at once.
    pub max_basis: usize,
    /// Terms in any intermediate polynomial.
    pub max_terms: usize,
    /// Quotient dimension tolerated while extracting solutions.
    pub max_quotient: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pairs: 100_000, max_basis: 5_000, max_terms: 1_000_000, max_quotient: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Ideal {
    ring: RingRef,
    gens: Vec<MPoly>,
}

impl Ideal {
    pub fn new(ring: &RingRef, gens: Vec<MPoly>) -> Result<Self, GroebnerError> {
        if gens.iter().any(|g| !same_ring(g.ring(), ring)) {
            return Err(PolyError::RingMismatch.into());
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Ideal { ring: ring.clone(), gens })
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }
    pub fn gens(&self) -> &[MPoly] {
        &self.gens
    }
}

/// A reduced Gröbner basis: monic, inter-reduced, sorted by increasing
/// leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: RingRef,
    polys: Vec<MPoly>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GbStats {
    pub pairs: usize,
    pub zero_reductions: usize,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Reduces `p` fully by `basis` (all monic); returns the remainder.
fn reduce_full(f: &FieldCtx, p: Poly, basis: &[&Poly], max_terms: usize) -> Result<Poly, GroebnerError> {
    let mut rest = p;
    let mut start = 0usize;
    let mut out: Poly = Vec::new();
    let neg_one = f.neg(FieldElem::ONE);
    while start < rest.len() {
        let (m, c) = rest[start];
        let mut best: Option<&Poly> = None;
        for g in basis {
            if g[0].0.divides(m) && best.map_or(true, |b| g.len() < b.len()) {
                best = Some(g);
            }
        }
        match best {
            None => {
                out.push((m, c));
                start += 1;
            }
            Some(g) => {
                let shift = m.div(g[0].0);
                let factor = f.mul(neg_one, c);
                rest = merge_sub(f, &rest[start + 1..], &g[1..], factor, shift);
                start = 0;
                if rest.len() + out.len() > max_terms {
                    return Err(GroebnerError::BudgetExceeded(format!(
                        "intermediate polynomial exceeds {max_terms} terms"
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// `a + factor * shift * b` for sorted term lists.
fn merge_sub(f: &FieldCtx, a: &[(Monomial, FieldElem)], b: &[(Monomial, FieldElem)], factor: FieldElem, shift: Monomial) -> Poly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let bm = b[j].0.mul(shift);
        let (ka, kb) = (a[i].0.key(), bm.key());
        if ka > kb {
            out.push(a[i]);
            i += 1;
        } else if ka < kb {
            out.push((bm, f.mul(factor, b[j].1)));
            j += 1;
        } else {
            let v = f.mul_add(a[i].1, factor, b[j].1);
            if !v.is_zero() {
                out.push((bm, v));
            }
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    for &(m, c) in &b[j..] {
        out.push((m.mul(shift), f.mul(factor, c)));
    }
    out
}

fn make_monic(f: &FieldCtx, p: &mut Poly) {
    if let Some(&(_, c)) = p.first() {
        if c != FieldElem::ONE {
            let inv = f.inv(c);
            for t in p.iter_mut() {
                t.1 = f.mul(t.1, inv);
            }
        }
    }
}

fn spoly(f: &FieldCtx, a: &Poly, b: &Poly, lcm: Monomial) -> Poly {
    let sa = lcm.div(a[0].0);
    let sb = lcm.div(b[0].0);
    let ta: Poly = a[1..].iter().map(|&(m, c)| (m.mul(sa), c)).collect();
    merge_sub(f, &ta, &b[1..], f.neg(FieldElem::ONE), sb)
}

fn sugar_degree(p: &Poly) -> u32 {
    p.iter().map(|t| t.0.degree()).max().unwrap_or(0)
}

struct Engine {
    budget: Budget,
    polys: Vec<Poly>,
    sugar: Vec<u32>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    stats: GbStats,
}

impl Engine {
    fn reducers(&self) -> Vec<&Poly> {
        self.active.iter().map(|&i| &self.polys[i]).collect()
    }

    /// Adds a new (reduced, monic, nonzero) element and updates the pair
    /// set by the Gebauer–Möller criteria.
    fn update(&mut self, h: Poly, sugar: u32) -> Result<(), GroebnerError> {
        let hi = self.polys.len();
        let lh = h[0].0;
        self.polys.push(h);
        self.sugar.push(sugar);

        let cands: Vec<(usize, Monomial, bool)> = self
            .active
            .iter()
            .map(|&g| {
                let lg = self.polys[g][0].0;
                (g, lh.lcm(lg), lh.coprime(lg))
            })
            .collect();
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        for (idx, &(g, l, cop)) in cands.iter().enumerate() {
            let dominated = |&(_, l2, _): &(usize, Monomial, bool)| l2.divides(l);
            if cop || (!cands[idx + 1..].iter().any(dominated) && !kept.iter().any(dominated)) {
                kept.push((g, l, cop));
            }
        }
        let polys = &self.polys;
        self.pairs.retain(|p| {
            let li = polys[p.i][0].0.lcm(lh);
            let lj = polys[p.j][0].0.lcm(lh);
            !(lh.divides(p.lcm) && li != p.lcm && lj != p.lcm)
        });
        for (g, l, cop) in kept {
            if cop {
                continue;
            }
            let sg = self.sugar[g] + l.degree() - self.polys[g][0].0.degree();
            let sh = sugar + l.degree() - lh.degree();
            self.pairs.push(Pair { i: g, j: hi, lcm: l, sugar: sg.max(sh) });
        }
        self.active.retain(|&g| !lh.divides(polys[g][0].0));
        self.active.push(hi);
        if self.active.len() > self.budget.max_basis {
            return Err(GroebnerError::BudgetExceeded(format!("basis exceeds {} elements", self.budget.max_basis)));
        }
        Ok(())
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.sugar, p.lcm.key(), p.i, p.j))
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }
}

/// Computes the reduced Gröbner basis of `ideal`.
pub fn buchberger(ideal: &Ideal, budget: &Budget) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_stats(ideal, budget).map(|(b, _)| b)
}

pub fn buchberger_with_stats(ideal: &Ideal, budget: &Budget) -> Result<(GroebnerBasis, GbStats), GroebnerError> {
    let ring = ideal.ring.clone();
    let f = ring.field().clone();
    let unit = || GroebnerBasis { ring: ring.clone(), polys: vec![MPoly::one(&ring)] };
    let mut inputs: Vec<Poly> = ideal.gens.iter().map(|g| g.terms().to_vec()).collect();
    inputs.sort_by_key(|p| (p[0].0.degree(), p[0].0.key(), p.len()));
    let mut eng = Engine { budget: *budget, polys: Vec::new(), sugar: Vec::new(), active: Vec::new(), pairs: Vec::new(), stats: GbStats::default() };
    for g in inputs {
        let s = sugar_degree(&g);
        let mut r = reduce_full(&f, g, &eng.reducers(), budget.max_terms)?;
        if r.is_empty() {
            continue;
        }
        if r[0].0 == Monomial::ONE {
            return Ok((unit(), eng.stats));
        }
        make_monic(&f, &mut r);
        eng.update(r, s)?;
    }
    while let Some(pair) = eng.next_pair() {
        eng.stats.pairs += 1;
        if eng.stats.pairs > budget.max_pairs {
            return Err(GroebnerError::BudgetExceeded(format!("more than {} S-pairs", budget.max_pairs)));
        }
        let sp = spoly(&f, &eng.polys[pair.i], &eng.polys[pair.j], pair.lcm);
        let mut r = reduce_full(&f, sp, &eng.reducers(), budget.max_terms)?;
        if r.is_empty() {
            eng.stats.zero_reductions += 1;
            continue;
        }
        if r[0].0 == Monomial::ONE {
            return Ok((unit(), eng.stats));
        }
        make_monic(&f, &mut r);
        eng.update(r, pair.sugar)?;
    }
    // Inter-reduce the minimal basis.
    let mut basis: Vec<Poly> = eng.active.iter().map(|&i| eng.polys[i].clone()).collect();
    basis.sort_by_key(|p| p[0].0.key());
    let mut reduced = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let others: Vec<&Poly> = basis.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p).collect();
        let lead = basis[k][0];
        let tail = reduce_full(&f, basis[k][1..].to_vec(), &others, budget.max_terms)?;
        let mut p = vec![lead];
        p.extend(tail);
        reduced.push(p);
    }
    let stats = eng.stats;
    let polys = reduced.into_iter().map(|p| MPoly::from_sorted(&ring, p)).collect();
    Ok((GroebnerBasis { ring, polys }, stats))
}

/// Remainder of `f` on division by `basis` (a Gröbner basis gives the
/// unique normal form).
pub fn normal_form(f: &MPoly, basis: &[MPoly]) -> MPoly {
    let refs: Vec<Poly> = basis.iter().filter(|g| !g.is_zero()).map(|g| g.monic().terms().to_vec()).collect();
    let rr: Vec<&Poly> = refs.iter().collect();
    let r = reduce_full(f.field(), f.terms().to_vec(), &rr, usize::MAX).expect("no term cap");
    MPoly::from_sorted(f.ring(), r)
}

impl GroebnerBasis {
    pub fn ring(&self) -> &RingRef {
        &self.ring
    }
    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }
    pub fn is_one(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_unit()
    }
    pub fn normal_form(&self, f: &MPoly) -> MPoly {
        normal_form(f, &self.polys)
    }
    pub fn contains(&self, f: &MPoly) -> bool {
        self.normal_form(f).is_zero()
    }
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().filter_map(|p| p.leading().map(|t| t.0)).collect()
    }

    /// Whether every S-polynomial reduces to zero (the defining property).
    pub fn verify(&self) -> bool {
        let f = self.ring.field();
        let ps: Vec<Poly> = self.polys.iter().map(|p| p.terms().to_vec()).collect();
        let refs: Vec<&Poly> = ps.iter().collect();
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let l = ps[i][0].0.lcm(ps[j][0].0);
                let s = spoly(f, &ps[i], &ps[j], l);
                if !reduce_full(f, s, &refs, usize::MAX).unwrap().is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Standard monomials in the variables `vars`, or `None` when the
    /// quotient is infinite in those variables or exceeds `limit`.
    pub fn standard_monomials(&self, vars: &[usize], limit: usize) -> Option<Vec<Monomial>> {
        if self.is_one() {
            return Some(Vec::new());
        }
        let lms = self.leading_monomials();
        for &v in vars {
            if !lms.iter().any(|m| m.exponent(v) > 0 && m.degree() == m.exponent(v)) {
                return None;
            }
        }
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![Monomial::ONE];
        seen.insert(Monomial::ONE);
        let mut out = Vec::new();
        while let Some(m) = stack.pop() {
            out.push(m);
            if out.len() > limit {
                return None;
            }
            for &v in vars {
                let n = m.checked_mul(Monomial::var(v))?;
                if !lms.iter().any(|l| l.divides(n)) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        out.sort_by_key(|m| m.key());
        Some(out)
    }
}

/// Points of a zero-dimensional ideal, each listed once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub points: Vec<Vec<FieldElem>>,
    /// True when the list is certified to contain every solution.
    pub complete: bool,
}

/// All `F_q`-points of `ideal`, found after appending the field equations.
pub fn solve_over_fq(ideal: &Ideal, budget: &Budget) -> Result<SolutionSet, GroebnerError> {
    let ring = ideal.ring();
    let q = ring.field().order();
    let mut gens = ideal.gens().to_vec();
    for v in 0..ring.nvars() {
        gens.push(field_equation(ring, v, q)?);
    }
    let points = solve_zero_dim(&Ideal::new(ring, gens)?, budget)?;
    Ok(SolutionSet { points, complete: true })
}

/// `v^e - v`.
pub fn field_equation(ring: &RingRef, v: usize, e: u32) -> Result<MPoly, GroebnerError> {
    let x = MPoly::var(ring, v);
    Ok(x.pow(e)?.try_sub(&x)?)
}

/// All points with coordinates in the coefficient field of a
/// zero-dimensional ideal, by recursive specialization of the order-least
/// variable. Roots of its minimal polynomial are found by scanning the
/// field. Errors if some stage is not zero-dimensional.
pub fn solve_zero_dim(ideal: &Ideal, budget: &Budget) -> Result<Vec<Vec<FieldElem>>, GroebnerError> {
    let ring = ideal.ring().clone();
    let n = ring.nvars();
    let mut out = Vec::new();
    let free: Vec<usize> = (0..n).collect();
    let assigned = vec![None; n];
    extract(&ring, ideal.gens().to_vec(), free, assigned, budget, &mut out)?;
    for pt in &out {
        for g in ideal.gens() {
            if !g.eval(pt)?.is_zero() {
                return Err(GroebnerError::Invariant("extracted point does not satisfy a generator".into()));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn extract(
    ring: &RingRef,
    gens: Vec<MPoly>,
    free: Vec<usize>,
    assigned: Vec<Option<FieldElem>>,
    budget: &Budget,
    out: &mut Vec<Vec<FieldElem>>,
) -> Result<(), GroebnerError> {
    if gens.iter().any(|g| g.is_unit()) {
        return Ok(());
    }
    let gb = buchberger(&Ideal::new(ring, gens)?, budget)?;
    if gb.is_one() {
        return Ok(());
    }
    let Some(&v) = free.last() else {
        if gb.polys().iter().all(|p| p.is_zero()) {
            out.push(assigned.into_iter().map(|a| a.unwrap()).collect());
        }
        return Ok(());
    };
    let minpoly = minimal_polynomial(&gb, v, &free, budget)?;
    let f = ring.field();
    let roots: Vec<FieldElem> = f.elements().filter(|&c| eval_univariate(f, &minpoly, c).is_zero()).collect();
    let mut rest = free.clone();
    rest.pop();
    for r in roots {
        let sub: Vec<MPoly> = gb.polys().iter().map(|g| g.substitute_values(&[(v, r)])).filter(|g| !g.is_zero()).collect();
        let mut a = assigned.clone();
        a[v] = Some(r);
        extract(ring, sub, rest.clone(), a, budget, out)?;
    }
    Ok(())
}

fn eval_univariate(f: &FieldCtx, coeffs: &[FieldElem], x: FieldElem) -> FieldElem {
    coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Minimal polynomial of variable `v` modulo a zero-dimensional basis, as
/// coefficients low to high (monic).
pub fn minimal_polynomial(gb: &GroebnerBasis, v: usize, free: &[usize], budget: &Budget) -> Result<Vec<FieldElem>, GroebnerError> {
    let f = gb.ring().field().clone();
    let std = gb.standard_monomials(free, budget.max_quotient).ok_or(GroebnerError::NotZeroDimensional)?;
    let index: rustc_hash::FxHashMap<Monomial, usize> = std.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let d = std.len();
    // Echelon rows: (dense vector, combination of powers of v).
    let mut rows: Vec<(Vec<FieldElem>, Vec<FieldElem>, usize)> = Vec::new();
    let x = MPoly::var(gb.ring(), v);
    let mut power = MPoly::one(gb.ring());
    for k in 0..=d {
        let mut vec = vec![FieldElem::ZERO; d];
        for &(m, c) in power.terms() {
            vec[index[&m]] = c;
        }
        let mut comb = vec![FieldElem::ZERO; d + 1];
        comb[k] = FieldElem::ONE;
        for (rv, rc, piv) in &rows {
            let c = vec[*piv];
            if !c.is_zero() {
                let nc = f.neg(c);
                for i in 0..d {
                    vec[i] = f.mul_add(vec[i], nc, rv[i]);
                }
                for i in 0..=d {
                    comb[i] = f.mul_add(comb[i], nc, rc[i]);
                }
            }
        }
        match vec.iter().position(|c| !c.is_zero()) {
            None => {
                comb.truncate(k + 1);
                let lead = comb[k];
                let inv = f.inv(lead);
                return Ok(comb.into_iter().map(|c| f.mul(c, inv)).collect());
            }
            Some(piv) => {
                let inv = f.inv(vec[piv]);
                for c in vec.iter_mut() {
                    *c = f.mul(*c, inv);
                }
                for c in comb.iter_mut() {
                    *c = f.mul(*c, inv);
                }
                rows.push((vec, comb, piv));
            }
        }
        power = gb.normal_form(&power.try_mul(&x)?);
    }
    Err(GroebnerError::Invariant("no linear dependency among powers".into()))
}

/// Whether `f` vanishes on the variety of `ideal` over the algebraic
/// closure: `1` lies in `ideal + (f*w - 1)` for a fresh variable `w`.
pub fn radical_vanishes(f: &MPoly, ideal: &Ideal, budget: &Budget) -> Result<bool, GroebnerError> {
    let ring = ideal.ring();
    let mut names: Vec<String> = ring.vars().to_vec();
    let mut w = "w".to_string();
    while names.contains(&w) {
        w.push('_');
    }
    names.push(w);
    let big = Ring::new(ring.field().clone(), &names)?;
    let map: Vec<usize> = (0..ring.nvars()).collect();
    let mut gens = Vec::with_capacity(ideal.gens().len() + 1);
    for g in ideal.gens() {
        gens.push(g.rename_into(&big, &map)?);
    }
    let fw = f.rename_into(&big, &map)?.try_mul(&MPoly::var(&big, ring.nvars()))?;
    gens.push(fw.try_sub(&MPoly::one(&big))?);
    Ok(buchberger(&Ideal::new(&big, gens)?, budget)?.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn ring(q: u64, vars: &[&str]) -> RingRef {
        Ring::new(FieldCtx::canonical(q).unwrap(), vars).unwrap()
    }

    #[test]
    fn trivial_bases() {
        let r = ring(7, &["x", "y"]);
        let b = Budget::default();
        let i = Ideal::new(&r, vec![parse_poly(&r, "x").unwrap(), parse_poly(&r, "y").unwrap()]).unwrap();
        let gb = buchberger(&i, &b).unwrap();
        assert_eq!(gb.polys().len(), 2);
        let i = Ideal::new(&r, vec![parse_poly(&r, "x^2+y").unwrap(), MPoly::one(&r)]).unwrap();
        assert!(buchberger(&i, &b).unwrap().is_one());
    }

    #[test]
    fn cyclic3_verifies() {
        let r = ring(11, &["x", "y", "z"]);
        let g = ["x+y+z", "x*y+y*z+z*x", "x*y*z-1"].map(|s| parse_poly(&r, s).unwrap());
        let gb = buchberger(&Ideal::new(&r, g.to_vec()).unwrap(), &Budget::default()).unwrap();
        assert!(gb.verify());
        for s in g {
            assert!(gb.contains(&s));
        }
    }

    #[test]
    fn solve_simple() {
        let r = ring(11, &["a"]);
        let i = Ideal::new(&r, vec![parse_poly(&r, "a^2-1").unwrap()]).unwrap();
        let s = solve_over_fq(&i, &Budget::default()).unwrap();
        assert_eq!(s.points, vec![vec![FieldElem(1)], vec![FieldElem(10)]]);
    }

    #[test]
    fn rabinowitsch() {
        let r = ring(11, &["x", "y"]);
        let b = Budget::default();
        let x = parse_poly(&r, "x").unwrap();
        let i = Ideal::new(&r, vec![parse_poly(&r, "x^2").unwrap()]).unwrap();
        assert!(radical_vanishes(&x, &i, &b).unwrap());
        let i = Ideal::new(&r, vec![parse_poly(&r, "y").unwrap()]).unwrap();
        assert!(!radical_vanishes(&x, &i, &b).unwrap());
    }
}
