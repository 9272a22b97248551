//! Hasse-Witt matrices of quintic models, numerically and with symbolic
//! coefficients.
//!
//! For a split or cuspidal model the matrix is read off `F^(p-1)` in the
//! basis `1/(x^a y^b z^c)` with `(a, b, c)` running over [`TRIPLES`]. For a
//! non-split model the coordinates are changed over `K(sqrt eps)` to make
//! the node split, the matrix is computed there and conjugated back to
//! `K`.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{quadratic_extension, FieldCtx, FieldElem, FieldError, QuadraticExtension};
use crate::mpoly::{MPoly, Monomial, PolyError, Ring, RingRef};
use crate::quintic::{NodeKind, QuinticModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HwError {
    #[error("entry ({0}, {1}) of the conjugated matrix does not descend to the base field")]
    DescentFailed(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent triples of the basis of regular differentials.
pub const TRIPLES: [[u32; 3]; 5] = [[3, 1, 1], [1, 3, 1], [2, 2, 1], [2, 1, 2], [1, 2, 2]];

/// `targets(p)[l][m] = p * T_l - T_m`: the monomial of `F^(p-1)` whose
/// coefficient is entry `(l, m)`.
pub fn targets(p: u32) -> [[[u32; 3]; 5]; 5] {
    let mut t = [[[0; 3]; 5]; 5];
    for l in 0..5 {
        for m in 0..5 {
            for k in 0..3 {
                t[l][m][k] = p * TRIPLES[l][k] - TRIPLES[m][k];
            }
        }
    }
    t
}

/// A 5x5 Hasse-Witt matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HwMatrix {
    pub field: FieldCtx,
    pub rows: [[FieldElem; 5]; 5],
}

impl HwMatrix {
    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_zero())
    }

    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.rows;
        let mut rank = 0;
        for col in 0..5 {
            let Some(piv) = (rank..5).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(rank, piv);
            let inv = f.inv(m[rank][col]);
            for r in 0..5 {
                if r != rank && !m[r][col].is_zero() {
                    let c = f.mul(m[r][col], inv);
                    for k in 0..5 {
                        m[r][k] = f.sub(m[r][k], f.mul(c, m[rank][k]));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn report(&self) -> HwReport {
        HwReport {
            rows: self.rows.iter().map(|r| r.iter().map(|&c| self.field.format(c)).collect()).collect(),
            rank: self.rank(),
            superspecial: self.is_zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwReport {
    pub rows: Vec<Vec<String>>,
    pub rank: usize,
    pub superspecial: bool,
}

/// Hasse-Witt entries as polynomials in the symbolic coefficients of a
/// model (the variables after `x, y, z`), row-major.
#[derive(Clone, Debug)]
pub struct SymbolicHw {
    pub ring: RingRef,
    pub entries: Vec<MPoly>,
}

impl SymbolicHw {
    /// Nonzero entries made monic, without repetitions.
    pub fn distinct_equations(&self) -> Vec<MPoly> {
        let mut out: Vec<MPoly> = Vec::new();
        for e in &self.entries {
            if e.is_zero() {
                continue;
            }
            let m = e.monic();
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }
}

/// `f^e` keeping only terms whose exponents of the first variables stay
/// within `bounds`. Exponents only grow under multiplication, so the
/// discarded terms cannot contribute to any monomial within bounds.
fn bounded_pow(f: &MPoly, e: u32, bounds: &[u32]) -> Result<MPoly, PolyError> {
    let within = |m: Monomial| bounds.iter().enumerate().all(|(i, &b)| m.exponent(i) <= b);
    if f.total_degree().unwrap_or(0) as u64 * e as u64 > crate::mpoly::MAX_DEGREE as u64 {
        return Err(PolyError::DegreeOverflow);
    }
    let field = f.field();
    let base = f.filter_terms(within);
    let mut acc = MPoly::one(f.ring());
    for _ in 0..e {
        let mut map: FxHashMap<Monomial, FieldElem> = FxHashMap::default();
        map.reserve(acc.len() * 2);
        for &(m1, c1) in acc.terms() {
            for &(m2, c2) in base.terms() {
                let m = m1.mul(m2);
                if within(m) {
                    let slot = map.entry(m).or_insert(FieldElem::ZERO);
                    *slot = field.mul_add(*slot, c1, c2);
                }
            }
        }
        acc = MPoly::from_terms(f.ring(), map.into_iter().filter(|t| !t.1.is_zero()));
    }
    Ok(acc)
}

fn unknown_ring(ring: &RingRef, field: &FieldCtx) -> Result<RingRef, PolyError> {
    Ring::new(field.clone(), &ring.vars()[3..])
}

/// Entries for a split-node or cuspidal model (also valid for any form
/// with the node already split over its coefficient field).
pub fn symbolic_split_cusp(form: &MPoly) -> Result<SymbolicHw, HwError> {
    let field = form.field().clone();
    let p = field.p();
    let u = unknown_ring(form.ring(), &field)?;
    let t = targets(p);
    let h = bounded_pow(form, p - 1, &[3 * p - 1, 3 * p - 1, 2 * p - 1])?;
    let mut index: FxHashMap<Monomial, usize> = FxHashMap::default();
    for l in 0..5 {
        for m in 0..5 {
            index.insert(Monomial::from_exponents(&t[l][m])?, 5 * l + m);
        }
    }
    let mut buckets: Vec<Vec<(Monomial, FieldElem)>> = vec![Vec::new(); 25];
    for &(m, c) in h.terms() {
        if let Some(&k) = index.get(&m.prefix(3)) {
            buckets[k].push((m.suffix(3), c));
        }
    }
    let entries = buckets.into_iter().map(|b| MPoly::from_terms(&u, b)).collect();
    Ok(SymbolicHw { ring: u, entries })
}

/// Whether the split-basis matrix `H'` is read in row convention (entry
/// `(i, j)` is the coefficient at `p*T_i - T_j`) before conjugation.
const ROW_CONVENTION: bool = true;

/// Entries for a non-split model `(x^2 - eps y^2) z^3 + ...`.
pub fn symbolic_nonsplit(form: &MPoly, eps: FieldElem) -> Result<SymbolicHw, HwError> {
    let ext = quadratic_extension(form.field(), eps)?;
    let root = ext.sqrt_eps;
    symbolic_nonsplit_with_root(form, &ext, root, ROW_CONVENTION)
}

/// As [`symbolic_nonsplit`] with an explicit choice of `sqrt(eps)` and of
/// the reading convention for `H'`. Exposed so that independence of these
/// choices can be tested.
pub fn symbolic_nonsplit_with_root(
    form: &MPoly,
    ext: &QuadraticExtension,
    root: FieldElem,
    row_convention: bool,
) -> Result<SymbolicHw, HwError> {
    let k = form.field().clone();
    let big = ext.field.clone();
    let p = k.p();
    let u_small = unknown_ring(form.ring(), &k)?;
    let u_big = unknown_ring(form.ring(), &big)?;
    let ring_big = form.ring().with_field(big.clone());
    let f_big = form.embed(&ring_big, &ext.embedding)?;
    let h = bounded_pow(&f_big, p - 1, &[u32::MAX, u32::MAX, 2 * p - 1])?;

    // x -> (X + Y)/2, y -> (X - Y)/(-2 root): the coefficient of X^a Y^(n-a)
    // in x^i y^j.
    let two_inv = big.inv(big.from_int(2));
    let cy = big.inv(big.neg(big.mul(big.from_int(2), root)));
    let n_max = 5 * (p - 1) as usize;
    let mut binom = vec![vec![FieldElem::ZERO; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        binom[n][0] = FieldElem::ONE;
        for r in 1..=n {
            binom[n][r] = big.add(binom[n - 1][r - 1], if r < n { binom[n - 1][r] } else { FieldElem::ZERO });
        }
    }
    let mut change: FxHashMap<(u32, u32, u32), FieldElem> = FxHashMap::default();
    let mut coef = |i: u32, j: u32, a: u32| -> FieldElem {
        *change.entry((i, j, a)).or_insert_with(|| {
            let mut s = FieldElem::ZERO;
            for t in 0..=i.min(a) {
                let r = a - t;
                if r > j {
                    continue;
                }
                let mut term = big.mul(binom[i as usize][t as usize], binom[j as usize][r as usize]);
                if (j - r) % 2 == 1 {
                    term = big.neg(term);
                }
                s = big.add(s, term);
            }
            big.mul(s, big.mul(big.pow(two_inv, i as u64), big.pow(cy, j as u64)))
        })
    };

    let t = targets(p);
    // Targets grouped by (z exponent, x + y degree).
    let mut by_shape: FxHashMap<(u32, u32), Vec<(u32, usize)>> = FxHashMap::default();
    for l in 0..5 {
        for m in 0..5 {
            let [a, b, c] = t[l][m];
            let slot = if row_convention { 5 * l + m } else { 5 * m + l };
            by_shape.entry((c, a + b)).or_default().push((a, slot));
        }
    }
    let mut buckets: Vec<FxHashMap<Monomial, FieldElem>> = vec![FxHashMap::default(); 25];
    for &(m, c) in h.terms() {
        let (i, j, z) = (m.exponent(0), m.exponent(1), m.exponent(2));
        let Some(list) = by_shape.get(&(z, i + j)) else { continue };
        let rest = m.suffix(3);
        for &(a, slot) in list {
            let w = coef(i, j, a);
            if !w.is_zero() {
                let e = buckets[slot].entry(rest).or_insert(FieldElem::ZERO);
                *e = big.mul_add(*e, c, w);
            }
        }
    }
    let hp: Vec<MPoly> =
        buckets.into_iter().map(|b| MPoly::from_terms(&u_big, b.into_iter().filter(|t| !t.1.is_zero()))).collect();

    // H = P^(p) H' P^-1.
    let si = big.inv(root);
    let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
    let nsi = big.neg(si);
    let pm = [
        [o, o, z, z, z],
        [si, nsi, z, z, z],
        [z, z, o, z, z],
        [z, z, z, o, o],
        [z, z, z, si, nsi],
    ];
    let pp = pm.map(|r| r.map(|c| big.frobenius(c, 1)));
    let pinv = invert5(&big, &pm).expect("P is invertible");
    let mut tmp: Vec<MPoly> = Vec::with_capacity(25);
    for r in 0..5 {
        for c in 0..5 {
            let mut acc = MPoly::zero(&u_big);
            for l in 0..5 {
                if !pinv[l][c].is_zero() && !hp[5 * r + l].is_zero() {
                    acc = acc.try_add(&hp[5 * r + l].scale(pinv[l][c]))?;
                }
            }
            tmp.push(acc);
        }
    }
    let mut entries = Vec::with_capacity(25);
    for r in 0..5 {
        for c in 0..5 {
            let mut acc = MPoly::zero(&u_big);
            for l in 0..5 {
                if !pp[r][l].is_zero() && !tmp[5 * l + c].is_zero() {
                    acc = acc.try_add(&tmp[5 * l + c].scale(pp[r][l]))?;
                }
            }
            let down = acc.descend(&u_small, &ext.embedding).ok_or(HwError::DescentFailed(r, c))?;
            entries.push(down);
        }
    }
    Ok(SymbolicHw { ring: u_small, entries })
}

fn invert5(f: &FieldCtx, m: &[[FieldElem; 5]; 5]) -> Option<[[FieldElem; 5]; 5]> {
    let mut a = *m;
    let mut inv = [[FieldElem::ZERO; 5]; 5];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = FieldElem::ONE;
    }
    for col in 0..5 {
        let piv = (col..5).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = f.inv(a[col][col]);
        for k in 0..5 {
            a[col][k] = f.mul(a[col][k], d);
            inv[col][k] = f.mul(inv[col][k], d);
        }
        for r in 0..5 {
            if r != col && !a[r][col].is_zero() {
                let c = a[r][col];
                for k in 0..5 {
                    a[r][k] = f.sub(a[r][k], f.mul(c, a[col][k]));
                    inv[r][k] = f.sub(inv[r][k], f.mul(c, inv[col][k]));
                }
            }
        }
    }
    Some(inv)
}

/// Symbolic entries for a model, dispatched on its node type.
pub fn symbolic_hasse_witt(model: &QuinticModel) -> Result<SymbolicHw, HwError> {
    match model.case().kind() {
        NodeKind::SplitNode | NodeKind::Cusp => symbolic_split_cusp(model.form()),
        NodeKind::NonSplitNode => symbolic_nonsplit(model.form(), model.eps().expect("checked at construction")),
    }
}

fn to_matrix(field: &FieldCtx, s: &SymbolicHw) -> HwMatrix {
    let mut rows = [[FieldElem::ZERO; 5]; 5];
    for (k, e) in s.entries.iter().enumerate() {
        rows[k / 5][k % 5] = e.constant_value().expect("no symbolic coefficients");
    }
    HwMatrix { field: field.clone(), rows }
}

/// The Hasse-Witt matrix of a concrete model.
///
/// # Panics
/// Panics if the model has symbolic coefficients.
pub fn hasse_witt(model: &QuinticModel) -> Result<HwMatrix, HwError> {
    assert!(!model.is_symbolic(), "hasse_witt needs a concrete model");
    Ok(to_matrix(model.field(), &symbolic_hasse_witt(model)?))
}

pub fn is_superspecial(model: &QuinticModel) -> Result<bool, HwError> {
    Ok(hasse_witt(model)?.is_zero())
}

/// The matrix computed directly from `F^(p-1)` without any change of
/// coordinates. For a non-split model this is the matrix in a basis that
/// is only defined over `K(sqrt eps)`, hence not comparable entrywise.
pub fn hasse_witt_plain(form: &MPoly) -> Result<HwMatrix, HwError> {
    Ok(to_matrix(form.field(), &symbolic_split_cusp(form)?))
}
