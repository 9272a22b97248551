//! Isomorphisms, automorphism groups, twisted conjugacy classes and point
//! counts for quintic models with their singular point at `(0:0:1)`.
//!
//! A transformation is a matrix `M = [[a, b, 0], [c, d, 0], [e, f, 1]]`
//! acting by `(M.F)(v) = F(M v)`. Two models are isomorphic when
//! `M.F = lambda F'` has a solution with `lambda * g * (ad - bc) = 1`.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{extension_of_degree, FieldCtx, FieldElem, FieldError};
use crate::groebner::{buchberger, solve_over_fq, solve_zero_dim, Budget, GroebnerError, Ideal};
use crate::mpoly::{MPoly, PolyError, Ring, MAX_DEGREE};
use crate::quintic::{
    classify_singularity, geometry_ring, is_quintic_form, linear_change, move_to_origin, node_split_type, projective_points,
    z3_part, ModelError, NodeKind, QuadraticType, SingularityStatus,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("forms must be quintics over the same field")]
    BadInput,
    #[error("no witness over F_(q^m) for m up to {0}")]
    WitnessBound(u32),
    #[error("the singular point is not a genus-5 double point")]
    NotGenus5,
    #[error("extension of order {0} is too large to scan")]
    TooLarge(u64),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where isomorphisms may be defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Over {
    Base,
    Closure,
}

/// Largest extension degree tried when looking for witnesses over the
/// algebraic closure.
pub const DEFAULT_WITNESS_CAP: u32 = 6;

/// A 3x3 matrix `[[a, b, 0], [c, d, 0], [e, f, 1]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjMatrix(pub [[FieldElem; 3]; 3]);

impl ProjMatrix {
    pub fn identity() -> Self {
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        ProjMatrix([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn mul(&self, o: &ProjMatrix, f: &FieldCtx) -> ProjMatrix {
        let mut r = [[FieldElem::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = FieldElem::ZERO;
                for k in 0..3 {
                    s = f.mul_add(s, self.0[i][k], o.0[k][j]);
                }
                r[i][j] = s;
            }
        }
        ProjMatrix(r)
    }

    pub fn frobenius(&self, f: &FieldCtx, e: u32) -> ProjMatrix {
        ProjMatrix(self.0.map(|r| r.map(|c| f.frobenius(c, e))))
    }

    /// `F(M v)` for a form in `x, y, z`.
    pub fn act(&self, form: &MPoly) -> Result<MPoly, PolyError> {
        linear_change(form, &self.0)
    }

    pub fn format(&self, f: &FieldCtx) -> Vec<Vec<String>> {
        self.0.iter().map(|r| r.iter().map(|&c| f.format(c)).collect()).collect()
    }
}

/// An isomorphism `M.F = lambda F'` with its field.
#[derive(Clone, Debug)]
pub struct Witness {
    pub field: FieldCtx,
    pub matrix: ProjMatrix,
    pub lambda: FieldElem,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.matrix.format(&self.field).into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}] lambda = {}", rows.join(", "), self.field.format(self.lambda))
    }
}

const UNKNOWNS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "l", "g"];

/// The system `M.F - lambda F' = 0`, `lambda g (ad - bc) = 1` in the
/// unknowns `a, b, c, d, e, f, l, g`.
pub fn isomorphism_system(f: &MPoly, f2: &MPoly) -> Result<Ideal, ClassifyError> {
    let field = f.field().clone();
    if f2.field() != &field || !is_quintic_form(f) || !is_quintic_form(f2) {
        return Err(ClassifyError::BadInput);
    }
    let mut names = vec!["x", "y", "z"];
    names.extend(UNKNOWNS);
    let big = Ring::new(field.clone(), &names)?;
    let v = |i: usize| MPoly::var(&big, i);
    let (x, y, z) = (v(0), v(1), v(2));
    let (a, b, c, d, e, ff, l, g) = (v(3), v(4), v(5), v(6), v(7), v(8), v(9), v(10));
    let images = vec![
        &(&a * &x) + &(&b * &y),
        &(&c * &x) + &(&d * &y),
        &(&(&e * &x) + &(&ff * &y)) + &z,
    ];
    let to_big: Vec<usize> = vec![0, 1, 2];
    let lhs = f.compose(&images)?;
    let rhs = &f2.rename_into(&big, &to_big)? * &l;
    let diff = &lhs - &rhs;
    let unknowns = Ring::new(field, &UNKNOWNS)?;
    let mut gens: Vec<MPoly> = diff.split_prefix(3, &unknowns).into_iter().map(|(_, c)| c).collect();
    let det = &(&a * &d) - &(&b * &c);
    let nv = &(&(&l * &g) * &det) - &MPoly::one(&big);
    gens.push(nv.split_prefix(3, &unknowns).remove(0).1);
    Ok(Ideal::new(&unknowns, gens)?)
}

fn witness_from(field: &FieldCtx, pt: &[FieldElem]) -> Witness {
    let z = FieldElem::ZERO;
    Witness {
        field: field.clone(),
        matrix: ProjMatrix([[pt[0], pt[1], z], [pt[2], pt[3], z], [pt[4], pt[5], FieldElem::ONE]]),
        lambda: pt[6],
    }
}

/// All solutions of a zero-dimensional system over `F_(q^m)`.
fn points_over(ideal: &Ideal, m: u32, budget: &Budget) -> Result<(FieldCtx, Vec<Vec<FieldElem>>), ClassifyError> {
    let field = ideal.ring().field().clone();
    let (big, emb) = extension_of_degree(&field, m)?;
    let ring = ideal.ring().with_field(big.clone());
    let gens = ideal.gens().iter().map(|g| g.embed(&ring, &emb)).collect::<Result<Vec<_>, _>>()?;
    let embedded = Ideal::new(&ring, gens)?;
    let pts = if big.order() <= MAX_DEGREE {
        solve_over_fq(&embedded, budget)?.points
    } else {
        solve_zero_dim(&embedded, budget)?
    };
    Ok((big, pts))
}

/// Number of points of a zero-dimensional ideal over the closure,
/// counted with multiplicity.
fn vdim(ideal: &Ideal, budget: &Budget) -> Result<Option<usize>, ClassifyError> {
    let gb = buchberger(ideal, budget)?;
    if gb.is_one() {
        return Ok(Some(0));
    }
    let all: Vec<usize> = (0..ideal.ring().nvars()).collect();
    Ok(gb.standard_monomials(&all, budget.max_quotient).map(|s| s.len()))
}

/// Decides whether two models are isomorphic and returns a witness.
pub fn are_isomorphic(f: &MPoly, f2: &MPoly, over: Over, budget: &Budget) -> Result<Option<Witness>, ClassifyError> {
    are_isomorphic_capped(f, f2, over, budget, DEFAULT_WITNESS_CAP)
}

pub fn are_isomorphic_capped(
    f: &MPoly,
    f2: &MPoly,
    over: Over,
    budget: &Budget,
    cap: u32,
) -> Result<Option<Witness>, ClassifyError> {
    let ideal = isomorphism_system(f, f2)?;
    match over {
        Over::Base => {
            let pts = solve_over_fq(&ideal, budget)?.points;
            Ok(pts.first().map(|p| witness_from(f.field(), p)))
        }
        Over::Closure => {
            if buchberger(&ideal, budget)?.is_one() {
                return Ok(None);
            }
            for m in 1..=cap {
                let (big, pts) = points_over(&ideal, m, budget)?;
                if let Some(p) = pts.first() {
                    return Ok(Some(witness_from(&big, p)));
                }
            }
            Err(ClassifyError::WitnessBound(cap))
        }
    }
}

/// A finite group of normalized matrices over `field`.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub field: FieldCtx,
    /// Elements sorted, identity first.
    pub elements: Vec<ProjMatrix>,
    pub generators: Vec<ProjMatrix>,
    pub name: Option<String>,
    /// Right-multiplication permutations of the generators on `elements`.
    pub permutations: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutReport {
    pub field: String,
    pub order: usize,
    pub name: String,
    pub generators: Vec<Vec<Vec<String>>>,
    pub generator_orders: Vec<usize>,
    pub permutations: Vec<Vec<usize>>,
}

impl AutGroup {
    pub fn from_elements(field: FieldCtx, mut elements: Vec<ProjMatrix>) -> Self {
        elements.sort();
        elements.dedup();
        let id = ProjMatrix::identity();
        if let Some(i) = elements.iter().position(|m| *m == id) {
            let e = elements.remove(i);
            elements.insert(0, e);
        }
        let table = Table::new(&field, &elements);
        let generators: Vec<usize> = table.generators();
        let name = recognize(&table);
        let permutations = generators.iter().map(|&g| (0..table.n).map(|i| table.mul[i][g]).collect()).collect();
        AutGroup { generators: generators.iter().map(|&g| elements[g]).collect(), field, elements, name, permutations }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element_order(&self, m: &ProjMatrix) -> usize {
        let id = ProjMatrix::identity();
        let mut k = 1;
        let mut acc = *m;
        while acc != id {
            acc = acc.mul(m, &self.field);
            k += 1;
        }
        k
    }

    pub fn report(&self) -> AutReport {
        AutReport {
            field: format!("{:?}", self.field),
            order: self.order(),
            name: self.name.clone().unwrap_or_else(|| "unrecognized".into()),
            generators: self.generators.iter().map(|g| g.format(&self.field)).collect(),
            generator_orders: self.generators.iter().map(|g| self.element_order(g)).collect(),
            permutations: self.permutations.clone(),
        }
    }
}

/// Multiplication table of a finite group given by its elements.
struct Table {
    n: usize,
    mul: Vec<Vec<usize>>,
}

impl Table {
    fn new(field: &FieldCtx, elements: &[ProjMatrix]) -> Self {
        let index: FxHashMap<ProjMatrix, usize> = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mul = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&a.mul(b, field)]).collect())
            .collect();
        Table { n: elements.len(), mul }
    }

    fn from_mul(mul: Vec<Vec<usize>>) -> Self {
        Table { n: mul.len(), mul }
    }

    fn identity(&self) -> usize {
        (0..self.n).find(|&i| (0..self.n).all(|j| self.mul[i][j] == j)).expect("group has an identity")
    }

    fn order_of(&self, g: usize) -> usize {
        let e = self.identity();
        let mut k = 1;
        let mut acc = g;
        while acc != e {
            acc = self.mul[acc][g];
            k += 1;
        }
        k
    }

    fn closure(&self, gens: &[usize]) -> FxHashSet<usize> {
        let mut set: FxHashSet<usize> = FxHashSet::default();
        set.insert(self.identity());
        let mut frontier: Vec<usize> = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul[x][g];
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// Greedy generating set, trying elements of larger order first.
    fn generators(&self) -> Vec<usize> {
        let mut cands: Vec<usize> = (0..self.n).collect();
        cands.sort_by_key(|&g| (std::cmp::Reverse(self.order_of(g)), g));
        let mut gens = Vec::new();
        let mut span = self.closure(&gens);
        for g in cands {
            if span.len() == self.n {
                break;
            }
            if !span.contains(&g) {
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn fingerprint(&self) -> Fingerprint {
        let abelian = (0..self.n).all(|i| (0..self.n).all(|j| self.mul[i][j] == self.mul[j][i]));
        let mut orders: Vec<usize> = (0..self.n).map(|g| self.order_of(g)).collect();
        orders.sort();
        let center = (0..self.n).filter(|&i| (0..self.n).all(|j| self.mul[i][j] == self.mul[j][i])).count();
        Fingerprint { order: self.n, abelian, orders, center }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Fingerprint {
    order: usize,
    abelian: bool,
    orders: Vec<usize>,
    center: usize,
}

/// Groups built as multiplication tables, for fingerprint matching.
fn cyclic(n: usize) -> Table {
    Table::from_mul((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
}

/// Elements `r^i s^e` indexed `i + n*e`, with `s r s^-1 = r^-1` and
/// `s^2 = r^(n*t/2)` (t = 0 dihedral, t = 1 dicyclic with n even).
fn dihedral_like(n: usize, dicyclic: bool) -> Table {
    let m = 2 * n;
    let mut mul = vec![vec![0; m]; m];
    let s2 = if dicyclic { n / 2 } else { 0 };
    for a in 0..m {
        for b in 0..m {
            let (i, e) = (a % n, a / n);
            let (j, f) = (b % n, b / n);
            // r^i s^e r^j s^f = r^(i +- j) s^(e+f)
            let k = if e == 0 { (i + j) % n } else { (i + n - j) % n };
            let (k, g) = if e + f == 2 { ((k + s2) % n, 0) } else { (k, e + f) };
            mul[a][b] = k + n * g;
        }
    }
    Table::from_mul(mul)
}

fn permutation_group(gens: &[Vec<usize>]) -> Table {
    let deg = gens[0].len();
    let id: Vec<usize> = (0..deg).collect();
    let mut elems = vec![id.clone()];
    let mut index: FxHashMap<Vec<usize>, usize> = FxHashMap::default();
    index.insert(id, 0);
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p: Vec<usize> = (0..deg).map(|k| g[elems[i][k]]).collect();
            if !index.contains_key(&p) {
                index.insert(p.clone(), elems.len());
                elems.push(p);
            }
        }
        i += 1;
    }
    let mul = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[&(0..deg).map(|k| b[a[k]]).collect::<Vec<_>>()]).collect())
        .collect();
    Table::from_mul(mul)
}

fn direct_product(a: &Table, b: &Table) -> Table {
    let n = a.n * b.n;
    let mul = (0..n)
        .map(|x| (0..n).map(|y| a.mul[x / b.n][y / b.n] * b.n + b.mul[x % b.n][y % b.n]).collect())
        .collect();
    Table::from_mul(mul)
}

fn catalog(order: usize) -> Vec<(String, Table)> {
    let mut out: Vec<(String, Table)> = Vec::new();
    let with_cyclic = |k: usize, name: String, t: Table| -> (String, Table) {
        if k == 1 {
            (name, t)
        } else {
            (format!("C{k} x {name}"), direct_product(&cyclic(k), &t))
        }
    };
    for k in 1..=order {
        if order % k != 0 {
            continue;
        }
        let rest = order / k;
        if rest % 2 == 0 && rest / 2 >= 3 {
            let m = rest / 2;
            out.push(with_cyclic(k, format!("D{m}"), dihedral_like(m, false)));
        }
        if rest % 4 == 0 && rest / 4 >= 2 {
            let m = rest / 4;
            let name = if m == 2 { "Q8".to_string() } else { format!("Dic{m}") };
            out.push(with_cyclic(k, name, dihedral_like(2 * m, true)));
        }
        if rest == 12 {
            out.push(with_cyclic(k, "A4".into(), permutation_group(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])));
        }
        if rest == 24 {
            out.push(with_cyclic(k, "S4".into(), permutation_group(&[vec![1, 2, 3, 0], vec![1, 0, 2, 3]])));
        }
        if rest == 60 {
            out.push(with_cyclic(k, "A5".into(), permutation_group(&[vec![1, 2, 3, 4, 0], vec![1, 2, 0, 3, 4]])));
        }
    }
    out
}

/// Invariant factors of an abelian group from its element orders.
fn abelian_name(fp: &Fingerprint) -> String {
    if fp.order == 1 {
        return "C1".into();
    }
    // For each prime p, the number of elements with order dividing p^k
    // determines the p-part.
    let mut primes: Vec<usize> = Vec::new();
    let mut n = fp.order;
    let mut p = 2;
    while n > 1 {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    // Partition exponents per prime: e_1 >= e_2 >= ...
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &p in &primes {
        let count = |k: u32| fp.orders.iter().filter(|&&o| p.pow(k) % o == 0).count();
        // log_p of |{x : x^(p^k) = 1}| - |{x : x^(p^(k-1)) = 1}| = number of
        // cyclic factors of exponent >= k.
        let mut ge: Vec<usize> = Vec::new();
        let mut k = 1;
        loop {
            let (hi, lo) = (count(k), count(k - 1));
            if hi == lo {
                break;
            }
            let mut r = 0;
            let mut v = hi / lo;
            while v > 1 {
                v /= p;
                r += 1;
            }
            ge.push(r);
            k += 1;
        }
        // exponents: number of factors with exponent exactly k.
        let mut exps: Vec<usize> = Vec::new();
        for (k, &c) in ge.iter().enumerate() {
            let next = ge.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(c - next) {
                exps.push(k + 1);
            }
        }
        exps.sort_by(|a, b| b.cmp(a));
        parts.push(exps.iter().map(|&e| p.pow(e as u32)).collect());
    }
    let len = parts.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<usize> = (0..len).map(|i| parts.iter().map(|v| v.get(i).copied().unwrap_or(1)).product()).collect();
    factors.sort();
    factors.iter().map(|f| format!("C{f}")).collect::<Vec<_>>().join(" x ")
}

fn recognize(t: &Table) -> Option<String> {
    let fp = t.fingerprint();
    if fp.abelian {
        return Some(abelian_name(&fp));
    }
    if fp.order > 120 {
        return None;
    }
    let matches: Vec<String> =
        catalog(fp.order).into_iter().filter(|(_, c)| c.fingerprint() == fp).map(|(n, _)| n).collect();
    if matches.len() == 1 {
        Some(matches[0].clone())
    } else {
        None
    }
}

/// The group of `M` with `M.F = lambda F`.
pub fn automorphism_group(f: &MPoly, over: Over, budget: &Budget) -> Result<AutGroup, ClassifyError> {
    automorphism_group_capped(f, over, budget, DEFAULT_WITNESS_CAP)
}

pub fn automorphism_group_capped(f: &MPoly, over: Over, budget: &Budget, cap: u32) -> Result<AutGroup, ClassifyError> {
    let ideal = isomorphism_system(f, f)?;
    let to_group = |field: &FieldCtx, pts: &[Vec<FieldElem>]| {
        AutGroup::from_elements(field.clone(), pts.iter().map(|p| witness_from(field, p).matrix).collect())
    };
    match over {
        Over::Base => {
            let pts = solve_over_fq(&ideal, budget)?.points;
            Ok(to_group(f.field(), &pts))
        }
        Over::Closure => {
            // The group is complete once the number of points found equals
            // the dimension of the quotient ring.
            let target = vdim(&ideal, budget)?.ok_or(GroebnerError::NotZeroDimensional)?;
            for m in 1..=cap {
                let (big, pts) = points_over(&ideal, m, budget)?;
                if pts.len() == target {
                    return Ok(to_group(&big, &pts));
                }
            }
            Err(ClassifyError::WitnessBound(cap))
        }
    }
}

/// Twisted conjugacy classes `a ~ g^-1 a sigma(g)` for the Frobenius
/// `sigma` of a subfield of order `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaClassReport {
    pub representatives: Vec<Vec<Vec<String>>>,
    pub class_sizes: Vec<usize>,
    pub stabilizer_orders: Vec<usize>,
}

pub fn sigma_classes(g: &AutGroup, q: u64) -> SigmaClassReport {
    let f = &g.field;
    let p = f.p() as u64;
    let mut e = 0u32;
    let mut t = 1u64;
    while t < q {
        t *= p;
        e += 1;
    }
    assert_eq!(t, q, "q must be a power of the characteristic");
    let elems = &g.elements;
    let index: FxHashMap<ProjMatrix, usize> = elems.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let id = ProjMatrix::identity();
    let inverse: Vec<usize> =
        elems.iter().map(|a| (0..elems.len()).find(|&j| a.mul(&elems[j], f) == id).expect("closed group")).collect();
    let sigma: Vec<usize> = elems.iter().map(|a| index[&a.frobenius(f, e)]).collect();
    let mut class_of = vec![usize::MAX; elems.len()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut stabs = Vec::new();
    for a in 0..elems.len() {
        if class_of[a] != usize::MAX {
            continue;
        }
        let cls = reps.len();
        let mut stab = 0;
        let mut members = FxHashSet::default();
        for h in 0..elems.len() {
            let conj = elems[inverse[h]].mul(&elems[a], f).mul(&elems[sigma[h]], f);
            let c = index[&conj];
            members.insert(c);
            if c == a {
                stab += 1;
            }
        }
        for &m in &members {
            class_of[m] = cls;
        }
        reps.push(elems[a].format(f));
        sizes.push(members.len());
        stabs.push(stab);
    }
    SigmaClassReport { representatives: reps, class_sizes: sizes, stabilizer_orders: stabs }
}

/// Number of `F_(q^s)`-points on the desingularization: smooth points of
/// the plane model plus the rational branches at the double point.
pub fn count_points(f: &MPoly, s: u32, budget: &Budget) -> Result<u64, ClassifyError> {
    let base = f.field().clone();
    let report = classify_singularity(f, budget)?;
    let (kind, point) = match report.status {
        SingularityStatus::UniqueDouble { kind, point } if report.genus5_ok => (kind, point),
        _ => return Err(ClassifyError::NotGenus5),
    };
    let (big, emb) = extension_of_degree(&base, s)?;
    let order = big.order() as u64;
    if order > 4096 {
        return Err(ClassifyError::TooLarge(order));
    }
    let ring = geometry_ring(&big);
    let g = f.embed(&ring, &emb)?;
    let parts = [g.derivative(0), g.derivative(1), g.derivative(2)];
    let mut smooth = 0u64;
    for pt in projective_points(&big) {
        if g.eval(&pt)?.is_zero() && !parts.iter().all(|d| d.eval(&pt).map(|v| v.is_zero()).unwrap_or(false)) {
            smooth += 1;
        }
    }
    let branches = match kind {
        NodeKind::Cusp => 1,
        _ => {
            let moved = if point == [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE] {
                f.clone()
            } else {
                linear_change(f, &move_to_origin(point))?
            };
            let q = z3_part(&moved).map(|c| emb.apply(c));
            match node_split_type(&big, q) {
                QuadraticType::Split => 2,
                _ => 0,
            }
        }
    };
    Ok(smooth + branches)
}

/// Partition of forms into isomorphism classes (indices into `forms`),
/// using point counts over the quadratic extension as a pre-filter for
/// the base field.
pub fn isomorphism_classes(forms: &[MPoly], over: Over, budget: &Budget) -> Result<Vec<Vec<usize>>, ClassifyError> {
    let keys: Vec<Option<u64>> = match over {
        Over::Base => forms.iter().map(|f| count_points(f, 2, budget).map(Some)).collect::<Result<_, _>>()?,
        Over::Closure => vec![None; forms.len()],
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'forms: for (i, f) in forms.iter().enumerate() {
        for cls in classes.iter_mut() {
            let r = cls[0];
            if keys[r] != keys[i] {
                continue;
            }
            if are_isomorphic(&forms[r], f, over, budget)?.is_some() {
                cls.push(i);
                continue 'forms;
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}

/// Sorted multiset helper used by reports.
pub fn multiset(v: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &x in v {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn form(q: u64, s: &str) -> MPoly {
        parse_poly(&geometry_ring(&FieldCtx::canonical(q).unwrap()), s).unwrap()
    }

    fn f11() -> Vec<MPoly> {
        ["x*y*z^3 + x^5 + y^5", "x*y*z^3 + 2*x^5 + y^5", "x*y*z^3 + 3*x^5 + y^5", "(x^2 - 2*y^2)*z^3 + x^5 + 9*x^3*y^2 + 9*x*y^4"]
            .iter()
            .map(|s| form(11, s))
            .collect()
    }

    #[test]
    fn group_recognition() {
        assert_eq!(recognize(&cyclic(10)).as_deref(), Some("C10"));
        assert_eq!(recognize(&direct_product(&cyclic(2), &cyclic(4))).as_deref(), Some("C2 x C4"));
        assert_eq!(recognize(&dihedral_like(5, false)).as_deref(), Some("D5"));
        assert_eq!(recognize(&direct_product(&cyclic(3), &dihedral_like(5, false))).as_deref(), Some("C3 x D5"));
        assert_eq!(recognize(&dihedral_like(4, true)).as_deref(), Some("Q8"));
        assert_eq!(recognize(&permutation_group(&[vec![1, 2, 3, 0], vec![1, 0, 2, 3]])).as_deref(), Some("S4"));
    }

    #[test]
    fn automorphisms_over_f11() {
        let b = Budget::default();
        let orders: Vec<usize> = f11().iter().map(|f| automorphism_group(f, Over::Base, &b).unwrap().order()).collect();
        assert_eq!(orders, vec![10, 5, 5, 2]);
    }

    #[test]
    fn points_over_f121() {
        let b = Budget::default();
        let pts: Vec<u64> = f11().iter().map(|f| count_points(f, 2, &b).unwrap()).collect();
        assert_eq!(pts, vec![232, 122, 122, 232]);
    }

    #[test]
    fn pairwise_non_isomorphic_over_base() {
        let b = Budget::default();
        let fs = f11();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(are_isomorphic(&fs[i], &fs[j], Over::Base, &b).unwrap().is_none(), "{i} {j}");
            }
        }
    }
}
