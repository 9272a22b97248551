//! Sparse multivariate polynomials over a finite field.
//!
//! Monomials are packed into a `u128`: byte `i` holds the exponent of
//! variable `i` (at most 15 variables) and the top byte holds the total
//! degree, which is capped at 255. With this layout monomial multiplication
//! is integer addition and the graded reverse lexicographic order (variable
//! 0 largest) is an integer comparison after flipping the exponent bytes.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::ff::{Embedding, FieldCtx, FieldElem};

pub const MAX_VARS: usize = 15;
pub const MAX_DEGREE: u32 = 255;

const DEG_SHIFT: u32 = 120;
const VAR_MASK: u128 = (1u128 << DEG_SHIFT) - 1;
const EVEN_BYTES: u128 = 0x00ff_00ff_00ff_00ff_00ff_00ff_00ff_00ff;
const EVEN_GUARD: u128 = 0x0100_0100_0100_0100_0100_0100_0100_0100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("expected {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("a ring supports at most {MAX_VARS} variables, got {0}")]
    TooManyVariables(usize),
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("degree exceeds {MAX_DEGREE}")]
    DegreeOverflow,
    #[error("substitution image is not linear")]
    NonLinearImage,
    #[error("variable {0:?} has no counterpart in the target ring")]
    MissingVariable(String),
}

/// A monomial in at most [`MAX_VARS`] variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u128);

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.exponents(MAX_VARS))
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(e: &[u32]) -> Result<Self, PolyError> {
        if e.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(e.len()));
        }
        let total: u32 = e.iter().sum();
        if total > MAX_DEGREE {
            return Err(PolyError::DegreeOverflow);
        }
        let mut m = (total as u128) << DEG_SHIFT;
        for (i, &x) in e.iter().enumerate() {
            m |= (x as u128) << (8 * i);
        }
        Ok(Monomial(m))
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS);
        Monomial((1u128 << DEG_SHIFT) | (1u128 << (8 * i)))
    }

    #[inline]
    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn exponents(self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.exponent(i)).collect()
    }

    /// Grevlex sort key: larger key means larger monomial.
    #[inline]
    pub fn key(self) -> u128 {
        self.0 ^ VAR_MASK
    }

    #[inline]
    pub fn cmp_grevlex(self, other: Self) -> Ordering {
        self.key().cmp(&other.key())
    }

    #[inline]
    pub fn checked_mul(self, o: Self) -> Option<Self> {
        if self.degree() + o.degree() > MAX_DEGREE {
            None
        } else {
            Some(Monomial(self.0 + o.0))
        }
    }

    /// # Panics
    /// Panics when the product exceeds the degree cap.
    #[inline]
    pub fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("monomial degree overflow")
    }

    /// Whether `self` divides `o`.
    #[inline]
    pub fn divides(self, o: Self) -> bool {
        let ae = self.0 & EVEN_BYTES;
        let be = o.0 & EVEN_BYTES;
        let ao = (self.0 >> 8) & EVEN_BYTES;
        let bo = (o.0 >> 8) & EVEN_BYTES;
        ((be | EVEN_GUARD).wrapping_sub(ae) & EVEN_GUARD) == EVEN_GUARD
            && ((bo | EVEN_GUARD).wrapping_sub(ao) & EVEN_GUARD) == EVEN_GUARD
    }

    /// `self / o`, assuming `o` divides `self`.
    #[inline]
    pub fn div(self, o: Self) -> Self {
        debug_assert!(o.divides(self));
        Monomial(self.0 - o.0)
    }

    pub fn lcm(self, o: Self) -> Self {
        let mut m = 0u128;
        let mut deg = 0u128;
        for i in 0..MAX_VARS {
            let e = self.exponent(i).max(o.exponent(i)) as u128;
            deg += e;
            m |= e << (8 * i);
        }
        assert!(deg <= MAX_DEGREE as u128, "monomial degree overflow");
        Monomial(m | (deg << DEG_SHIFT))
    }

    /// True when no variable occurs in both.
    pub fn coprime(self, o: Self) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) == 0 || o.exponent(i) == 0)
    }

    /// Keeps only the variables `0..n`.
    pub fn prefix(self, n: usize) -> Self {
        let mask = if n >= MAX_VARS { VAR_MASK } else { (1u128 << (8 * n)) - 1 };
        let v = self.0 & mask;
        Monomial(v | ((byte_sum(v) as u128) << DEG_SHIFT))
    }

    /// Drops variables `0..n` and shifts the rest down.
    pub fn suffix(self, n: usize) -> Self {
        let v = (self.0 & VAR_MASK) >> (8 * n);
        Monomial(v | ((byte_sum(v) as u128) << DEG_SHIFT))
    }

    /// Sets the exponent of variable `i` to zero.
    pub fn without(self, i: usize) -> Self {
        let e = self.exponent(i) as u128;
        Monomial(self.0 - (e << (8 * i)) - (e << DEG_SHIFT))
    }
}

fn byte_sum(v: u128) -> u32 {
    v.to_le_bytes()[..MAX_VARS].iter().map(|&b| b as u32).sum()
}

/// Coefficient field plus named variables; variable 0 has the highest
/// precedence in the grevlex order.
#[derive(PartialEq, Eq)]
pub struct Ring {
    field: FieldCtx,
    vars: Vec<String>,
}

pub type RingRef = Arc<Ring>;

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.field, self.vars.join(","))
    }
}

impl Ring {
    pub fn new<S: AsRef<str>>(field: FieldCtx, vars: &[S]) -> Result<RingRef, PolyError> {
        if vars.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(vars.len()));
        }
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(PolyError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(Ring { field, vars }))
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }
    pub fn vars(&self) -> &[String] {
        &self.vars
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Same variables over another field.
    pub fn with_field(&self, field: FieldCtx) -> RingRef {
        Arc::new(Ring { field, vars: self.vars.clone() })
    }
}

/// Sparse polynomial; terms are kept sorted by strictly decreasing grevlex
/// order with no zero coefficients.
#[derive(Clone)]
pub struct MPoly {
    ring: RingRef,
    terms: Vec<(Monomial, FieldElem)>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}
impl Eq for MPoly {}

#[inline]
pub fn same_ring(a: &RingRef, b: &RingRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn sort_terms(terms: &mut [(Monomial, FieldElem)]) {
    terms.sort_unstable_by(|a, b| b.0.key().cmp(&a.0.key()));
}

impl MPoly {
    pub fn zero(ring: &RingRef) -> Self {
        MPoly { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &RingRef, c: FieldElem) -> Self {
        Self::monomial(ring, Monomial::ONE, c)
    }

    pub fn one(ring: &RingRef) -> Self {
        Self::constant(ring, FieldElem::ONE)
    }

    pub fn var(ring: &RingRef, i: usize) -> Self {
        assert!(i < ring.nvars(), "variable index out of range");
        Self::monomial(ring, Monomial::var(i), FieldElem::ONE)
    }

    pub fn var_named(ring: &RingRef, name: &str) -> Option<Self> {
        ring.var_index(name).map(|i| Self::var(ring, i))
    }

    pub fn monomial(ring: &RingRef, m: Monomial, c: FieldElem) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        MPoly { ring: ring.clone(), terms }
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &RingRef, terms: impl IntoIterator<Item = (Monomial, FieldElem)>) -> Self {
        let f = ring.field();
        let mut map: FxHashMap<Monomial, FieldElem> = FxHashMap::default();
        for (m, c) in terms {
            let e = map.entry(m).or_insert(FieldElem::ZERO);
            *e = f.add(*e, c);
        }
        Self::from_map(ring, map)
    }

    fn from_map(ring: &RingRef, map: FxHashMap<Monomial, FieldElem>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        sort_terms(&mut terms);
        MPoly { ring: ring.clone(), terms }
    }

    /// Trusted constructor: terms already sorted, distinct and nonzero.
    pub(crate) fn from_sorted(ring: &RingRef, terms: Vec<(Monomial, FieldElem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0.key() > w[1].0.key()));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        MPoly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }
    pub fn field(&self) -> &FieldCtx {
        self.ring.field()
    }
    pub fn terms(&self) -> &[(Monomial, FieldElem)] {
        &self.terms
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Monomial::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || self.is_unit()
    }

    pub fn constant_value(&self) -> Option<FieldElem> {
        match self.terms.as_slice() {
            [] => Some(FieldElem::ZERO),
            [(m, c)] if *m == Monomial::ONE => Some(*c),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(Monomial, FieldElem)> {
        self.terms.first().copied()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.degree() == w[1].0.degree())
    }

    /// Coefficient of the monomial with exponent vector `e`.
    pub fn coeff(&self, e: &[u32]) -> FieldElem {
        match Monomial::from_exponents(e) {
            Ok(m) if e.len() <= self.ring.nvars() => self.coeff_mono(m),
            _ => FieldElem::ZERO,
        }
    }

    pub fn coeff_mono(&self, m: Monomial) -> FieldElem {
        let k = m.key();
        self.terms
            .binary_search_by(|t| k.cmp(&t.0.key()))
            .map(|i| self.terms[i].1)
            .unwrap_or(FieldElem::ZERO)
    }

    fn check(&self, o: &Self) -> Result<(), PolyError> {
        if same_ring(&self.ring, &o.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, PolyError> {
        self.check(o)?;
        Ok(self.add_scaled(o, FieldElem::ONE, Monomial::ONE))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, PolyError> {
        self.check(o)?;
        let m1 = self.field().neg(FieldElem::ONE);
        Ok(self.add_scaled(o, m1, Monomial::ONE))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, PolyError> {
        self.check(o)?;
        self.mul_checked(o)
    }

    /// `self + c * m * o` by a sorted merge.
    pub fn add_scaled(&self, o: &Self, c: FieldElem, m: Monomial) -> Self {
        let f = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (a, b) = (&self.terms, &o.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.extend_from_slice(&a[i..]);
                break;
            }
            let bm = b[j].0.mul(m);
            if i == a.len() {
                out.push((bm, f.mul(c, b[j].1)));
                j += 1;
                continue;
            }
            match a[i].0.key().cmp(&bm.key()) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bm, f.mul(c, b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = f.mul_add(a[i].1, c, b[j].1);
                    if !v.is_zero() {
                        out.push((bm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.retain(|t| !t.1.is_zero());
        MPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn scale(&self, c: FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        let f = self.field();
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|&(m, d)| (m, f.mul(c, d))).collect() }
    }

    /// Multiplies by a term; `None` on degree overflow.
    pub fn mul_term(&self, m: Monomial, c: FieldElem) -> Option<Self> {
        if c.is_zero() {
            return Some(Self::zero(&self.ring));
        }
        let f = self.field();
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(n, d) in &self.terms {
            terms.push((n.checked_mul(m)?, f.mul(c, d)));
        }
        Some(MPoly { ring: self.ring.clone(), terms })
    }

    pub fn neg(&self) -> Self {
        let f = self.field();
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|&(m, d)| (m, f.neg(d))).collect() }
    }

    /// Multiplies the polynomial by the inverse of its leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if c != FieldElem::ONE => self.scale(self.field().inv(c)),
            _ => self.clone(),
        }
    }

    fn mul_checked(&self, o: &Self) -> Result<Self, PolyError> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(&self.ring));
        }
        let (da, db) = (self.total_degree().unwrap(), o.total_degree().unwrap());
        if da + db > MAX_DEGREE {
            return Err(PolyError::DegreeOverflow);
        }
        let f = self.field();
        let (small, big) = if self.len() <= o.len() { (self, o) } else { (o, self) };
        let mut map: FxHashMap<Monomial, FieldElem> = FxHashMap::default();
        map.reserve(big.len() * small.len().min(8));
        for &(m1, c1) in &small.terms {
            for &(m2, c2) in &big.terms {
                let e = map.entry(Monomial(m1.0 + m2.0)).or_insert(FieldElem::ZERO);
                *e = f.mul_add(*e, c1, c2);
            }
        }
        Ok(Self::from_map(&self.ring, map))
    }

    /// `self^e`. When the base has few terms, repeated multiplication by
    /// the base is cheaper than squaring (each step costs
    /// `|acc| * |base|`), so that is used; otherwise square-and-multiply.
    pub fn pow(&self, e: u32) -> Result<Self, PolyError> {
        if e == 0 {
            return Ok(Self::one(&self.ring));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if self.total_degree().unwrap() as u64 * e as u64 > MAX_DEGREE as u64 {
            return Err(PolyError::DegreeOverflow);
        }
        if self.len() <= 32 {
            let mut acc = self.clone();
            for _ in 1..e {
                acc = acc.mul_checked(self)?;
            }
            return Ok(acc);
        }
        let mut result = Self::one(&self.ring);
        let mut base = self.clone();
        let mut k = e;
        loop {
            if k & 1 == 1 {
                result = result.mul_checked(&base)?;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul_checked(&base)?;
        }
        Ok(result)
    }

    /// Evaluates at a point given for every variable.
    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        let n = self.ring.nvars();
        if point.len() != n {
            return Err(PolyError::Arity { expected: n, got: point.len() });
        }
        let f = self.field();
        let max_deg = self.total_degree().unwrap_or(0) as usize;
        let powers: Vec<Vec<FieldElem>> = point
            .iter()
            .map(|&v| {
                let mut row = Vec::with_capacity(max_deg + 1);
                let mut cur = FieldElem::ONE;
                for _ in 0..=max_deg {
                    row.push(cur);
                    cur = f.mul(cur, v);
                }
                row
            })
            .collect();
        let mut acc = FieldElem::ZERO;
        for &(m, c) in &self.terms {
            let mut t = c;
            for (i, row) in powers.iter().enumerate() {
                let e = m.exponent(i) as usize;
                if e > 0 {
                    t = f.mul(t, row[e]);
                }
            }
            acc = f.add(acc, t);
        }
        Ok(acc)
    }

    /// Substitutes constants for some variables; the ring is unchanged and
    /// the substituted variables simply stop occurring.
    pub fn substitute_values(&self, assign: &[(usize, FieldElem)]) -> Self {
        if assign.is_empty() {
            return self.clone();
        }
        let f = self.field();
        let mut map: FxHashMap<Monomial, FieldElem> = FxHashMap::default();
        for &(m, c) in &self.terms {
            let mut mm = m;
            let mut cc = c;
            for &(i, v) in assign {
                let e = m.exponent(i);
                if e > 0 {
                    cc = f.mul(cc, f.pow(v, e as u64));
                    mm = mm.without(i);
                }
            }
            if !cc.is_zero() {
                let slot = map.entry(mm).or_insert(FieldElem::ZERO);
                *slot = f.add(*slot, cc);
            }
        }
        Self::from_map(&self.ring, map)
    }

    /// Moves the polynomial into `target` (same field), sending variable
    /// `i` to `target` variable `var_map[i]`.
    pub fn rename_into(&self, target: &RingRef, var_map: &[usize]) -> Result<Self, PolyError> {
        if var_map.len() != self.ring.nvars() {
            return Err(PolyError::Arity { expected: self.ring.nvars(), got: var_map.len() });
        }
        if target.field() != self.field() {
            return Err(PolyError::RingMismatch);
        }
        let terms = self.terms.iter().map(|&(m, c)| {
            let mut out = Monomial::ONE;
            for (i, &j) in var_map.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    out = Monomial(out.0 + ((e as u128) << (8 * j)) + ((e as u128) << DEG_SHIFT));
                }
            }
            (out, c)
        });
        Ok(Self::from_terms(target, terms))
    }

    /// Moves into a ring whose variable names include all of ours.
    pub fn rename_by_name(&self, target: &RingRef) -> Result<Self, PolyError> {
        let map = self
            .ring
            .vars()
            .iter()
            .map(|v| target.var_index(v).ok_or_else(|| PolyError::MissingVariable(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        self.rename_into(target, &map)
    }

    /// Maps every coefficient through a field embedding into `target`,
    /// keeping the same variables.
    pub fn embed(&self, target: &RingRef, e: &Embedding) -> Result<Self, PolyError> {
        if target.nvars() != self.ring.nvars() || e.small() != self.field() || e.big() != target.field() {
            return Err(PolyError::RingMismatch);
        }
        Ok(MPoly { ring: target.clone(), terms: self.terms.iter().map(|&(m, c)| (m, e.apply(c))).collect() })
    }

    /// Pulls coefficients back through an embedding; `None` if some
    /// coefficient is outside the subfield.
    pub fn descend(&self, target: &RingRef, e: &Embedding) -> Option<Self> {
        if target.nvars() != self.ring.nvars() || e.big() != self.field() || e.small() != target.field() {
            return None;
        }
        let terms: Option<Vec<_>> = self.terms.iter().map(|&(m, c)| e.preimage(c).map(|d| (m, d))).collect();
        Some(MPoly { ring: target.clone(), terms: terms? })
    }

    /// Applies `c -> c^(p^k)` to every coefficient.
    pub fn frobenius_coeffs(&self, k: u32) -> Self {
        let f = self.field();
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|&(m, c)| (m, f.frobenius(c, k))).collect() }
    }

    /// Replaces each variable `v` by `images[v]` (a polynomial of degree at
    /// most one in the images' ring). Variables whose image is the
    /// same-named variable of the target ring are carried over cheaply.
    pub fn substitute_linear(&self, images: &[MPoly]) -> Result<Self, PolyError> {
        self.substitute_impl(images, true)
    }

    /// Replaces each variable `v` by an arbitrary polynomial `images[v]`.
    pub fn compose(&self, images: &[MPoly]) -> Result<Self, PolyError> {
        self.substitute_impl(images, false)
    }

    fn substitute_impl(&self, images: &[MPoly], linear: bool) -> Result<Self, PolyError> {
        let n = self.ring.nvars();
        if images.len() != n {
            return Err(PolyError::Arity { expected: n, got: images.len() });
        }
        let target = match images.first() {
            Some(g) => g.ring.clone(),
            None => return Ok(self.clone()),
        };
        if target.field() != self.field() {
            return Err(PolyError::RingMismatch);
        }
        let mut identity = vec![None; n];
        for (i, g) in images.iter().enumerate() {
            if !same_ring(&g.ring, &target) {
                return Err(PolyError::RingMismatch);
            }
            if linear && g.total_degree().unwrap_or(0) > 1 {
                return Err(PolyError::NonLinearImage);
            }
            if let Some(j) = target.var_index(&self.ring.vars()[i]) {
                if *g == MPoly::var(&target, j) {
                    identity[i] = Some(j);
                }
            }
        }
        let f = self.field();
        // Group terms by their exponents on the non-identity variables.
        let mut cache: FxHashMap<Vec<u32>, MPoly> = FxHashMap::default();
        let mut powers: Vec<Vec<MPoly>> = vec![vec![MPoly::one(&target)]; n];
        let mut acc: FxHashMap<Monomial, FieldElem> = FxHashMap::default();
        for &(m, c) in &self.terms {
            let mut key = Vec::with_capacity(n);
            let mut rest = Monomial::ONE;
            for i in 0..n {
                let e = m.exponent(i);
                match identity[i] {
                    Some(j) => {
                        if e > 0 {
                            rest = Monomial(rest.0 + ((e as u128) << (8 * j)) + ((e as u128) << DEG_SHIFT));
                        }
                    }
                    None => key.push(e),
                }
            }
            if !cache.contains_key(&key) {
                let mut prod = MPoly::one(&target);
                let mut k = 0;
                for i in 0..n {
                    if identity[i].is_some() {
                        continue;
                    }
                    let e = key[k] as usize;
                    k += 1;
                    if e == 0 {
                        continue;
                    }
                    while powers[i].len() <= e {
                        let next = powers[i].last().unwrap().mul_checked(&images[i])?;
                        powers[i].push(next);
                    }
                    prod = prod.mul_checked(&powers[i][e])?;
                }
                cache.insert(key.clone(), prod);
            }
            let img = &cache[&key];
            for &(im, ic) in &img.terms {
                let mm = im.checked_mul(rest).ok_or(PolyError::DegreeOverflow)?;
                let slot = acc.entry(mm).or_insert(FieldElem::ZERO);
                *slot = f.mul_add(*slot, c, ic);
            }
        }
        Ok(Self::from_map(&target, acc))
    }

    /// Formal partial derivative.
    pub fn derivative(&self, i: usize) -> Self {
        let f = self.field();
        let terms = self.terms.iter().filter_map(|&(m, c)| {
            let e = m.exponent(i);
            if e == 0 {
                return None;
            }
            let cc = f.mul(c, f.from_int(e as i64));
            (!cc.is_zero()).then(|| (Monomial(m.0 - (1u128 << (8 * i)) - (1u128 << DEG_SHIFT)), cc))
        });
        // Derivation preserves the relative order of surviving terms.
        MPoly { ring: self.ring.clone(), terms: terms.collect() }.resorted()
    }

    fn resorted(mut self) -> Self {
        sort_terms(&mut self.terms);
        self
    }

    /// Splits into `sum_m m * c_m(rest)` where `m` runs over monomials in
    /// the first `k` variables and `c_m` lives in `rest_ring`, whose
    /// variables are ours from index `k` on.
    pub fn split_prefix(&self, k: usize, rest_ring: &RingRef) -> Vec<(Monomial, MPoly)> {
        assert_eq!(rest_ring.nvars() + k, self.ring.nvars());
        let mut groups: FxHashMap<Monomial, Vec<(Monomial, FieldElem)>> = FxHashMap::default();
        for &(m, c) in &self.terms {
            groups.entry(m.prefix(k)).or_default().push((m.suffix(k), c));
        }
        let mut out: Vec<(Monomial, MPoly)> = groups
            .into_iter()
            .map(|(m, mut ts)| {
                sort_terms(&mut ts);
                (m, MPoly { ring: rest_ring.clone(), terms: ts })
            })
            .collect();
        out.sort_by(|a, b| b.0.key().cmp(&a.0.key()));
        out
    }

    /// The coefficient of the prefix monomial `pre` (in the first `k`
    /// variables) as a polynomial in the remaining ones.
    pub fn prefix_coeff(&self, k: usize, pre: Monomial, rest_ring: &RingRef) -> MPoly {
        let mut ts: Vec<_> = self.terms.iter().filter(|t| t.0.prefix(k) == pre).map(|t| (t.0.suffix(k), t.1)).collect();
        sort_terms(&mut ts);
        MPoly { ring: rest_ring.clone(), terms: ts }
    }

    /// Keeps the terms satisfying a predicate.
    pub fn filter_terms(&self, keep: impl Fn(Monomial) -> bool) -> Self {
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().copied().filter(|t| keep(t.0)).collect() }
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponent(i)).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&i| self.terms.iter().any(|t| t.0.exponent(i) > 0)).collect()
    }

    pub fn format_monomial(&self, m: Monomial) -> String {
        let mut parts = Vec::new();
        for (i, v) in self.ring.vars().iter().enumerate() {
            match m.exponent(i) {
                0 => {}
                1 => parts.push(v.clone()),
                e => parts.push(format!("{v}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let fld = self.field();
        for (k, &(m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono = self.format_monomial(m);
            let mut cs = fld.format(c);
            if cs.contains('+') {
                cs = format!("({cs})");
            }
            match (mono.is_empty(), c == FieldElem::ONE) {
                (true, _) => write!(f, "{cs}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{cs}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl std::ops::$tr<&MPoly> for &MPoly {
            type Output = MPoly;
            /// # Panics
            /// Panics on ring mismatch or degree overflow; use the `try_`
            /// methods to handle those.
            fn $m(self, o: &MPoly) -> MPoly {
                self.$call(o).expect(concat!("MPoly ", stringify!($m)))
            }
        }
        impl std::ops::$tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, o: MPoly) -> MPoly {
                (&self).$call(&o).expect(concat!("MPoly ", stringify!($m)))
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3(q: u64) -> RingRef {
        Ring::new(FieldCtx::canonical(q).unwrap(), &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn grevlex_basics() {
        let m = |e: &[u32]| Monomial::from_exponents(e).unwrap();
        // degree first
        assert!(m(&[0, 0, 2]).key() > m(&[1, 0, 0]).key());
        // x > y > z
        assert!(m(&[1, 0, 0]).key() > m(&[0, 1, 0]).key());
        assert!(m(&[0, 1, 0]).key() > m(&[0, 0, 1]).key());
        // x*z < y^2 in grevlex (smaller power of the last variable wins)
        assert!(m(&[0, 2, 0]).key() > m(&[1, 0, 1]).key());
        assert!(m(&[2, 0, 0]).key() > m(&[1, 1, 0]).key());
    }

    #[test]
    fn divisibility() {
        let m = |e: &[u32]| Monomial::from_exponents(e).unwrap();
        assert!(m(&[1, 2, 0]).divides(m(&[1, 2, 3])));
        assert!(!m(&[2, 2, 0]).divides(m(&[1, 2, 3])));
        assert!(m(&[0; 15]).divides(m(&[1, 0, 0])));
        let mut a = [0u32; 15];
        a[14] = 200;
        let mut b = a;
        b[14] = 199;
        assert!(!m(&a).divides(m(&b)));
        assert!(m(&b).divides(m(&a)));
        assert_eq!(m(&[1, 3, 0]).lcm(m(&[2, 1, 1])), m(&[2, 3, 1]));
    }

    #[test]
    fn arithmetic() {
        let r = ring3(11);
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let p = &(&x + &y) * &(&x - &y);
        let q = &(&x * &x) - &(&y * &y);
        assert_eq!(p, q);
        assert_eq!(&p + &MPoly::zero(&r), p);
        assert_eq!(p.to_string(), "x^2 + 10*y^2");
    }

    #[test]
    fn coefficient_lookup() {
        let r = ring3(11);
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let f = &x + &y;
        assert_eq!(f.coeff(&[1, 0, 0]), FieldElem::ONE);
        assert_eq!(f.coeff(&[0, 0, 1]), FieldElem::ZERO);
    }

    #[test]
    fn derivative_and_split() {
        let r = ring3(7);
        let x = MPoly::var(&r, 0);
        let z = MPoly::var(&r, 2);
        let f = &(&x.pow(3).unwrap() * &z) + &z.pow(4).unwrap();
        assert_eq!(f.derivative(0).to_string(), "3*x^2*z");
        let rz = Ring::new(r.field().clone(), &["z"]).unwrap();
        let parts = f.split_prefix(2, &rz);
        assert_eq!(parts.len(), 2);
    }
}
