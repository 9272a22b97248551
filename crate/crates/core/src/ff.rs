//! Finite fields `GF(p^k)` with table-driven arithmetic.
//!
//! Elements are stored as their coordinate vector over `F_p` packed into a
//! base-`p` integer: `c0 + c1*p + ... + c_{k-1}*p^{k-1}` where the field is
//! `F_p[t]/(m(t))`. Multiplication goes through discrete log/exp tables
//! built from a primitive element; addition in proper extensions uses a
//! Zech logarithm table.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted for table arithmetic.
pub const MAX_ORDER: u64 = 5_000_000;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("characteristic {0} is below 5")]
    SmallCharacteristic(u32),
    #[error("modulus {0:?} is not irreducible over F_{1}")]
    ReducibleModulus(Vec<u32>, u32),
    #[error("modulus must be monic of degree {0}")]
    BadModulus(usize),
    #[error("field of order {0} exceeds the table limit")]
    TooLarge(u64),
    #[error("element {0} is not primitive")]
    NotPrimitive(String),
    #[error("element {0} is a square")]
    IsSquare(String),
    #[error("no embedding of F_{small} into F_{big}")]
    NoEmbedding { small: u64, big: u64 },
}

/// A field element: packed base-`p` coordinates. Meaningful only together
/// with the [`FieldCtx`] it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low to high, length `k + 1`.
    modulus: Vec<u32>,
    zeta: u32,
    /// `exp[n] = zeta^n` for `n < 2(q-1)`.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[n] = log(1 + zeta^n)` or `NO_LOG` when that sum is zero.
    zech: Vec<u32>,
}

/// Descriptor of a finite field together with its arithmetic tables.
/// Cloning is cheap.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

/// Serializable description of a field construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub degree: u32,
    /// Monic modulus coefficients, low to high (`[0, 1]` for prime fields).
    pub modulus: Vec<u32>,
    /// Coordinates of the primitive element, low to high.
    pub zeta: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.0.p, self.0.k, self.0.modulus)
        }
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense polynomials over F_p, used only while building tables ----

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    let mut r: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
    poly_rem_in_place(&mut r, m, p);
    r
}

/// Remainder modulo a monic polynomial.
fn poly_rem_in_place(r: &mut Vec<u32>, m: &[u32], p: u32) {
    let dm = m.len() - 1;
    poly_trim(r);
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = lead * c as u64 % p as u64;
            let v = &mut r[shift + i];
            *v = ((*v as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(r);
    }
}

fn poly_rem_general(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let lead_inv = pow_mod(*b.last().unwrap() as u64, (p - 2) as u64, p as u64);
    let monic: Vec<u32> = b.iter().map(|&c| (c as u64 * lead_inv % p as u64) as u32).collect();
    poly_rem_in_place(&mut r, &monic, p);
    r
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem_general(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Rabin-style test: a degree-`n` monic `m` is irreducible iff it has no
/// common factor with `t^{p^i} - t` for `i <= n/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    let t = vec![0, 1];
    let mut frob = t.clone();
    for _ in 1..=n / 2 {
        // frob <- frob^p mod m
        let mut acc = vec![1u32];
        let mut base = frob.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        frob = acc;
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = poly_gcd(m, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn unpack(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    poly_trim(&mut out);
    out
}

fn pack(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

impl FieldCtx {
    /// The prime field `F_p` with its least primitive root.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::check_char(p)?;
        Self::build(p, vec![0, 1], None)
    }

    /// `F_p[t]/(modulus)`; `modulus` is monic, low to high.
    pub fn extension(p: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        Self::check_char(p)?;
        Self::build(p, modulus, None)
    }

    /// Like [`FieldCtx::extension`] with a prescribed primitive element
    /// given by its coordinates.
    pub fn extension_with_zeta(p: u32, modulus: Vec<u32>, zeta: &[u32]) -> Result<Self, FieldError> {
        Self::check_char(p)?;
        Self::build(p, modulus, Some(pack(zeta, p)))
    }

    /// The spec-level constructor: degree `a` over `F_p`, with an optional
    /// explicit modulus. Defaults are those of [`FieldCtx::canonical`].
    pub fn make(p: u32, a: u32, modulus: Option<Vec<u32>>) -> Result<Self, FieldError> {
        match (a, modulus) {
            (1, _) => Self::prime(p),
            (_, Some(m)) => {
                if m.len() != a as usize + 1 {
                    return Err(FieldError::BadModulus(a as usize));
                }
                Self::extension(p, m)
            }
            (_, None) => {
                Self::check_char(p)?;
                Self::canonical_power(p, a)
            }
        }
    }

    /// Canonical field of order `q`: `F_p` for primes; `F_7[t]/(t^2 + 1)`
    /// with primitive element `4 + 6t` for `q = 49`; `F_p[t]/(t^2 - eps)`
    /// for other squares; a lexicographically first irreducible modulus
    /// otherwise.
    pub fn canonical(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrime(q.min(u32::MAX as u64) as u32))?;
        Self::check_char(p)?;
        Self::canonical_power(p, k)
    }

    fn canonical_power(p: u32, k: u32) -> Result<Self, FieldError> {
        match k {
            1 => Self::prime(p),
            2 if p == 7 => Self::extension_with_zeta(7, vec![1, 0, 1], &[4, 6]),
            2 => {
                let eps = least_nonsquare_mod(p);
                Self::build(p, vec![p - eps, 0, 1], None)
            }
            _ => {
                let m = first_irreducible(p, k);
                Self::build(p, m, None)
            }
        }
    }

    fn check_char(p: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p < 5 {
            return Err(FieldError::SmallCharacteristic(p));
        }
        Ok(())
    }

    fn build(p: u32, modulus: Vec<u32>, zeta: Option<u32>) -> Result<Self, FieldError> {
        let k = modulus.len().saturating_sub(1) as u32;
        if k == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus(k as usize));
        }
        let q64 = (p as u64).pow(k);
        if q64 > MAX_ORDER {
            return Err(FieldError::TooLarge(q64));
        }
        if k > 1 && !is_irreducible(&modulus, p) {
            return Err(FieldError::ReducibleModulus(modulus, p));
        }
        let q = q64 as u32;
        let slow_mul = |a: u32, b: u32| -> u32 {
            pack(&poly_mulmod(&unpack(a, p, k), &unpack(b, p, k), &modulus, p), p)
        };
        let slow_pow = |a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            r
        };
        let factors = prime_factors(q64 - 1);
        let is_primitive =
            |g: u32| g != 0 && factors.iter().all(|&r| slow_pow(g, (q64 - 1) / r) != 1);
        let zeta = match zeta {
            Some(z) => {
                if z >= q || !is_primitive(z) {
                    let desc = unpack(z, p, k);
                    return Err(FieldError::NotPrimitive(format!("{desc:?}")));
                }
                z
            }
            None => (1..q).find(|&g| is_primitive(g)).expect("a primitive element exists"),
        };
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = 1u32;
        for i in 0..n {
            exp[i] = cur;
            exp[i + n] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, zeta);
        }
        let mut zech = Vec::new();
        if k > 1 {
            zech = vec![NO_LOG; n];
            for (i, z) in zech.iter_mut().enumerate() {
                let e = exp[i];
                let d0 = e % p;
                let bumped = e - d0 + (d0 + 1) % p;
                if bumped != 0 {
                    *z = log[bumped as usize];
                }
            }
        }
        Ok(FieldCtx(Arc::new(Inner { p, k, q, modulus, zeta, exp, log, zech })))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }
    /// Extension degree over the prime field.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.k
    }
    #[inline]
    pub fn order(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }
    pub fn zeta(&self) -> FieldElem {
        FieldElem(self.0.zeta)
    }
    /// The adjoined root `t` (equal to `1`'s neighbour `t` in the
    /// coordinate basis); only meaningful for proper extensions.
    pub fn generator(&self) -> FieldElem {
        if self.0.k == 1 {
            FieldElem(0)
        } else {
            FieldElem(self.0.p)
        }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.0.p,
            degree: self.0.k,
            modulus: self.0.modulus.clone(),
            zeta: self.coords(self.zeta()),
        }
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self, FieldError> {
        Self::check_char(d.p)?;
        if d.degree == 1 {
            return Self::prime(d.p);
        }
        Self::extension_with_zeta(d.p, d.modulus.clone(), &d.zeta)
    }

    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.0.p as i64) as u32)
    }

    /// Coordinates over `F_p`, low to high, always of length `degree`.
    pub fn coords(&self, a: FieldElem) -> Vec<u32> {
        let mut v = a.0;
        (0..self.0.k)
            .map(|_| {
                let d = v % self.0.p;
                v /= self.0.p;
                d
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[u32]) -> FieldElem {
        let reduced: Vec<u32> = c.iter().map(|&d| d % self.0.p).collect();
        let mut poly = reduced;
        poly_rem_in_place(&mut poly, &self.0.modulus, self.0.p);
        FieldElem(pack(&poly, self.0.p))
    }

    /// All elements in packed order, starting with `0, 1, ...`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.0.q).map(FieldElem)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.0.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let f = &*self.0;
        if f.k == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= f.p { s - f.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = f.log[a.0 as usize];
        let lb = f.log[b.0 as usize];
        let n = f.q - 1;
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = f.zech[d as usize];
        if z == NO_LOG {
            FieldElem(0)
        } else {
            FieldElem(f.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let f = &*self.0;
        if a.0 == 0 {
            return a;
        }
        if f.k == 1 {
            return FieldElem(f.p - a.0);
        }
        FieldElem(f.exp[(f.log[a.0 as usize] + (f.q - 1) / 2) as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let f = &*self.0;
        FieldElem(f.exp[(f.log[a.0 as usize] + f.log[b.0 as usize]) as usize])
    }

    /// `a + b*c`, the inner step of most reductions.
    #[inline]
    pub fn mul_add(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> FieldElem {
        self.add(a, self.mul(b, c))
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics on zero.
    #[inline]
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a.0 != 0, "inverse of zero");
        let f = &*self.0;
        let l = f.log[a.0 as usize];
        FieldElem(f.exp[((f.q - 1) - l) as usize])
    }

    pub fn checked_inv(&self, a: FieldElem) -> Option<FieldElem> {
        (a.0 != 0).then(|| self.inv(a))
    }

    #[inline]
    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem(1);
        }
        if a.0 == 0 {
            return a;
        }
        let f = &*self.0;
        let n = (f.q - 1) as u64;
        let l = f.log[a.0 as usize] as u64;
        FieldElem(f.exp[((l * (e % n)) % n) as usize])
    }

    /// `zeta^n`.
    pub fn zeta_pow(&self, n: u64) -> FieldElem {
        let f = &*self.0;
        FieldElem(f.exp[(n % (f.q - 1) as u64) as usize])
    }

    /// Discrete log base `zeta`; `None` for zero.
    pub fn log(&self, a: FieldElem) -> Option<u32> {
        (a.0 != 0).then(|| self.0.log[a.0 as usize])
    }

    /// The `p^e`-power Frobenius.
    pub fn frobenius(&self, a: FieldElem, e: u32) -> FieldElem {
        self.pow(a, (self.0.p as u64).pow(e % self.0.k))
    }

    pub fn is_square(&self, a: FieldElem) -> bool {
        a.0 == 0 || self.0.log[a.0 as usize] % 2 == 0
    }

    /// A square root when one exists (the one with even-halved log).
    pub fn sqrt(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return Some(a);
        }
        let l = self.0.log[a.0 as usize];
        (l % 2 == 0).then(|| FieldElem(self.0.exp[(l / 2) as usize]))
    }

    /// Multiplicative order of a unit.
    pub fn mult_order(&self, a: FieldElem) -> u64 {
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        n / gcd(n, l)
    }

    /// Text form: an integer for prime fields, otherwise a sum like
    /// `3+2*s+s^2` in the adjoined root `s`.
    pub fn format(&self, a: FieldElem) -> String {
        if self.0.k == 1 {
            return a.0.to_string();
        }
        let c = self.coords(a);
        let mut parts = Vec::new();
        for (i, &d) in c.iter().enumerate() {
            if d == 0 {
                continue;
            }
            parts.push(match (i, d) {
                (0, _) => d.to_string(),
                (1, 1) => "s".to_string(),
                (1, _) => format!("{d}*s"),
                (_, 1) => format!("s^{i}"),
                _ => format!("{d}*s^{i}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p as u32, k))
}

fn least_nonsquare_mod(p: u32) -> u32 {
    (2..p)
        .find(|&n| pow_mod(n as u64, ((p - 1) / 2) as u64, p as u64) == (p - 1) as u64)
        .expect("odd prime has a non-square")
}

/// First monic irreducible of degree `k` over `F_p`, scanning the lower
/// coefficients as a base-`p` counter.
fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
    let total = (p as u64).pow(k);
    for v in 0..total {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut x = v;
        for _ in 0..k {
            m.push((x % p as u64) as u32);
            x /= p as u64;
        }
        m.push(1);
        if m[0] != 0 && is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An injective field homomorphism `small -> big`, tabulated.
#[derive(Clone)]
pub struct Embedding {
    small: FieldCtx,
    big: FieldCtx,
    map: Arc<Vec<FieldElem>>,
    back: Arc<FxHashMap<FieldElem, FieldElem>>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.small, self.big)
    }
}

impl Embedding {
    /// Builds an embedding by sending the adjoined root of `small` to the
    /// first root (in packed order) of its modulus inside `big`.
    pub fn new(small: &FieldCtx, big: &FieldCtx) -> Result<Self, FieldError> {
        let err = || FieldError::NoEmbedding { small: small.order() as u64, big: big.order() as u64 };
        if small.p() != big.p() || big.degree() % small.degree() != 0 {
            return Err(err());
        }
        let image_of_t = if small.degree() == 1 {
            FieldElem(0)
        } else {
            let m = small.modulus();
            big.elements()
                .find(|&r| {
                    let mut acc = FieldElem(0);
                    for &c in m.iter().rev() {
                        acc = big.add(big.mul(acc, r), big.from_int(c as i64));
                    }
                    acc.is_zero()
                })
                .ok_or_else(err)?
        };
        let mut map = Vec::with_capacity(small.order() as usize);
        let mut back = FxHashMap::default();
        for a in small.elements() {
            let mut acc = FieldElem(0);
            if small.degree() == 1 {
                acc = big.from_int(a.0 as i64);
            } else {
                for &c in small.coords(a).iter().rev() {
                    acc = big.add(big.mul(acc, image_of_t), big.from_int(c as i64));
                }
            }
            map.push(acc);
            back.insert(acc, a);
        }
        Ok(Embedding { small: small.clone(), big: big.clone(), map: Arc::new(map), back: Arc::new(back) })
    }

    pub fn identity(f: &FieldCtx) -> Self {
        Self::new(f, f).expect("identity embedding")
    }

    pub fn small(&self) -> &FieldCtx {
        &self.small
    }
    pub fn big(&self) -> &FieldCtx {
        &self.big
    }

    #[inline]
    pub fn apply(&self, a: FieldElem) -> FieldElem {
        self.map[a.0 as usize]
    }

    /// The preimage of `b` when it lies in the image.
    #[inline]
    pub fn preimage(&self, b: FieldElem) -> Option<FieldElem> {
        self.back.get(&b).copied()
    }
}

/// The quadratic extension `K' = K(sqrt(eps))` used by the non-split
/// pipeline.
#[derive(Clone, Debug)]
pub struct QuadraticExtension {
    pub field: FieldCtx,
    pub embedding: Embedding,
    /// A fixed square root of `eps` in `field`.
    pub sqrt_eps: FieldElem,
}

/// Builds `K(sqrt(eps))`. Over a prime field this is literally
/// `F_p[s]/(s^2 - eps)` with `sqrt_eps = s`; over `F_{p^2}` it is the
/// canonical `F_{p^4}` with the embedded square root.
pub fn quadratic_extension(k: &FieldCtx, eps: FieldElem) -> Result<QuadraticExtension, FieldError> {
    if k.is_square(eps) {
        return Err(FieldError::IsSquare(k.format(eps)));
    }
    if k.is_prime_field() {
        let p = k.p();
        let field = FieldCtx::build(p, vec![(p - eps.0) % p, 0, 1], None)?;
        let embedding = Embedding::new(k, &field)?;
        let sqrt_eps = field.generator();
        return Ok(QuadraticExtension { field, embedding, sqrt_eps });
    }
    let field = FieldCtx::canonical_power(k.p(), 2 * k.degree())?;
    let embedding = Embedding::new(k, &field)?;
    let sqrt_eps = field.sqrt(embedding.apply(eps)).expect("non-square becomes a square in degree 2");
    Ok(QuadraticExtension { field, embedding, sqrt_eps })
}

/// `F_{q^m}` in canonical form together with the embedding of `k`.
pub fn extension_of_degree(k: &FieldCtx, m: u32) -> Result<(FieldCtx, Embedding), FieldError> {
    if m == 1 {
        return Ok((k.clone(), Embedding::identity(k)));
    }
    if k.is_prime_field() && m == 2 {
        let q = quadratic_extension(k, nonsquare(k))?;
        return Ok((q.field, q.embedding));
    }
    let big = FieldCtx::canonical_power(k.p(), k.degree() * m)?;
    let e = Embedding::new(k, &big)?;
    Ok((big, e))
}

/// Square root of a non-square `eps` in the quadratic extension.
pub fn sqrt_eps(k: &FieldCtx, eps: FieldElem) -> Result<(QuadraticExtension, FieldElem), FieldError> {
    let ext = quadratic_extension(k, eps)?;
    let s = ext.sqrt_eps;
    Ok((ext, s))
}

pub fn primitive_element(k: &FieldCtx) -> FieldElem {
    k.zeta()
}

/// The canonical non-square: least integer non-residue for prime fields,
/// `zeta` for proper extensions.
pub fn nonsquare(k: &FieldCtx) -> FieldElem {
    if k.is_prime_field() {
        FieldElem(least_nonsquare_mod(k.p()))
    } else {
        k.zeta()
    }
}

/// Coset representatives of `K^x / (K^x)^3`.
pub fn cube_class_reps(k: &FieldCtx) -> Vec<FieldElem> {
    if (k.order() - 1) % 3 != 0 {
        vec![FieldElem::ONE]
    } else {
        vec![FieldElem::ONE, k.zeta(), k.zeta_pow(2)]
    }
}

/// Admissible `b` for the non-split normal form with cubic part
/// `b*y(3x^2 + eps*y^2) + x(x^2 + 3eps*y^2)`.
///
/// For `q = -1 mod 3` the group `E^x / K^x (E^x)^3` (with `E = K(sqrt eps)`)
/// has order 3. Its classes are represented by `w^0, w^1, w^2` where `w` is
/// the first primitive element of `E` when `E^x` is listed as
/// `r + s*sqrt(eps)` in lexicographic `(r, s)` order. The class of
/// `r + s*sqrt(eps)` maps to the line through `(r, eps*s)`, i.e. to
/// `b = eps*s/r`.
pub fn nonsplit_b_reps(k: &FieldCtx) -> Vec<FieldElem> {
    if k.order() % 3 != 2 {
        return vec![FieldElem::ZERO];
    }
    let eps = nonsquare(k);
    let ext = quadratic_extension(k, eps).expect("eps is a non-square");
    let e = &ext.field;
    let s = ext.sqrt_eps;
    let lift = |a: FieldElem| ext.embedding.apply(a);
    // Lexicographic listing of E as r + t*sqrt(eps), remembering (r, t).
    let mut coords = rustc_hash::FxHashMap::default();
    let mut omega = None;
    for r in k.elements() {
        for t in k.elements() {
            let w = e.add(lift(r), e.mul(lift(t), s));
            coords.insert(w, (r, t));
            if omega.is_none() && !w.is_zero() && e.mult_order(w) == (e.order() - 1) as u64 {
                omega = Some(w);
            }
        }
    }
    let omega = omega.expect("E has a primitive element");
    let split = |w: FieldElem| coords[&w];
    let mut out: Vec<FieldElem> = Vec::new();
    for i in 0..3u64 {
        // w^(i + 3j) lies in the same class; skip representatives with r = 0.
        let b = (0..)
            .map(|j| split(e.pow(omega, i + 3 * j)))
            .find(|(r, _)| !r.is_zero())
            .map(|(r, t)| k.div(k.mul(eps, t), r))
            .expect("some power has nonzero rational part");
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_small_fields() {
        let f11 = FieldCtx::canonical(11).unwrap();
        assert_eq!(f11.zeta(), FieldElem(2));
        let f13 = FieldCtx::canonical(13).unwrap();
        assert_eq!(f13.zeta(), FieldElem(2));
        let f49 = FieldCtx::canonical(49).unwrap();
        assert_eq!(f49.modulus(), &[1, 0, 1][..]);
        assert_eq!(f49.coords(f49.zeta()), vec![4, 6]);
        assert_eq!(f49.mult_order(f49.zeta()), 48);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(FieldCtx::prime(9).unwrap_err(), FieldError::NotPrime(9));
        assert_eq!(FieldCtx::prime(3).unwrap_err(), FieldError::SmallCharacteristic(3));
        assert!(matches!(FieldCtx::extension(7, vec![6, 0, 1]), Err(FieldError::ReducibleModulus(..))));
        assert!(FieldCtx::extension_with_zeta(7, vec![1, 0, 1], &[1, 0]).is_err());
    }

    #[test]
    fn extension_tables_consistent() {
        let f = FieldCtx::canonical(7u64.pow(4)).unwrap();
        for a in f.elements().step_by(37) {
            for b in f.elements().step_by(41) {
                let s = f.add(a, b);
                assert_eq!(f.sub(s, b), a);
                let ca = f.coords(a);
                let cb = f.coords(b);
                let cs: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % 7).collect();
                assert_eq!(f.coords(s), cs);
            }
        }
    }

    #[test]
    fn embedding_is_homomorphism() {
        let f49 = FieldCtx::canonical(49).unwrap();
        let big = FieldCtx::canonical(7u64.pow(4)).unwrap();
        let e = Embedding::new(&f49, &big).unwrap();
        for a in f49.elements() {
            for b in f49.elements().step_by(5) {
                assert_eq!(e.apply(f49.mul(a, b)), big.mul(e.apply(a), e.apply(b)));
                assert_eq!(e.apply(f49.add(a, b)), big.add(e.apply(a), e.apply(b)));
            }
            assert_eq!(e.preimage(e.apply(a)), Some(a));
        }
    }

    #[test]
    fn b_reps() {
        let f11 = FieldCtx::canonical(11).unwrap();
        assert_eq!(nonsplit_b_reps(&f11), vec![FieldElem(0), FieldElem(6), FieldElem(10)]);
        let f13 = FieldCtx::canonical(13).unwrap();
        assert_eq!(nonsplit_b_reps(&f13), vec![FieldElem(0)]);
    }

    #[test]
    fn format_extension() {
        let f49 = FieldCtx::canonical(49).unwrap();
        assert_eq!(f49.format(f49.zeta()), "4+6*s");
        assert_eq!(f49.format(f49.generator()), "s");
        assert_eq!(f49.format(FieldElem(0)), "0");
    }
}
