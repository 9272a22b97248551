//! Absolute irreducibility of plane quintics by deciding whether an
//! unknown-coefficient factorization `F = g * h` has a solution.
//!
//! After a coordinate change making the `x^5` coefficient 1, any factor
//! pair can be scaled so both factors are monic in `x`. Two shapes remain:
//! a linear factor `x + b1*y + b2*z`, which divides `F` iff
//! `F(-b1*y - b2*z, y, z) = 0`, and a quadratic times a cubic with 5 + 9
//! unknown coefficients.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{extension_of_degree, FieldElem};
use crate::groebner::{buchberger, solve_over_fq, solve_zero_dim, Budget, GroebnerError, Ideal};
use crate::mpoly::{MPoly, Monomial, PolyError, Ring, RingRef, MAX_DEGREE};
use crate::quintic::{is_quintic_form, linear_change, quintic_monomials};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IrreducibilityError {
    #[error("input is not a nonzero quintic form in x, y, z")]
    NotQuintic,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] crate::ff::FieldError),
    #[error("cannot decide over F_(q^{0}): the factor system is not zero-dimensional and q^s exceeds the degree cap")]
    Unresolved(u32),
}

/// Where factors may have their coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Closure,
    /// `F_(q^s)` for the given `s`.
    Extension(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorShape {
    #[serde(rename = "1+4")]
    LinearQuartic,
    #[serde(rename = "2+3")]
    QuadraticCubic,
}

/// Brings the `x^5` coefficient to 1 by the first change
/// `y -> y + c x, z -> z + d x` (in lexicographic `(c, d)` order) that makes
/// it nonzero. Returns `None` when `x` divides `F`.
pub fn normalize_leading(f: &MPoly) -> Result<Option<MPoly>, PolyError> {
    let field = f.field().clone();
    let x5 = [5, 0, 0];
    let g = if !f.coeff(&x5).is_zero() {
        f.clone()
    } else {
        // F(1, c, d) has degree at most 5 in each of c, d; if it vanished on
        // all of F_q^2 for q > 5 it would vanish identically, i.e. x | F.
        let mut found = None;
        'search: for c in field.elements() {
            for d in field.elements() {
                if !f.eval(&[FieldElem::ONE, c, d])?.is_zero() {
                    found = Some((c, d));
                    break 'search;
                }
            }
        }
        let Some((c, d)) = found else { return Ok(None) };
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        linear_change(f, &[[o, z, z], [c, o, z], [d, z, o]])?
    };
    Ok(Some(g.scale(field.inv(g.coeff(&x5)))))
}

/// The factor-existence system for one shape, in its own ring of unknowns.
pub fn factor_system(f: &MPoly, shape: FactorShape) -> Result<Ideal, IrreducibilityError> {
    match shape {
        FactorShape::LinearQuartic => linear_system(f),
        FactorShape::QuadraticCubic => quadratic_cubic_system(f),
    }
}

fn linear_system(f: &MPoly) -> Result<Ideal, IrreducibilityError> {
    let field = f.field().clone();
    let ring = Ring::new(field, &["y", "z", "b1", "b2"])?;
    let y = MPoly::var(&ring, 0);
    let z = MPoly::var(&ring, 1);
    let lin = (&MPoly::var(&ring, 2) * &y + &MPoly::var(&ring, 3) * &z).neg();
    let mut powers = vec![MPoly::one(&ring)];
    for _ in 0..5 {
        let next = powers.last().unwrap() * &lin;
        powers.push(next);
    }
    let mut acc = MPoly::zero(&ring);
    for &(m, c) in f.terms() {
        let rest = Monomial::from_exponents(&[m.exponent(1), m.exponent(2)])?;
        acc = acc.add_scaled(&powers[m.exponent(0) as usize], c, rest);
    }
    let unknowns = Ring::new(f.field().clone(), &["b1", "b2"])?;
    let gens = acc.split_prefix(2, &unknowns).into_iter().map(|(_, c)| c).collect();
    Ok(Ideal::new(&unknowns, gens)?)
}

fn monomials_of_degree(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push(Monomial::from_exponents(&[i, j, d - i - j]).unwrap());
        }
    }
    out
}

fn quadratic_cubic_system(f: &MPoly) -> Result<Ideal, IrreducibilityError> {
    let field = f.field().clone();
    // Cubic coefficients first so they carry the higher precedence.
    let names: Vec<String> = (1..=14).map(|i| format!("b{i}")).collect();
    let ring: RingRef = Ring::new(field.clone(), &names)?;
    let coeff = |mons: &[Monomial], first_var: usize| -> Vec<(Monomial, MPoly)> {
        // The x^d monomial gets coefficient 1, the others an unknown each.
        let mut k = first_var;
        mons.iter()
            .map(|&m| {
                if m.exponent(0) == m.degree() {
                    (m, MPoly::one(&ring))
                } else {
                    let v = MPoly::var(&ring, k);
                    k += 1;
                    (m, v)
                }
            })
            .collect()
    };
    let g3 = coeff(&monomials_of_degree(3), 0);
    let g2 = coeff(&monomials_of_degree(2), 9);
    let mut prod: FxHashMap<Monomial, MPoly> = FxHashMap::default();
    for (m2, c2) in &g2 {
        for (m3, c3) in &g3 {
            let e = prod.entry(m2.mul(*m3)).or_insert_with(|| MPoly::zero(&ring));
            *e = &*e + &(c2 * c3);
        }
    }
    let mut gens = Vec::with_capacity(21);
    for m in quintic_monomials() {
        let lhs = MPoly::constant(&ring, f.coeff_mono(m));
        let rhs = prod.remove(&m).unwrap_or_else(|| MPoly::zero(&ring));
        let eq = &rhs - &lhs;
        if !eq.is_zero() {
            gens.push(eq);
        }
    }
    Ok(Ideal::new(&ring, gens)?)
}

fn has_point(ideal: &Ideal, scope: Scope, budget: &Budget) -> Result<bool, IrreducibilityError> {
    let gb = buchberger(ideal, budget)?;
    if gb.is_one() {
        return Ok(false);
    }
    let s = match scope {
        Scope::Closure => return Ok(true),
        Scope::Extension(s) => s,
    };
    let field = ideal.ring().field().clone();
    let (big, emb) = extension_of_degree(&field, s)?;
    let ring = ideal.ring().with_field(big.clone());
    let gens = gb.polys().iter().map(|g| g.embed(&ring, &emb)).collect::<Result<Vec<_>, _>>()?;
    let embedded = Ideal::new(&ring, gens)?;
    if big.order() <= MAX_DEGREE {
        return Ok(!solve_over_fq(&embedded, budget)?.points.is_empty());
    }
    match solve_zero_dim(&embedded, budget) {
        Ok(points) => Ok(!points.is_empty()),
        Err(GroebnerError::NotZeroDimensional) => Err(IrreducibilityError::Unresolved(s)),
        Err(e) => Err(e.into()),
    }
}

/// Whether `F` is irreducible over the given scope.
pub fn is_irreducible(f: &MPoly, scope: Scope, budget: &Budget) -> Result<bool, IrreducibilityError> {
    if f.ring().nvars() != 3 || !is_quintic_form(f) {
        return Err(IrreducibilityError::NotQuintic);
    }
    let Some(g) = normalize_leading(f)? else { return Ok(false) };
    for shape in [FactorShape::LinearQuartic, FactorShape::QuadraticCubic] {
        if has_point(&factor_system(&g, shape)?, scope, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Irreducibility over the algebraic closure.
pub fn is_absolutely_irreducible(f: &MPoly, budget: &Budget) -> Result<bool, IrreducibilityError> {
    is_irreducible(f, Scope::Closure, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;
    use crate::parse::parse_poly;
    use crate::quintic::geometry_ring;

    fn form(q: u64, s: &str) -> MPoly {
        parse_poly(&geometry_ring(&FieldCtx::canonical(q).unwrap()), s).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let b = Budget::default();
        assert!(is_absolutely_irreducible(&form(11, "x*y*z^3 + x^5 + y^5"), &b).unwrap());
        assert!(!is_absolutely_irreducible(&form(11, "(x + y)*(x^4 + z^4)"), &b).unwrap());
        assert!(!is_absolutely_irreducible(&form(11, "x^5"), &b).unwrap());
        assert!(!is_absolutely_irreducible(&form(11, "y^5 + z^5"), &b).unwrap());
    }

    #[test]
    fn quadratic_times_cubic() {
        let b = Budget::default();
        let f = form(11, "(x^2 + 3*y*z + z^2)*(x^3 + y^3 + 2*z^3 + x*y*z)");
        assert!(!is_absolutely_irreducible(&f, &b).unwrap());
    }

    #[test]
    fn factors_only_over_extension() {
        let b = Budget::default();
        // x^2 - 2 y^2 has no root over F_11 but splits over F_121.
        let f = form(11, "(x^2 - 2*y^2)*(x^3 + y^3 + z^3)");
        assert!(!is_irreducible(&f, Scope::Extension(1), &b).unwrap());
        let g = form(11, "(x^2 - 2*y^2)*z^3 + x^5 + y^5");
        assert!(is_irreducible(&g, Scope::Extension(1), &b).unwrap());
    }
}
