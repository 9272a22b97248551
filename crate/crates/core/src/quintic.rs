//! Quintic plane models with a unique double point at `(0:0:1)` and the
//! certified singularity analysis used to filter enumeration candidates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{FieldCtx, FieldElem};
use crate::groebner::{buchberger, radical_vanishes, Budget, GroebnerError, Ideal};
use crate::mpoly::{MPoly, Monomial, PolyError, Ring, RingRef};
use crate::parse::{parse_poly, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("form is not homogeneous of degree 5 in x, y, z")]
    NotQuintic,
    #[error("form must live in a ring whose first variables are x, y, z")]
    BadRing,
    #[error("the z^3 part does not match the {0:?} shape")]
    WrongShape(ModelCase),
    #[error("non-split models need a non-square epsilon")]
    MissingEpsilon,
    #[error("the z^3 part is not xy, x^2 or x^2 - e*y^2 with e a nonsquare")]
    UnknownShape,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// The normal-form families of quintic models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelCase {
    #[serde(rename = "split1")]
    SplitNode1,
    #[serde(rename = "split2")]
    SplitNode2,
    #[serde(rename = "nonsplit1")]
    NonSplitNode1,
    #[serde(rename = "nonsplit2")]
    NonSplitNode2,
    #[serde(rename = "nonsplit3")]
    NonSplitNode3,
    Cusp,
}

impl ModelCase {
    pub fn kind(self) -> NodeKind {
        match self {
            ModelCase::SplitNode1 | ModelCase::SplitNode2 => NodeKind::SplitNode,
            ModelCase::NonSplitNode1 | ModelCase::NonSplitNode2 | ModelCase::NonSplitNode3 => NodeKind::NonSplitNode,
            ModelCase::Cusp => NodeKind::Cusp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    SplitNode,
    NonSplitNode,
    Cusp,
}

/// Classification of a binary quadratic form by its discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticType {
    Split,
    NonSplit,
    Degenerate,
}

/// The ring `F[x, y, z]`.
pub fn geometry_ring(field: &FieldCtx) -> RingRef {
    Ring::new(field.clone(), &["x", "y", "z"]).expect("three variables")
}

fn check_geometric(ring: &RingRef) -> Result<(), ModelError> {
    let v = ring.vars();
    if v.len() < 3 || v[0] != "x" || v[1] != "y" || v[2] != "z" {
        return Err(ModelError::BadRing);
    }
    Ok(())
}

/// Degree in the first three variables of every term is 5.
pub fn is_quintic_form(f: &MPoly) -> bool {
    !f.is_zero() && f.terms().iter().all(|(m, _)| m.exponent(0) + m.exponent(1) + m.exponent(2) == 5)
}

/// The quadratic part `Q` of `F = Q z^3 + ...` as `(alpha, beta, gamma)`
/// for `alpha x^2 + beta xy + gamma y^2`. Only meaningful for concrete
/// forms.
pub fn z3_part(f: &MPoly) -> [FieldElem; 3] {
    [f.coeff(&[2, 0, 3]), f.coeff(&[1, 1, 3]), f.coeff(&[0, 2, 3])]
}

/// A quintic model of one of the normal-form families. The form may carry
/// extra variables after `x, y, z` (symbolic coefficients).
#[derive(Clone, Debug)]
pub struct QuinticModel {
    case: ModelCase,
    form: MPoly,
    eps: Option<FieldElem>,
}

impl QuinticModel {
    pub fn new(case: ModelCase, form: MPoly, eps: Option<FieldElem>) -> Result<Self, ModelError> {
        check_geometric(form.ring())?;
        if !is_quintic_form(&form) {
            return Err(ModelError::NotQuintic);
        }
        let f = form.field().clone();
        let expected = match case.kind() {
            NodeKind::SplitNode => [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO],
            NodeKind::Cusp => [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO],
            NodeKind::NonSplitNode => {
                let e = eps.ok_or(ModelError::MissingEpsilon)?;
                if f.is_square(e) {
                    return Err(ModelError::MissingEpsilon);
                }
                [FieldElem::ONE, FieldElem::ZERO, f.neg(e)]
            }
        };
        // The z^3 part must be exactly Q with no symbolic contributions.
        let z3: Vec<_> = form.terms().iter().filter(|(m, _)| m.exponent(2) == 3).collect();
        let want = [([2, 0, 3], expected[0]), ([1, 1, 3], expected[1]), ([0, 2, 3], expected[2])];
        let mut n_expected = 0;
        for (e, c) in want {
            if form.coeff(&e) != c {
                return Err(ModelError::WrongShape(case));
            }
            if !c.is_zero() {
                n_expected += 1;
            }
        }
        if z3.len() != n_expected {
            return Err(ModelError::WrongShape(case));
        }
        Ok(QuinticModel { case, form, eps })
    }

    pub fn parse(field: &FieldCtx, case: ModelCase, text: &str, eps: Option<FieldElem>) -> Result<Self, ModelError> {
        let ring = geometry_ring(field);
        Self::new(case, parse_poly(&ring, text)?, eps)
    }

    /// Reads the family off the `z^3` part: `xy` is split, `x^2` is a cusp
    /// and `x^2 - e y^2` with `e` a nonsquare is non-split. The node cases
    /// share their Hasse-Witt computation, so the first of each is used.
    pub fn infer(form: MPoly) -> Result<Self, ModelError> {
        let f = form.field().clone();
        let [a, b, c] = z3_part(&form);
        let (case, eps) = if a.is_zero() && b == FieldElem::ONE && c.is_zero() {
            (ModelCase::SplitNode1, None)
        } else if a == FieldElem::ONE && b.is_zero() && c.is_zero() {
            (ModelCase::Cusp, None)
        } else if a == FieldElem::ONE && b.is_zero() && !f.is_square(f.neg(c)) {
            (ModelCase::NonSplitNode1, Some(f.neg(c)))
        } else {
            return Err(ModelError::UnknownShape);
        };
        Self::new(case, form, eps)
    }

    pub fn case(&self) -> ModelCase {
        self.case
    }
    pub fn form(&self) -> &MPoly {
        &self.form
    }
    pub fn field(&self) -> &FieldCtx {
        self.form.field()
    }
    pub fn eps(&self) -> Option<FieldElem> {
        self.eps
    }
    pub fn is_symbolic(&self) -> bool {
        self.form.ring().nvars() > 3
    }
}

/// Classifies `alpha x^2 + beta xy + gamma y^2` by its discriminant.
pub fn node_split_type(field: &FieldCtx, q: [FieldElem; 3]) -> QuadraticType {
    let [a, b, c] = q;
    let disc = field.sub(field.mul(b, b), field.mul(field.from_int(4), field.mul(a, c)));
    if disc.is_zero() {
        QuadraticType::Degenerate
    } else if field.is_square(disc) {
        QuadraticType::Split
    } else {
        QuadraticType::NonSplit
    }
}

/// [`node_split_type`] for a quadratic form given as a polynomial in a ring
/// whose first two variables are `x, y`.
pub fn node_split_type_poly(q: &MPoly) -> QuadraticType {
    let n = q.ring().nvars();
    let e = |a: u32, b: u32| {
        let mut v = vec![0; n];
        v[0] = a;
        v[1] = b;
        q.coeff(&v)
    };
    node_split_type(q.field(), [e(2, 0), e(1, 1), e(0, 2)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum SingularityStatus {
    Smooth,
    UniqueDouble { kind: NodeKind, point: [FieldElem; 3] },
    MultipleOrWorse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub status: SingularityStatus,
    /// Unique singular point of multiplicity 2 that is an ordinary node or
    /// a cusp with nonvanishing cubic term along the tangent.
    pub genus5_ok: bool,
}

impl SingularityReport {
    fn worse() -> Self {
        SingularityReport { status: SingularityStatus::MultipleOrWorse, genus5_ok: false }
    }
    pub fn kind(&self) -> Option<NodeKind> {
        match self.status {
            SingularityStatus::UniqueDouble { kind, .. } => Some(kind),
            _ => None,
        }
    }
}

/// Projective points of `P^2(F)` normalized so the last nonzero
/// coordinate is 1.
pub fn projective_points(field: &FieldCtx) -> Vec<[FieldElem; 3]> {
    let mut pts = Vec::with_capacity((field.order() as usize).pow(2) + field.order() as usize + 1);
    for a in field.elements() {
        for b in field.elements() {
            pts.push([a, b, FieldElem::ONE]);
        }
    }
    for a in field.elements() {
        pts.push([a, FieldElem::ONE, FieldElem::ZERO]);
    }
    pts.push([FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]);
    pts
}

/// Rational singular points of a plane curve by exhaustive scan.
pub fn rational_singular_points(f: &MPoly) -> Vec<[FieldElem; 3]> {
    let parts = [f.clone(), f.derivative(0), f.derivative(1), f.derivative(2)];
    projective_points(f.field())
        .into_iter()
        .filter(|p| parts.iter().all(|g| g.eval(p).map(|v| v.is_zero()).unwrap_or(false)))
        .collect()
}

/// Substitutes `(x, y, z) -> T (x, y, z)` for a 3x3 matrix `T`.
pub fn linear_change(f: &MPoly, t: &[[FieldElem; 3]; 3]) -> Result<MPoly, PolyError> {
    let ring = f.ring();
    let vars: Vec<MPoly> = (0..3).map(|i| MPoly::var(ring, i)).collect();
    let mut images: Vec<MPoly> = Vec::with_capacity(ring.nvars());
    for row in t {
        let mut acc = MPoly::zero(ring);
        for (j, &c) in row.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.try_add(&vars[j].scale(c))?;
            }
        }
        images.push(acc);
    }
    for i in 3..ring.nvars() {
        images.push(MPoly::var(ring, i));
    }
    f.substitute_linear(&images)
}

/// A matrix whose third column is the given point, so that `(0:0:1)`
/// maps to it.
pub fn move_to_origin(p: [FieldElem; 3]) -> [[FieldElem; 3]; 3] {
    let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
    if !p[2].is_zero() {
        [[o, z, p[0]], [z, o, p[1]], [z, z, p[2]]]
    } else if !p[1].is_zero() {
        [[o, z, p[0]], [z, z, p[1]], [z, o, z]]
    } else {
        [[z, z, p[0]], [z, o, z], [o, z, z]]
    }
}

/// Certified singularity analysis of a plane quintic over `F_q`.
pub fn classify_singularity(f: &MPoly, budget: &Budget) -> Result<SingularityReport, ModelError> {
    check_geometric(f.ring())?;
    if f.ring().nvars() != 3 || !is_quintic_form(f) {
        return Err(ModelError::NotQuintic);
    }
    let rational = rational_singular_points(f);
    match rational.len() {
        0 => {
            // A unique singular point would be Galois-stable, hence rational;
            // so either the curve is smooth or it has several singular points.
            if jacobian_empty(f, budget)? {
                Ok(SingularityReport { status: SingularityStatus::Smooth, genus5_ok: false })
            } else {
                Ok(SingularityReport::worse())
            }
        }
        1 => {
            let p = rational[0];
            let g = if p == [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE] {
                f.clone()
            } else {
                linear_change(f, &move_to_origin(p))?
            };
            analyse_at_origin(&g, p, budget)
        }
        _ => Ok(SingularityReport::worse()),
    }
}

fn dehomogenize_z(f: &MPoly) -> MPoly {
    f.substitute_values(&[(2, FieldElem::ONE)])
}

/// The Jacobian system restricted to the line `z = 0` away from `(1:0:0)`,
/// i.e. in the chart `y = 1`.
fn line_at_infinity_clear(f: &MPoly, budget: &Budget) -> Result<bool, ModelError> {
    let ring = f.ring();
    let gens: Vec<MPoly> = [f.clone(), f.derivative(0), f.derivative(1), f.derivative(2)]
        .iter()
        .map(|g| g.substitute_values(&[(1, FieldElem::ONE), (2, FieldElem::ZERO)]))
        .collect();
    Ok(buchberger(&Ideal::new(ring, gens)?, budget)?.is_one())
}

fn jacobian_empty(f: &MPoly, budget: &Budget) -> Result<bool, ModelError> {
    let ring = f.ring();
    let chart: Vec<MPoly> =
        [f.clone(), f.derivative(0), f.derivative(1), f.derivative(2)].iter().map(dehomogenize_z).collect();
    if !buchberger(&Ideal::new(ring, chart)?, budget)?.is_one() {
        return Ok(false);
    }
    if !line_at_infinity_clear(f, budget)? {
        return Ok(false);
    }
    // (1:0:0) was covered by the rational scan.
    Ok(true)
}

fn analyse_at_origin(g: &MPoly, point: [FieldElem; 3], budget: &Budget) -> Result<SingularityReport, ModelError> {
    let ring = g.ring();
    let field = ring.field().clone();
    let chart: Vec<MPoly> =
        [g.clone(), g.derivative(0), g.derivative(1), g.derivative(2)].iter().map(dehomogenize_z).collect();
    let ideal = Ideal::new(ring, chart)?;
    for v in 0..2 {
        if !radical_vanishes(&MPoly::var(ring, v), &ideal, budget)? {
            return Ok(SingularityReport::worse());
        }
    }
    if !line_at_infinity_clear(g, budget)? {
        return Ok(SingularityReport::worse());
    }
    let q = z3_part(g);
    if q.iter().all(|c| c.is_zero()) {
        return Ok(SingularityReport::worse());
    }
    let kind = match node_split_type(&field, q) {
        QuadraticType::Split => NodeKind::SplitNode,
        QuadraticType::NonSplit => NodeKind::NonSplitNode,
        QuadraticType::Degenerate => NodeKind::Cusp,
    };
    let genus5_ok = match kind {
        NodeKind::Cusp => {
            let [a, b, _] = q;
            let (u, v) = if a.is_zero() { (FieldElem::ONE, FieldElem::ZERO) } else { (field.neg(b), field.mul(field.from_int(2), a)) };
            let cubic = g.filter_terms(|m| m.exponent(2) == 2);
            !cubic.eval(&[u, v, FieldElem::ONE])?.is_zero()
        }
        _ => true,
    };
    Ok(SingularityReport { status: SingularityStatus::UniqueDouble { kind, point }, genus5_ok })
}

/// The coefficient vector of a concrete form over the 21 quintic monomials
/// in decreasing grevlex order (used for deduplication and sorting).
pub fn coefficient_vector(f: &MPoly) -> Vec<FieldElem> {
    quintic_monomials().iter().map(|&m| f.coeff_mono(m)).collect()
}

/// All 21 monomials of degree 5 in `x, y, z`, in decreasing grevlex order.
pub fn quintic_monomials() -> Vec<Monomial> {
    let mut out = Vec::with_capacity(21);
    for i in (0..=5u32).rev() {
        for j in (0..=5 - i).rev() {
            out.push(Monomial::from_exponents(&[i, j, 5 - i - j]).unwrap());
        }
    }
    out.sort_by(|a, b| b.key().cmp(&a.key()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(q: u64, s: &str) -> MPoly {
        let f = FieldCtx::canonical(q).unwrap();
        parse_poly(&geometry_ring(&f), s).unwrap()
    }

    #[test]
    fn xyz3_plus_fermat_is_split_node() {
        let f = form(11, "x*y*z^3 + x^5 + y^5");
        let r = classify_singularity(&f, &Budget::default()).unwrap();
        assert_eq!(r.kind(), Some(NodeKind::SplitNode));
        assert!(r.genus5_ok);
    }

    #[test]
    fn double_singularity() {
        let f = form(7, "x^2*z^3 + y^5");
        let r = classify_singularity(&f, &Budget::default()).unwrap();
        assert_eq!(r.status, SingularityStatus::MultipleOrWorse);
    }

    #[test]
    fn fermat_is_smooth() {
        let f = form(11, "x^5 + y^5 + z^5");
        let r = classify_singularity(&f, &Budget::default()).unwrap();
        assert_eq!(r.status, SingularityStatus::Smooth);
    }

    #[test]
    fn moved_singular_point() {
        // xyz^3 + x^5 + y^5 with z -> z + x: singular point moves to (0:0:1)
        // still but the form changes; with x <-> z it moves to (1:0:0).
        let f = form(11, "z*y*x^3 + z^5 + y^5");
        let r = classify_singularity(&f, &Budget::default()).unwrap();
        assert_eq!(r.kind(), Some(NodeKind::SplitNode));
        match r.status {
            SingularityStatus::UniqueDouble { point, .. } => {
                assert_eq!(point, [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO])
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn quadratic_types() {
        let f11 = FieldCtx::canonical(11).unwrap();
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        assert_eq!(node_split_type(&f11, [z, o, z]), QuadraticType::Split);
        assert_eq!(node_split_type(&f11, [o, z, f11.from_int(-2)]), QuadraticType::NonSplit);
        assert_eq!(node_split_type(&f11, [o, z, z]), QuadraticType::Degenerate);
    }

    #[test]
    fn model_shape_checks() {
        let f11 = FieldCtx::canonical(11).unwrap();
        assert!(QuinticModel::parse(&f11, ModelCase::SplitNode2, "x*y*z^3 + x^5 + y^5", None).is_ok());
        assert!(QuinticModel::parse(&f11, ModelCase::Cusp, "x*y*z^3 + x^5 + y^5", None).is_err());
        let two = FieldElem(2);
        assert!(QuinticModel::parse(&f11, ModelCase::NonSplitNode2, "(x^2-2*y^2)*z^3 + x^5", Some(two)).is_ok());
        assert!(QuinticModel::parse(&f11, ModelCase::SplitNode2, "x*y*z^3 + x^4", None).is_err());
    }
}
