//! Enumeration configurations: which coefficients are fixed, which are
//! brute-forced in the outer and inner layers, and which are solved for.
//!
//! A configuration is plain data and serializes to a self-contained
//! manifest. Forms and field elements are stored in the text grammar of
//! [`crate::parse`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{cube_class_reps, nonsplit_b_reps, nonsquare, FieldCtx, FieldDescriptor, FieldElem, FieldError};
use crate::mpoly::{MPoly, Ring, RingRef};
use crate::parse::{parse_elem, parse_poly, ParseError};
use crate::quintic::ModelCase;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("configuration {name}: {reason}")]
    Invalid { name: String, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A coefficient slot `a_index` attached to a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub index: usize,
    pub monomial: String,
}

/// One factor of a product set; `Full` and `Units` range over a single
/// coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SetFactor {
    Full,
    Units,
    Explicit { arity: usize, tuples: Vec<Vec<String>> },
}

impl SetFactor {
    pub fn arity(&self) -> usize {
        match self {
            SetFactor::Full | SetFactor::Units => 1,
            SetFactor::Explicit { arity, .. } => *arity,
        }
    }

    fn values(&self, field: &FieldCtx) -> Result<Vec<Vec<FieldElem>>, ParseError> {
        Ok(match self {
            SetFactor::Full => field.elements().map(|a| vec![a]).collect(),
            SetFactor::Units => field.units().map(|a| vec![a]).collect(),
            SetFactor::Explicit { tuples, .. } => tuples
                .iter()
                .map(|t| t.iter().map(|s| parse_elem(field, s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?,
        })
    }
}

/// A product of factors assigning values to the coefficient slots in
/// `indices` (in order). The empty product has exactly one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ProductSet {
    pub indices: Vec<usize>,
    pub factors: Vec<SetFactor>,
}

impl ProductSet {
    pub fn arity(&self) -> usize {
        self.factors.iter().map(SetFactor::arity).sum()
    }

    pub fn size(&self, field: &FieldCtx) -> u64 {
        let q = field.order() as u64;
        self.factors
            .iter()
            .map(|f| match f {
                SetFactor::Full => q,
                SetFactor::Units => q - 1,
                SetFactor::Explicit { tuples, .. } => tuples.len() as u64,
            })
            .product()
    }

    /// All points in lexicographic order of the factors.
    pub fn points(&self, field: &FieldCtx) -> Result<Vec<Vec<FieldElem>>, ParseError> {
        let mut out = vec![Vec::new()];
        for f in &self.factors {
            let vals = f.values(field)?;
            let mut next = Vec::with_capacity(out.len() * vals.len());
            for prefix in &out {
                for v in &vals {
                    let mut p = prefix.clone();
                    p.extend_from_slice(v);
                    next.push(p);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// One enumeration configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseConfig {
    /// Case tag as accepted by the CLI, e.g. `split1` or `nonsplit23`.
    pub tag: String,
    /// Distinguishes configurations sharing a tag.
    pub part: Option<String>,
    pub case: ModelCase,
    pub field: FieldDescriptor,
    /// 1 for split nodes and cusps, 2 for non-split nodes.
    pub algorithm: u8,
    pub eps: Option<String>,
    pub p_slots: Vec<Slot>,
    pub q_monomials: Vec<String>,
    /// Alternative assignments of the `q` coefficients; each is one run.
    pub q_coefficients: Vec<Vec<String>>,
    /// Slots kept symbolic while powering.
    pub k_indices: Vec<usize>,
    /// Slots solved for.
    pub i_indices: Vec<usize>,
    /// Values for the slots outside `k_indices`.
    pub outer: ProductSet,
    /// Values for the slots in `k_indices` but not in `i_indices`.
    pub inner: ProductSet,
}

impl CaseConfig {
    pub fn label(&self) -> String {
        match &self.part {
            Some(p) => format!("{}-{}", self.tag, p),
            None => self.tag.clone(),
        }
    }

    fn invalid(&self, reason: impl Into<String>) -> CatalogError {
        CatalogError::Invalid { name: self.label(), reason: reason.into() }
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let slots: Vec<usize> = self.p_slots.iter().map(|s| s.index).collect();
        let mut sorted = slots.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != slots.len() {
            return Err(self.invalid("duplicate slot index"));
        }
        if !self.k_indices.iter().all(|k| slots.contains(k)) {
            return Err(self.invalid("k index out of range"));
        }
        if !self.i_indices.iter().all(|i| self.k_indices.contains(i)) {
            return Err(self.invalid("i indices must be a subset of k indices"));
        }
        let mut outer_want: Vec<usize> = slots.iter().copied().filter(|s| !self.k_indices.contains(s)).collect();
        let mut inner_want: Vec<usize> =
            self.k_indices.iter().copied().filter(|s| !self.i_indices.contains(s)).collect();
        let mut outer_have = self.outer.indices.clone();
        let mut inner_have = self.inner.indices.clone();
        for v in [&mut outer_want, &mut inner_want, &mut outer_have, &mut inner_have] {
            v.sort();
        }
        if outer_want != outer_have || self.outer.arity() != self.outer.indices.len() {
            return Err(self.invalid("outer set does not cover the non-symbolic slots"));
        }
        if inner_want != inner_have || self.inner.arity() != self.inner.indices.len() {
            return Err(self.invalid("inner set does not cover the pinned slots"));
        }
        if self.q_coefficients.iter().any(|v| v.len() != self.q_monomials.len()) {
            return Err(self.invalid("q coefficient arity"));
        }
        let expected_alg = match self.case.kind() {
            crate::quintic::NodeKind::NonSplitNode => 2,
            _ => 1,
        };
        if self.algorithm != expected_alg {
            return Err(self.invalid("algorithm selector does not match the case"));
        }
        if self.i_indices.len() > crate::mpoly::MAX_VARS - 4 {
            return Err(self.invalid("too many solved slots"));
        }
        Ok(())
    }

    /// Number of (q-coefficient variant, outer point, inner point) slices.
    pub fn slice_count(&self) -> Result<u64, CatalogError> {
        let f = FieldCtx::from_descriptor(&self.field)?;
        Ok(self.q_coefficients.len() as u64 * self.outer.size(&f) * self.inner.size(&f))
    }

    /// Parses the configuration into polynomials.
    pub fn resolve(&self) -> Result<ResolvedConfig, CatalogError> {
        self.validate()?;
        let field = FieldCtx::from_descriptor(&self.field)?;
        let mut names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        names.extend(self.k_indices.iter().map(|k| format!("a{k}")));
        let ring = Ring::new(field.clone(), &names).map_err(|e| self.invalid(e.to_string()))?;
        let p_polys = self
            .p_slots
            .iter()
            .map(|s| Ok((s.index, parse_poly(&ring, &s.monomial)?)))
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let q_polys =
            self.q_monomials.iter().map(|m| parse_poly(&ring, m)).collect::<Result<Vec<_>, _>>()?;
        let q_values = self
            .q_coefficients
            .iter()
            .map(|v| v.iter().map(|s| parse_elem(&field, s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let eps = self.eps.as_deref().map(|s| parse_elem(&field, s)).transpose()?;
        Ok(ResolvedConfig {
            outer_points: self.outer.points(&field)?,
            inner_points: self.inner.points(&field)?,
            field,
            ring,
            eps,
            p_polys,
            q_polys,
            q_values,
            config: self.clone(),
        })
    }
}

/// A configuration with its forms parsed in the ring
/// `F_q[x, y, z, a_k...]`.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub config: CaseConfig,
    pub field: FieldCtx,
    pub ring: RingRef,
    pub eps: Option<FieldElem>,
    pub p_polys: Vec<(usize, MPoly)>,
    pub q_polys: Vec<MPoly>,
    pub q_values: Vec<Vec<FieldElem>>,
    pub outer_points: Vec<Vec<FieldElem>>,
    pub inner_points: Vec<Vec<FieldElem>>,
}

const SPLIT_P: [&str; 11] =
    ["x^4*z", "x^3*y*z", "x^2*y^2*z", "x*y^3*z", "y^4*z", "x^5", "x^4*y", "x^3*y^2", "x^2*y^3", "x*y^4", "y^5"];
const CUSP_P: [&str; 10] =
    ["y^3*z^2", "x^4*z", "x^3*y*z", "x^2*y^2*z", "y^4*z", "x^5", "x^4*y", "x^3*y^2", "x^2*y^3", "y^5"];

fn slots(monos: &[&str], first: usize) -> Vec<Slot> {
    monos.iter().enumerate().map(|(i, m)| Slot { index: first + i, monomial: m.to_string() }).collect()
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..=b).collect()
}

/// `b1` values for the split normal form: zero and the cube-class
/// representatives, where exchanging `x` and `y` identifies the class of
/// `zeta^2` with that of `zeta`.
pub fn split_b1_values(field: &FieldCtx) -> Vec<FieldElem> {
    let mut v = vec![FieldElem::ZERO];
    v.extend(cube_class_reps(field).into_iter().take(2));
    v
}

struct Ctx {
    field: FieldCtx,
    eps: FieldElem,
}

impl Ctx {
    fn fmt(&self, a: FieldElem) -> String {
        self.field.format(a)
    }
    fn eps_text(&self) -> String {
        format!("({})", self.fmt(self.eps))
    }
    fn zeta(&self) -> String {
        self.fmt(self.field.zeta())
    }
    fn nonsplit_q(&self) -> String {
        format!("(x^2 - {}*y^2)*z^3", self.eps_text())
    }
    fn nonsplit_cubic_x(&self) -> String {
        format!("x*(x^2 + 3*{}*y^2)*z^2", self.eps_text())
    }
    fn nonsplit_cubic_y(&self) -> String {
        format!("y*(3*x^2 + {}*y^2)*z^2", self.eps_text())
    }
    fn split_b1(&self) -> Vec<String> {
        split_b1_values(&self.field).into_iter().map(|a| self.fmt(a)).collect()
    }
    fn pairs(&self) -> SetFactor {
        let z = self.zeta();
        SetFactor::Explicit {
            arity: 2,
            tuples: vec![
                vec!["0".into(), "0".into()],
                vec!["1".into(), "0".into()],
                vec!["0".into(), "1".into()],
                vec!["1".into(), "1".into()],
                vec!["1".into(), z],
            ],
        }
    }
    fn zero_one_zeta(&self) -> SetFactor {
        SetFactor::Explicit { arity: 1, tuples: vec![vec!["0".into()], vec!["1".into()], vec![self.zeta()]] }
    }
    fn one_zeta(&self) -> SetFactor {
        SetFactor::Explicit { arity: 1, tuples: vec![vec!["1".into()], vec![self.zeta()]] }
    }

    #[allow(clippy::too_many_arguments)]
    fn config(
        &self,
        tag: &str,
        part: Option<&str>,
        case: ModelCase,
        p_slots: Vec<Slot>,
        q_monomials: Vec<String>,
        q_coefficients: Vec<Vec<String>>,
        k_indices: Vec<usize>,
        i_indices: Vec<usize>,
        outer: ProductSet,
        inner: ProductSet,
    ) -> CaseConfig {
        let algorithm = if case.kind() == crate::quintic::NodeKind::NonSplitNode { 2 } else { 1 };
        CaseConfig {
            tag: tag.to_string(),
            part: part.map(str::to_string),
            case,
            field: self.field.descriptor(),
            algorithm,
            eps: if algorithm == 2 { Some(self.fmt(self.eps)) } else { None },
            p_slots,
            q_monomials,
            q_coefficients,
            k_indices,
            i_indices,
            outer,
            inner,
        }
    }
}

fn set(indices: Vec<usize>, factors: Vec<SetFactor>) -> ProductSet {
    ProductSet { indices, factors }
}

fn full(n: usize) -> Vec<SetFactor> {
    vec![SetFactor::Full; n]
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// The enumeration configurations for `F_q`.
///
/// For `q` in {11, 13, 49} these are the tuned configurations known to be
/// tractable; any other field gets a generic split of the same shape
/// (five coefficients brute-forced, six solved).
pub fn case_catalog(field: &FieldCtx) -> Result<Vec<CaseConfig>, CatalogError> {
    let c = Ctx { field: field.clone(), eps: nonsquare(field) };
    let out = match field.order() {
        49 => catalog_49(&c),
        11 => catalog_11(&c),
        13 => catalog_13(&c),
        _ => catalog_generic(&c),
    };
    for cfg in &out {
        cfg.validate()?;
    }
    Ok(out)
}

fn split1_q() -> Vec<String> {
    strs(&["y^3*z^2", "x*y*z^3", "x^3*z^2"])
}

fn catalog_49(c: &Ctx) -> Vec<CaseConfig> {
    let sp = slots(&SPLIT_P, 1);
    let b1 = c.split_b1();
    vec![
        c.config(
            "split1",
            None,
            ModelCase::SplitNode1,
            sp.clone(),
            split1_q(),
            b1.iter().map(|b| vec![b.clone(), "1".into(), "1".into()]).collect(),
            range(1, 11),
            vec![2, 4, 5, 6, 7, 8, 9, 10, 11],
            ProductSet::default(),
            set(vec![1, 3], full(2)),
        ),
        c.config(
            "split2",
            None,
            ModelCase::SplitNode2,
            sp.clone(),
            strs(&["x*y*z^3"]),
            vec![strs(&["1"])],
            range(1, 11),
            range(3, 11),
            ProductSet::default(),
            set(vec![1, 2], vec![c.pairs()]),
        ),
        c.config(
            "nonsplit1",
            None,
            ModelCase::NonSplitNode1,
            sp.clone(),
            vec![c.nonsplit_q(), c.nonsplit_cubic_x(), c.nonsplit_cubic_y()],
            nonsplit1_b(c, false),
            range(1, 11),
            [vec![1, 3], range(5, 11)].concat(),
            ProductSet::default(),
            set(vec![2, 4], full(2)),
        ),
        c.config(
            "nonsplit23",
            None,
            ModelCase::NonSplitNode2,
            sp,
            vec![c.nonsplit_q()],
            vec![strs(&["1"])],
            range(1, 11),
            range(3, 11),
            ProductSet::default(),
            set(vec![1, 2], vec![c.zero_one_zeta(), SetFactor::Full]),
        ),
        cusp(c, range(2, 10), set(vec![1], vec![SetFactor::Units])),
    ]
}

/// `q` coefficient assignments for the first non-split family. The order
/// of the `q` monomials is `[Q, x-cubic, y-cubic]` unless `b_first`.
fn nonsplit1_b(c: &Ctx, b_first: bool) -> Vec<Vec<String>> {
    nonsplit_b_reps(&c.field)
        .into_iter()
        .map(|b| {
            let b = c.fmt(b);
            if b_first {
                vec![b, "1".into(), "1".into()]
            } else {
                vec!["1".into(), "1".into(), b]
            }
        })
        .collect()
}

fn cusp(c: &Ctx, i_indices: Vec<usize>, inner: ProductSet) -> CaseConfig {
    c.config(
        "cusp",
        None,
        ModelCase::Cusp,
        slots(&CUSP_P, 1),
        strs(&["x*y^3*z", "x*y^4", "x^2*z^3"]),
        vec![strs(&["0", "0", "1"]), strs(&["1", "0", "1"]), strs(&["0", "1", "1"]), strs(&["1", "1", "1"])],
        range(1, 10),
        i_indices,
        ProductSet::default(),
        inner,
    )
}

fn catalog_11(c: &Ctx) -> Vec<CaseConfig> {
    let sp = slots(&SPLIT_P, 1);
    let q_split1 = strs(&["y^3*z^2", "x^3*z^2", "x*y*z^3"]);
    vec![
        c.config(
            "split1",
            Some("i"),
            ModelCase::SplitNode1,
            sp.clone(),
            q_split1.clone(),
            vec![strs(&["1", "1", "1"])],
            range(1, 11),
            vec![1, 2, 3, 6, 7, 8, 9, 10],
            ProductSet::default(),
            set(vec![4, 5, 11], full(3)),
        ),
        c.config(
            "split1",
            Some("ii"),
            ModelCase::SplitNode1,
            sp.clone(),
            q_split1,
            vec![strs(&["0", "1", "1"])],
            range(1, 11),
            range(5, 11),
            ProductSet::default(),
            set(vec![1, 2, 3, 4], full(4)),
        ),
        c.config(
            "split2",
            None,
            ModelCase::SplitNode2,
            sp.clone(),
            strs(&["x*y*z^3"]),
            vec![strs(&["1"])],
            range(1, 11),
            range(5, 11),
            ProductSet::default(),
            set(vec![1, 2, 3, 4], vec![c.pairs(), SetFactor::Full, SetFactor::Full]),
        ),
        c.config(
            "nonsplit1",
            None,
            ModelCase::NonSplitNode1,
            sp.clone(),
            vec![c.nonsplit_cubic_y(), c.nonsplit_q(), c.nonsplit_cubic_x()],
            nonsplit1_b(c, true),
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), full(5)),
        ),
        c.config(
            "nonsplit23",
            None,
            ModelCase::NonSplitNode2,
            sp,
            vec![c.nonsplit_q()],
            vec![strs(&["1"])],
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), [vec![c.zero_one_zeta()], full(4)].concat()),
        ),
        cusp(c, vec![2, 4, 6, 7, 8, 9, 10], set(vec![1, 3, 5], vec![SetFactor::Units, SetFactor::Full, SetFactor::Full])),
    ]
}

fn catalog_13(c: &Ctx) -> Vec<CaseConfig> {
    let sp = slots(&SPLIT_P, 1);
    let b1 = c.split_b1();
    vec![
        c.config(
            "split1",
            None,
            ModelCase::SplitNode1,
            sp.clone(),
            split1_q(),
            b1.iter().map(|b| vec![b.clone(), "1".into(), "1".into()]).collect(),
            range(2, 11),
            range(6, 11),
            set(vec![1], full(1)),
            set(range(2, 5), full(4)),
        ),
        c.config(
            "split2",
            None,
            ModelCase::SplitNode2,
            sp.clone(),
            strs(&["x*y*z^3"]),
            vec![strs(&["1"])],
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), [vec![c.pairs()], full(3)].concat()),
        ),
        c.config(
            "nonsplit1",
            None,
            ModelCase::NonSplitNode1,
            sp.clone(),
            vec![c.nonsplit_q(), c.nonsplit_cubic_x(), c.nonsplit_cubic_y()],
            nonsplit1_b(c, false),
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), full(5)),
        ),
        c.config(
            "nonsplit2",
            None,
            ModelCase::NonSplitNode2,
            sp,
            vec![c.nonsplit_q()],
            vec![strs(&["1"])],
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), [vec![c.one_zeta()], full(4)].concat()),
        ),
        c.config(
            "nonsplit3",
            None,
            ModelCase::NonSplitNode3,
            slots(&SPLIT_P[5..], 6),
            vec![c.nonsplit_q()],
            vec![strs(&["1"])],
            range(6, 11),
            range(7, 11),
            ProductSet::default(),
            set(vec![6], full(1)),
        ),
        c.config(
            "cusp",
            None,
            ModelCase::Cusp,
            slots(&CUSP_P, 1),
            strs(&["x*y^3*z", "x*y^4", "x^2*z^3"]),
            vec![strs(&["0", "0", "1"]), strs(&["1", "0", "1"]), strs(&["0", "1", "1"]), strs(&["1", "1", "1"])],
            range(2, 10),
            vec![2, 3, 4, 6, 7, 8, 9],
            set(vec![1], vec![SetFactor::Units]),
            set(vec![5, 10], full(2)),
        ),
    ]
}

fn catalog_generic(c: &Ctx) -> Vec<CaseConfig> {
    let sp = slots(&SPLIT_P, 1);
    let b1 = c.split_b1();
    vec![
        c.config(
            "split1",
            None,
            ModelCase::SplitNode1,
            sp.clone(),
            split1_q(),
            b1.iter().map(|b| vec![b.clone(), "1".into(), "1".into()]).collect(),
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), full(5)),
        ),
        c.config(
            "split2",
            None,
            ModelCase::SplitNode2,
            sp.clone(),
            strs(&["x*y*z^3"]),
            vec![strs(&["1"])],
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), [vec![c.pairs()], full(3)].concat()),
        ),
        c.config(
            "nonsplit1",
            None,
            ModelCase::NonSplitNode1,
            sp.clone(),
            vec![c.nonsplit_q(), c.nonsplit_cubic_x(), c.nonsplit_cubic_y()],
            nonsplit1_b(c, false),
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), full(5)),
        ),
        c.config(
            "nonsplit23",
            None,
            ModelCase::NonSplitNode2,
            sp,
            vec![c.nonsplit_q()],
            vec![strs(&["1"])],
            range(1, 11),
            range(6, 11),
            ProductSet::default(),
            set(range(1, 5), [vec![c.zero_one_zeta()], full(4)].concat()),
        ),
        cusp(c, range(6, 10), set(range(1, 5), [vec![SetFactor::Units], full(4)].concat())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_sizes() {
        let f11 = FieldCtx::canonical(11).unwrap();
        let cat = case_catalog(&f11).unwrap();
        assert_eq!(cat.len(), 6);
        let ns1 = cat.iter().find(|c| c.tag == "nonsplit1").unwrap();
        assert_eq!(ns1.q_coefficients.iter().map(|v| v[0].clone()).collect::<Vec<_>>(), ["0", "6", "10"]);
        let split2 = cat.iter().find(|c| c.tag == "split2").unwrap();
        assert_eq!(split2.slice_count().unwrap(), 5 * 121);

        let f13 = FieldCtx::canonical(13).unwrap();
        let cat = case_catalog(&f13).unwrap();
        assert_eq!(cat.len(), 6);
        let s1 = cat.iter().find(|c| c.tag == "split1").unwrap();
        assert_eq!(s1.outer.indices, vec![1]);
        assert_eq!(s1.i_indices, range(6, 11));
        assert_eq!(s1.inner.size(&f13), 13u64.pow(4));

        let f49 = FieldCtx::canonical(49).unwrap();
        let cat = case_catalog(&f49).unwrap();
        assert_eq!(cat.len(), 5);
        let cusp = cat.iter().find(|c| c.tag == "cusp").unwrap();
        assert_eq!(cusp.q_coefficients.len(), 4);
        assert_eq!(cusp.inner.size(&f49), 48);
    }

    #[test]
    fn resolves_and_round_trips() {
        for q in [11, 13, 49] {
            let f = FieldCtx::canonical(q).unwrap();
            for cfg in case_catalog(&f).unwrap() {
                let json = serde_json::to_string(&cfg).unwrap();
                let back: CaseConfig = serde_json::from_str(&json).unwrap();
                assert_eq!(back, cfg);
                let r = cfg.resolve().unwrap();
                assert_eq!(r.p_polys.len(), cfg.p_slots.len());
            }
        }
    }
}
