//! The hybrid enumeration: brute force over some coefficients, solve the
//! vanishing of the Hasse-Witt entries for the rest, then filter the
//! roots through the singularity and irreducibility checks.
//!
//! The slice grid is `(q-coefficient variant, outer point, inner point)`,
//! numbered in that lexicographic order. For each variant and outer point
//! the symbolic Hasse-Witt entries are computed once and shared by the
//! inner slices, which run in parallel.

use std::collections::BTreeSet;
use std::ops::Range;
use std::rc::Rc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{case_catalog, CaseConfig, CatalogError, ResolvedConfig};
use crate::ff::{FieldCtx, FieldElem};
use crate::groebner::{solve_over_fq, Budget, GroebnerError, Ideal};
use crate::hasse_witt::{hasse_witt, symbolic_hasse_witt, HwError};
use crate::irreducibility::{is_absolutely_irreducible, IrreducibilityError};
use crate::mpoly::{MPoly, PolyError, Ring, RingRef};
use crate::quintic::{
    classify_singularity, coefficient_vector, geometry_ring, ModelError, NodeKind, QuinticModel, SingularityStatus,
};

#[derive(Debug, Error)]
pub enum EnumError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hw(#[from] HwError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no configuration tagged {0:?} for this field")]
    UnknownCase(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub budget: Budget,
    /// Slices with `q^(unknowns)` below this are searched exhaustively
    /// without trying Groebner bases.
    pub exhaustive_threshold: u64,
    /// Largest search space the exhaustive fallback accepts after a
    /// Groebner budget trips.
    pub exhaustive_cap: u64,
    /// Only slices with index in this half-open range.
    pub slices: Option<(u64, u64)>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { budget: Budget::default(), exhaustive_threshold: 10_000_000, exhaustive_cap: 200_000_000, slices: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Groebner,
    Exhaustive,
    /// Exhaustive after the Groebner budget tripped.
    Fallback,
    Unresolved,
}

/// Outcome of one slice. Reports keep records only for slices that had
/// solutions or did not resolve; the rest are reflected in the counters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceRecord {
    pub index: u64,
    pub variant: usize,
    pub outer: Vec<String>,
    pub inner: Vec<String>,
    pub solver: SolverKind,
    pub solutions: u64,
    pub survivors: u64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub slices_total: u64,
    pub slices_run: u64,
    pub groebner: u64,
    pub exhaustive: u64,
    pub fallback: u64,
    pub unresolved: u64,
    /// Sum of `q^(unknowns)` over resolved slices.
    pub points_covered: u128,
    pub solutions: u64,
    pub rejected_singularity: u64,
    pub rejected_reducible: u64,
    /// Candidates where "unique singular point" and "unique node" differ.
    pub reading_disagreements: u64,
}

impl Counters {
    fn absorb(&mut self, o: &Counters) {
        self.slices_run += o.slices_run;
        self.groebner += o.groebner;
        self.exhaustive += o.exhaustive;
        self.fallback += o.fallback;
        self.unresolved += o.unresolved;
        self.points_covered += o.points_covered;
        self.solutions += o.solutions;
        self.rejected_singularity += o.rejected_singularity;
        self.rejected_reducible += o.rejected_reducible;
        self.reading_disagreements += o.reading_disagreements;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub slice: u64,
    pub form: String,
    pub kind: NodeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoneFound,
    Found,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub manifest: CaseConfig,
    pub options: RunOptions,
    pub slices: Vec<SliceRecord>,
    pub survivors: Vec<Survivor>,
    pub counters: Counters,
    pub verdict: Verdict,
    /// Not part of the reproducible content.
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn unresolved_slices(&self) -> BTreeSet<u64> {
        self.slices.iter().filter(|s| s.solver == SolverKind::Unresolved).map(|s| s.index).collect()
    }

    /// The report with timing removed, for comparisons.
    pub fn without_timing(&self) -> RunReport {
        RunReport { timing: None, ..self.clone() }
    }

    fn finish(&mut self) {
        self.slices.sort_by_key(|s| s.index);
        let field = FieldCtx::from_descriptor(&self.manifest.field).expect("manifest field");
        let ring = geometry_ring(&field);
        let mut keyed: Vec<(u64, Vec<FieldElem>, Survivor)> = self
            .survivors
            .drain(..)
            .map(|s| {
                let f = crate::parse::parse_poly(&ring, &s.form).expect("survivor text");
                (s.slice, coefficient_vector(&f), s)
            })
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut seen = BTreeSet::new();
        self.survivors = keyed.into_iter().filter(|k| seen.insert(k.1.clone())).map(|k| k.2).collect();
        self.verdict = if self.counters.unresolved > 0 {
            Verdict::Incomplete
        } else if self.survivors.is_empty() {
            Verdict::NoneFound
        } else {
            Verdict::Found
        };
    }
}

/// Solutions of a slice system together with how they were obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSolution {
    pub solver: SolverKind,
    pub points: Vec<Vec<FieldElem>>,
    pub note: Option<String>,
}

fn search_space(q: u32, n: usize) -> u128 {
    (q as u128).saturating_pow(n as u32)
}

/// All common zeros in `F_q^n` by depth-first search with pruning: a
/// branch dies as soon as some equation becomes a nonzero constant.
pub fn solve_exhaustive(eqs: &[MPoly], ring: &RingRef) -> Vec<Vec<FieldElem>> {
    let n = ring.nvars();
    let field = ring.field().clone();
    if eqs.iter().any(|e| e.is_constant() && !e.is_zero()) {
        return Vec::new();
    }
    // Variables of small equations first, so they get decided early.
    let mut by_support: Vec<&MPoly> = eqs.iter().filter(|e| !e.is_zero()).collect();
    by_support.sort_by_key(|e| (e.support_vars().len(), e.len()));
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for e in &by_support {
        for v in e.support_vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    for v in 0..n {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let polys: Vec<Rc<MPoly>> = by_support.into_iter().map(|e| Rc::new(e.clone())).collect();
    let mut out = Vec::new();
    let mut point = vec![FieldElem::ZERO; n];
    dfs(&field, &order, 0, polys, &mut point, &mut out);
    out.sort();
    out
}

fn dfs(
    field: &FieldCtx,
    order: &[usize],
    depth: usize,
    polys: Vec<Rc<MPoly>>,
    point: &mut Vec<FieldElem>,
    out: &mut Vec<Vec<FieldElem>>,
) {
    if depth == order.len() {
        out.push(point.clone());
        return;
    }
    let v = order[depth];
    'values: for val in field.elements() {
        let mut next = Vec::with_capacity(polys.len());
        for p in &polys {
            if p.degree_in(v) == 0 {
                next.push(p.clone());
                continue;
            }
            let s = p.substitute_values(&[(v, val)]);
            if s.is_zero() {
                continue;
            }
            if s.is_constant() {
                continue 'values;
            }
            next.push(Rc::new(s));
        }
        point[v] = val;
        dfs(field, order, depth + 1, next, point, out);
    }
}

/// Solves a slice system: exhaustively below the threshold, otherwise by
/// Groebner bases with the exhaustive search as fallback.
pub fn solve_slice(eqs: &[MPoly], ring: &RingRef, opts: &RunOptions) -> Result<SliceSolution, GroebnerError> {
    let space = search_space(ring.field().order(), ring.nvars());
    if space < opts.exhaustive_threshold as u128 {
        return Ok(SliceSolution { solver: SolverKind::Exhaustive, points: solve_exhaustive(eqs, ring), note: None });
    }
    match solve_over_fq(&Ideal::new(ring, eqs.to_vec())?, &opts.budget) {
        Ok(s) => Ok(SliceSolution { solver: SolverKind::Groebner, points: s.points, note: None }),
        Err(GroebnerError::BudgetExceeded(what)) => {
            if space <= opts.exhaustive_cap as u128 {
                Ok(SliceSolution {
                    solver: SolverKind::Fallback,
                    points: solve_exhaustive(eqs, ring),
                    note: Some(format!("budget exceeded ({what}); searched exhaustively")),
                })
            } else {
                Ok(SliceSolution {
                    solver: SolverKind::Unresolved,
                    points: Vec::new(),
                    note: Some(format!("budget exceeded ({what}); search space {space} above cap")),
                })
            }
        }
        Err(e) => Err(e),
    }
}

/// Filter outcome for one candidate form.
enum Candidate {
    Survivor(Survivor),
    RejectedSingular { disagreement: bool },
    RejectedReducible,
    Unresolved(String),
}

fn examine(
    form: MPoly,
    cfg: &ResolvedConfig,
    slice: u64,
    budget: &Budget,
) -> Result<Candidate, EnumError> {
    let report = match classify_singularity(&form, budget) {
        Ok(r) => r,
        Err(ModelError::Groebner(GroebnerError::BudgetExceeded(w))) => {
            return Ok(Candidate::Unresolved(format!("singularity check: {w}")))
        }
        Err(e) => return Err(e.into()),
    };
    let expected = cfg.config.case.kind();
    let unique_point = matches!(report.status, SingularityStatus::UniqueDouble { .. });
    let unique_node = matches!(report.kind(), Some(NodeKind::SplitNode | NodeKind::NonSplitNode));
    let disagreement = expected != NodeKind::Cusp && unique_point != unique_node;
    if !report.genus5_ok || report.kind() != Some(expected) {
        return Ok(Candidate::RejectedSingular { disagreement });
    }
    match is_absolutely_irreducible(&form, budget) {
        Ok(true) => {}
        Ok(false) => return Ok(Candidate::RejectedReducible),
        Err(IrreducibilityError::Groebner(GroebnerError::BudgetExceeded(w))) => {
            return Ok(Candidate::Unresolved(format!("irreducibility check: {w}")))
        }
        Err(e) => return Err(EnumError::Invariant(format!("irreducibility check failed: {e}"))),
    }
    // Independent numeric confirmation of the solve path.
    let model = QuinticModel::new(cfg.config.case, form.clone(), cfg.eps)?;
    if !hasse_witt(&model)?.is_zero() {
        return Err(EnumError::Invariant(format!("solution {form} has a nonzero Hasse-Witt matrix")));
    }
    Ok(Candidate::Survivor(Survivor { slice, form: form.to_string(), kind: expected }))
}

/// The symbolic form for one variant and outer point, in the ring
/// `F_q[x, y, z, a_k...]`.
fn symbolic_form(cfg: &ResolvedConfig, variant: usize, outer: &[FieldElem]) -> MPoly {
    let ring = &cfg.ring;
    let c = &cfg.config;
    let mut form = MPoly::zero(ring);
    for (idx, p) in &cfg.p_polys {
        if let Some(pos) = c.k_indices.iter().position(|k| k == idx) {
            form = &form + &(p * &MPoly::var(ring, 3 + pos));
        } else {
            let pos = c.outer.indices.iter().position(|k| k == idx).expect("validated");
            form = &form + &p.scale(outer[pos]);
        }
    }
    for (qp, &b) in cfg.q_polys.iter().zip(&cfg.q_values[variant]) {
        form = &form + &qp.scale(b);
    }
    form
}

struct SliceResult {
    record: SliceRecord,
    survivors: Vec<Survivor>,
    counters: Counters,
}

struct Block<'a> {
    cfg: &'a ResolvedConfig,
    variant: usize,
    outer: &'a [FieldElem],
    form: MPoly,
    equations: Vec<MPoly>,
    /// Ring of the solved unknowns.
    solve_ring: RingRef,
    geometry: RingRef,
}

impl Block<'_> {
    fn run_slice(&self, index: u64, inner: &[FieldElem], opts: &RunOptions) -> Result<SliceResult, EnumError> {
        let c = &self.cfg.config;
        let field = &self.cfg.field;
        // Pin the inner coordinates and move to the ring of solved unknowns.
        let pin: Vec<(usize, FieldElem)> = c
            .inner
            .indices
            .iter()
            .zip(inner)
            .map(|(idx, &v)| (c.k_indices.iter().position(|k| k == idx).expect("validated"), v))
            .collect();
        let map: Vec<usize> =
            c.k_indices.iter().map(|k| c.i_indices.iter().position(|i| i == k).unwrap_or(0)).collect();
        let mut eqs: Vec<MPoly> = Vec::new();
        for e in &self.equations {
            let s = e.substitute_values(&pin).rename_into(&self.solve_ring, &map)?;
            if !s.is_zero() {
                let m = s.monic();
                if !eqs.contains(&m) {
                    eqs.push(m);
                }
            }
        }
        let sol = solve_slice(&eqs, &self.solve_ring, opts)?;
        let mut counters = Counters { slices_run: 1, ..Counters::default() };
        match sol.solver {
            SolverKind::Groebner => counters.groebner += 1,
            SolverKind::Exhaustive => counters.exhaustive += 1,
            SolverKind::Fallback => counters.fallback += 1,
            SolverKind::Unresolved => counters.unresolved += 1,
        }
        let fmt = |v: &[FieldElem]| v.iter().map(|&a| field.format(a)).collect::<Vec<_>>();
        let mut record = SliceRecord {
            index,
            variant: self.variant,
            outer: fmt(self.outer),
            inner: fmt(inner),
            solver: sol.solver,
            solutions: sol.points.len() as u64,
            survivors: 0,
            note: sol.note,
        };
        let mut survivors = Vec::new();
        if sol.solver != SolverKind::Unresolved {
            counters.points_covered = search_space(field.order(), self.solve_ring.nvars());
        }
        counters.solutions = sol.points.len() as u64;
        let k_map: Vec<usize> = (0..self.form.ring().nvars()).map(|i| if i < 3 { i } else { 0 }).collect();
        for pt in &sol.points {
            // Positions in the form's ring are shifted past x, y, z.
            let mut assign: Vec<(usize, FieldElem)> = pin.iter().map(|&(i, v)| (i + 3, v)).collect();
            for (j, &v) in pt.iter().enumerate() {
                let idx = c.i_indices[j];
                assign.push((3 + c.k_indices.iter().position(|k| *k == idx).unwrap(), v));
            }
            let concrete = self.form.substitute_values(&assign).rename_into(&self.geometry, &k_map)?;
            match examine(concrete, self.cfg, index, &opts.budget)? {
                Candidate::Survivor(s) => survivors.push(s),
                Candidate::RejectedSingular { disagreement } => {
                    counters.rejected_singularity += 1;
                    counters.reading_disagreements += disagreement as u64;
                }
                Candidate::RejectedReducible => counters.rejected_reducible += 1,
                Candidate::Unresolved(note) => {
                    if record.solver != SolverKind::Unresolved {
                        counters.unresolved += 1;
                        counters.points_covered = 0;
                        match record.solver {
                            SolverKind::Groebner => counters.groebner -= 1,
                            SolverKind::Exhaustive => counters.exhaustive -= 1,
                            SolverKind::Fallback => counters.fallback -= 1,
                            SolverKind::Unresolved => {}
                        }
                    }
                    record.solver = SolverKind::Unresolved;
                    record.note = Some(note);
                }
            }
        }
        record.survivors = survivors.len() as u64;
        Ok(SliceResult { record, survivors, counters })
    }
}

/// Runs one configuration, restricted to `only` slice indices when given.
pub fn run_case_filtered(
    config: &CaseConfig,
    opts: &RunOptions,
    only: Option<&BTreeSet<u64>>,
) -> Result<RunReport, EnumError> {
    let start = Instant::now();
    let cfg = config.resolve()?;
    let n_outer = cfg.outer_points.len() as u64;
    let n_inner = cfg.inner_points.len() as u64;
    let total = cfg.q_values.len() as u64 * n_outer * n_inner;
    let range: Range<u64> = match opts.slices {
        Some((a, b)) => a.min(total)..b.min(total),
        None => 0..total,
    };
    let wanted = |i: u64| range.contains(&i) && only.map_or(true, |s| s.contains(&i));
    let solve_names: Vec<String> = config.i_indices.iter().map(|i| format!("a{i}")).collect();
    let solve_ring = Ring::new(cfg.field.clone(), &solve_names)?;
    let geometry = geometry_ring(&cfg.field);

    let mut report = RunReport {
        manifest: config.clone(),
        options: opts.clone(),
        slices: Vec::new(),
        survivors: Vec::new(),
        counters: Counters::default(),
        verdict: Verdict::NoneFound,
        timing: None,
    };
    report.counters.slices_total = (0..total).filter(|&i| wanted(i)).count() as u64;

    for variant in 0..cfg.q_values.len() {
        for (oi, outer) in cfg.outer_points.iter().enumerate() {
            let base = (variant as u64 * n_outer + oi as u64) * n_inner;
            let todo: Vec<u64> = (0..n_inner).filter(|&j| wanted(base + j)).collect();
            if todo.is_empty() {
                continue;
            }
            let form = symbolic_form(&cfg, variant, outer);
            let model = QuinticModel::new(config.case, form.clone(), cfg.eps)?;
            let equations = symbolic_hasse_witt(&model)?.distinct_equations();
            let block = Block {
                cfg: &cfg,
                variant,
                outer,
                form,
                equations,
                solve_ring: solve_ring.clone(),
                geometry: geometry.clone(),
            };
            let results: Vec<Result<SliceResult, EnumError>> = todo
                .par_iter()
                .map(|&j| block.run_slice(base + j, &cfg.inner_points[j as usize], opts))
                .collect();
            for r in results {
                let r = r?;
                report.counters.absorb(&r.counters);
                if r.record.solutions > 0 || r.record.solver == SolverKind::Unresolved {
                    report.slices.push(r.record);
                }
                report.survivors.extend(r.survivors);
            }
        }
    }
    report.finish();
    report.timing = Some(Timing { wall_seconds: start.elapsed().as_secs_f64() });
    Ok(report)
}

pub fn run_case(config: &CaseConfig, opts: &RunOptions) -> Result<RunReport, EnumError> {
    run_case_filtered(config, opts, None)
}

/// Re-runs the unresolved slices of a report (with possibly larger
/// budgets) and merges the outcome.
pub fn resume(prior: &RunReport, opts: &RunOptions) -> Result<RunReport, EnumError> {
    let todo = prior.unresolved_slices();
    let mut run_opts = opts.clone();
    run_opts.slices = prior.options.slices;
    let fresh = run_case_filtered(&prior.manifest, &run_opts, Some(&todo))?;
    let mut merged = prior.clone();
    merged.options = run_opts;
    merged.slices.retain(|s| !todo.contains(&s.index));
    merged.slices.extend(fresh.slices);
    merged.survivors.extend(fresh.survivors);
    let k = todo.len() as u64;
    merged.counters.unresolved -= k;
    merged.counters.slices_run -= k;
    merged.counters.absorb(&fresh.counters);
    merged.finish();
    merged.timing = fresh.timing;
    Ok(merged)
}

/// Runs every configuration of the catalog for a field.
pub fn run_all(field: &FieldCtx, opts: &RunOptions) -> Result<Vec<RunReport>, EnumError> {
    case_catalog(field)?.iter().map(|c| run_case(c, opts)).collect()
}

/// Configurations matching a CLI case tag. `nonsplit2` and `nonsplit3`
/// also select a merged `nonsplit23` configuration.
pub fn select_case(field: &FieldCtx, tag: &str) -> Result<Vec<CaseConfig>, EnumError> {
    let all = case_catalog(field)?;
    let chosen: Vec<CaseConfig> = all
        .into_iter()
        .filter(|c| c.tag == tag || c.label() == tag || (c.tag == "nonsplit23" && (tag == "nonsplit2" || tag == "nonsplit3")))
        .collect();
    if chosen.is_empty() {
        return Err(EnumError::UnknownCase(tag.to_string()));
    }
    Ok(chosen)
}
