mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trigonal::classify::{
    automorphism_group, count_points, isomorphism_classes, sigma_classes, AutGroup, ClassifyError, Over,
};
use trigonal::enumerator::{resume, run_case, select_case, EnumError, RunOptions, RunReport, Verdict};
use trigonal::ff::FieldCtx;
use trigonal::groebner::{Budget, GroebnerError};
use trigonal::hasse_witt::{hasse_witt, HwError};
use trigonal::irreducibility::{is_irreducible, IrreducibilityError, Scope};
use trigonal::mpoly::MPoly;
use trigonal::parse::{parse_elem, parse_poly};
use trigonal::quintic::{
    classify_singularity, geometry_ring, ModelCase, ModelError, QuinticModel, SingularityStatus,
};

use config::Config;

/// A check ran and its answer was negative (e.g. `verify` found a
/// discrepancy).
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
/// A Groebner budget tripped. Partial results were saved when possible.
const EXIT_BUDGET: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "trigonal", version, about = "Superspecial trigonal genus-5 curves via quintic plane models")]
struct Cli {
    /// Key-value file presetting budgets, worker count and field constructions.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct BudgetArgs {
    #[arg(long)]
    max_pairs: Option<usize>,
    #[arg(long)]
    max_basis: Option<usize>,
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long)]
    max_quotient: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct FormArgs {
    /// Field order.
    #[arg(long)]
    q: u64,
    /// Quintic form in x, y, z, e.g. "x*y*z^3 + x^5 + y^5".
    #[arg(long)]
    poly: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OverArg {
    Q,
    Closure,
}

impl From<OverArg> for Over {
    fn from(o: OverArg) -> Over {
        match o {
            OverArg::Q => Over::Base,
            OverArg::Closure => Over::Closure,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate superspecial models for one case of the catalog.
    Enumerate {
        #[arg(long, required_unless_present = "resume")]
        q: Option<u64>,
        /// Case tag: split1, split2, nonsplit1, nonsplit2, nonsplit3, nonsplit23, cusp, or a full label.
        #[arg(long, required_unless_present = "resume")]
        case: Option<String>,
        /// Half-open slice range `A..B`.
        #[arg(long)]
        slice: Option<String>,
        /// Where to write the run report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-run the unresolved slices of an earlier report.
        #[arg(long, conflicts_with_all = ["q", "case", "slice"])]
        resume: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        exhaustive_threshold: Option<u64>,
        #[arg(long)]
        exhaustive_cap: Option<u64>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Hasse-Witt matrix of a concrete model.
    Hw {
        #[command(flatten)]
        form: FormArgs,
        /// Model case; inferred from the z^3 part when omitted.
        #[arg(long)]
        case: Option<String>,
        /// Nonsquare of the non-split cases; inferred when omitted.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Irreducibility over F_(q^s), or over the algebraic closure.
    Irred {
        #[command(flatten)]
        form: FormArgs,
        /// Extension degree; absolute irreducibility when omitted.
        #[arg(long)]
        ext: Option<u32>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Isomorphism classes of the survivors of one or more run reports.
    Classify {
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "q")]
        over: OverArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Automorphism group of a model.
    Aut {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_enum, default_value = "q")]
        over: OverArg,
        /// Also list twisted conjugacy classes for the q-power Frobenius.
        #[arg(long)]
        sigma: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Number of F_(q^s)-points of the desingularization.
    Points {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 1)]
        ext: u32,
    },
    /// Re-checks every survivor of a run report independently.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Singularity analysis of a quintic.
    Singular {
        #[command(flatten)]
        form: FormArgs,
    },
}

struct Env {
    config: Config,
    json: bool,
}

impl Env {
    fn field(&self, q: u64) -> Result<FieldCtx> {
        match self.config.fields.get(&q) {
            Some(d) => {
                let f = FieldCtx::from_descriptor(d)?;
                if f.order() as u64 != q {
                    bail!("configured field.{q} has order {}", f.order());
                }
                Ok(f)
            }
            None => Ok(FieldCtx::canonical(q)?),
        }
    }

    fn form(&self, a: &FormArgs) -> Result<MPoly> {
        let field = self.field(a.q)?;
        Ok(parse_poly(&geometry_ring(&field), &a.poly)?)
    }

    fn budget(&self, b: &BudgetArgs) -> Budget {
        let d = Budget::default();
        let c = &self.config;
        Budget {
            max_pairs: b.max_pairs.or(c.max_pairs).unwrap_or(d.max_pairs),
            max_basis: b.max_basis.or(c.max_basis).unwrap_or(d.max_basis),
            max_terms: b.max_terms.or(c.max_terms).unwrap_or(d.max_terms),
            max_quotient: b.max_quotient.or(c.max_quotient).unwrap_or(d.max_quotient),
        }
    }

    fn emit(&self, value: &Value, table: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value).expect("json"));
        } else {
            print!("{}", table());
        }
    }
}

/// Failures that should not be reported as generic errors.
#[derive(Debug)]
enum Outcome {
    CheckFailed,
    Budget,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::CheckFailed => write!(f, "check failed"),
            Outcome::Budget => write!(f, "budget exceeded; partial results saved"),
        }
    }
}

impl std::error::Error for Outcome {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if !matches!(e.downcast_ref::<Outcome>(), Some(Outcome::CheckFailed)) {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(o) = cause.downcast_ref::<Outcome>() {
            return match o {
                Outcome::CheckFailed => EXIT_CHECK_FAILED,
                Outcome::Budget => EXIT_BUDGET,
            };
        }
        if let Some(EnumError::Invariant(_)) = cause.downcast_ref::<EnumError>() {
            return EXIT_INVARIANT;
        }
        if let Some(HwError::DescentFailed(..)) = cause.downcast_ref::<HwError>() {
            return EXIT_INVARIANT;
        }
        if is_budget(cause) {
            return EXIT_BUDGET;
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return EXIT_USAGE;
        }
    }
    EXIT_CHECK_FAILED
}

fn is_budget(e: &(dyn std::error::Error + 'static)) -> bool {
    let g = |g: &GroebnerError| matches!(g, GroebnerError::BudgetExceeded(_));
    if let Some(x) = e.downcast_ref::<GroebnerError>() {
        return g(x);
    }
    match (e.downcast_ref::<ClassifyError>(), e.downcast_ref::<IrreducibilityError>(), e.downcast_ref::<ModelError>()) {
        (Some(ClassifyError::Groebner(x)), _, _) | (_, Some(IrreducibilityError::Groebner(x)), _) => g(x),
        (_, _, Some(ModelError::Groebner(x))) => g(x),
        (Some(ClassifyError::Model(ModelError::Groebner(x))), _, _) => g(x),
        _ => false,
    }
}

/// Invalid flag combinations found after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => Config::default(),
    };
    let env = Env { config, json: cli.json };
    match cli.command {
        Command::Enumerate { q, case, slice, out, resume: prior, budget, exhaustive_threshold, exhaustive_cap, workers } => {
            let slices = slice.as_deref().map(parse_range).transpose()?;
            let workers = workers.or(env.config.workers);
            if workers == Some(0) {
                return Err(usage("--workers must be positive"));
            }
            if let Some(n) = workers {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            }
            let defaults = RunOptions::default();
            let opts = RunOptions {
                budget: env.budget(&budget),
                exhaustive_threshold: exhaustive_threshold
                    .or(env.config.exhaustive_threshold)
                    .unwrap_or(defaults.exhaustive_threshold),
                exhaustive_cap: exhaustive_cap.or(env.config.exhaustive_cap).unwrap_or(defaults.exhaustive_cap),
                slices,
            };
            enumerate(&env, q, case, prior, out, opts)
        }
        Command::Hw { form, case, eps } => {
            let f = env.form(&form)?;
            let model = match case {
                None => QuinticModel::infer(f)?,
                Some(c) => {
                    let case: ModelCase = serde_json::from_value(Value::String(c.clone()))
                        .map_err(|_| usage(format!("unknown case {c:?}")))?;
                    let eps = eps.map(|e| parse_elem(f.field(), &e)).transpose()?;
                    QuinticModel::new(case, f, eps)?
                }
            };
            let report = hasse_witt(&model)?.report();
            env.emit(&serde_json::to_value(&report)?, || {
                let mut s = String::new();
                for r in &report.rows {
                    s += &format!("[{}]\n", r.join(", "));
                }
                let verdict = if report.superspecial { "superspecial" } else { "not superspecial" };
                s + &format!("rank {}: {verdict}\n", report.rank)
            });
            Ok(())
        }
        Command::Irred { form, ext, budget } => {
            let f = env.form(&form)?;
            let scope = ext.map_or(Scope::Closure, Scope::Extension);
            let irreducible = is_irreducible(&f, scope, &env.budget(&budget))?;
            let over = ext.map_or("closure".to_string(), |s| format!("F_{}", (form.q as u128).pow(s)));
            env.emit(&json!({ "over": over, "irreducible": irreducible }), || {
                format!("{} over {over}\n", if irreducible { "irreducible" } else { "reducible" })
            });
            Ok(())
        }
        Command::Classify { input, over, budget } => classify(&env, &input, over.into(), &env.budget(&budget)),
        Command::Aut { form, over, sigma, budget } => {
            let f = env.form(&form)?;
            let group = automorphism_group(&f, over.into(), &env.budget(&budget))?;
            let mut v = serde_json::to_value(group.report())?;
            let classes = sigma.then(|| sigma_classes(&group, form.q));
            if let Some(c) = &classes {
                v["sigma_classes"] = serde_json::to_value(c)?;
            }
            env.emit(&v, || {
                let mut s = aut_table(&group);
                if let Some(c) = &classes {
                    s += &format!("sigma classes: {}\n", c.class_sizes.len());
                    for (rep, (size, stab)) in c.representatives.iter().zip(c.class_sizes.iter().zip(&c.stabilizer_orders)) {
                        s += &format!("  {}  size {size}  stabilizer {stab}\n", matrix_text(rep));
                    }
                }
                s
            });
            Ok(())
        }
        Command::Points { form, ext } => {
            if ext == 0 {
                return Err(usage("--ext must be positive"));
            }
            let f = env.form(&form)?;
            let n = count_points(&f, ext, &Budget::default())?;
            let order = (form.q as u128).pow(ext);
            env.emit(&json!({ "field_order": order, "points": n }), || format!("{n} points over F_{order}\n"));
            Ok(())
        }
        Command::Verify { input } => verify(&env, &input),
        Command::Singular { form } => {
            let f = env.form(&form)?;
            let report = classify_singularity(&f, &Budget::default())?;
            env.emit(&serde_json::to_value(&report)?, || {
                let what = match &report.status {
                    SingularityStatus::Smooth => "smooth".to_string(),
                    SingularityStatus::UniqueDouble { kind, point } => {
                        let p: Vec<String> = point.iter().map(|&c| f.field().format(c)).collect();
                        format!("unique double point ({}) of type {kind:?}", p.join(":"))
                    }
                    SingularityStatus::MultipleOrWorse => "several singular points or a worse singularity".to_string(),
                };
                format!("{what}\ngenus 5: {}\n", report.genus5_ok)
            });
            Ok(())
        }
    }
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("slice range {s:?} is not A..B")))?;
    let a: u64 = a.trim().parse().map_err(|_| usage(format!("bad slice start {a:?}")))?;
    let b: u64 = b.trim().parse().map_err(|_| usage(format!("bad slice end {b:?}")))?;
    if a >= b {
        return Err(usage(format!("empty slice range {s}")));
    }
    Ok((a, b))
}

fn read_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn enumerate(
    env: &Env,
    q: Option<u64>,
    case: Option<String>,
    prior: Option<PathBuf>,
    out: Option<PathBuf>,
    opts: RunOptions,
) -> Result<()> {
    let reports: Vec<RunReport> = match prior {
        Some(p) => vec![resume(&read_report(&p)?, &opts)?],
        None => {
            let (q, case) = (q.expect("required by clap"), case.expect("required by clap"));
            let field = env.field(q)?;
            let mut configs = select_case(&field, &case)?;
            if field != FieldCtx::canonical(q)? {
                for c in &mut configs {
                    c.field = field.descriptor();
                }
            }
            configs.iter().map(|c| run_case(c, &opts)).collect::<Result<_, _>>()?
        }
    };
    let value = if reports.len() == 1 { serde_json::to_value(&reports[0])? } else { serde_json::to_value(&reports)? };
    if let Some(path) = &out {
        std::fs::write(path, serde_json::to_string_pretty(&value)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    env.emit(&value, || {
        let mut s = String::new();
        for r in &reports {
            let c = &r.counters;
            s += &format!(
                "{}: {:?}, {} survivors, {}/{} slices (groebner {}, exhaustive {}, fallback {}, unresolved {})\n",
                r.manifest.label(),
                r.verdict,
                r.survivors.len(),
                c.slices_run,
                c.slices_total,
                c.groebner,
                c.exhaustive,
                c.fallback,
                c.unresolved
            );
            for sv in &r.survivors {
                s += &format!("  {}\n", sv.form);
            }
        }
        s
    });
    if reports.iter().any(|r| r.verdict == Verdict::Incomplete) {
        return Err(anyhow::Error::new(Outcome::Budget));
    }
    Ok(())
}

fn matrix_text(rows: &[Vec<String>]) -> String {
    let r: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", r.join(", "))
}

fn aut_table(g: &AutGroup) -> String {
    let r = g.report();
    let mut s = format!("order {} ({}) over {}\n", r.order, r.name, r.field);
    for (m, o) in r.generators.iter().zip(&r.generator_orders) {
        s += &format!("  generator of order {o}: {}\n", matrix_text(m));
    }
    s
}

fn survivors_of(reports: &[RunReport]) -> Result<(FieldCtx, Vec<MPoly>)> {
    let first = reports.first().ok_or_else(|| usage("no reports"))?;
    let field = FieldCtx::from_descriptor(&first.manifest.field)?;
    let ring = geometry_ring(&field);
    let mut forms = Vec::new();
    for r in reports {
        if r.manifest.field != first.manifest.field {
            return Err(usage("reports are over different fields"));
        }
        for s in &r.survivors {
            forms.push(parse_poly(&ring, &s.form)?);
        }
    }
    Ok((field, forms))
}

fn classify(env: &Env, inputs: &[PathBuf], over: Over, budget: &Budget) -> Result<()> {
    let reports = inputs.iter().map(|p| read_report(p)).collect::<Result<Vec<_>>>()?;
    let (_, forms) = survivors_of(&reports)?;
    let classes = isomorphism_classes(&forms, over, budget)?;
    let mut out = Vec::new();
    for cls in &classes {
        let rep = &forms[cls[0]];
        let group = automorphism_group(rep, over, budget)?;
        out.push(json!({
            "representative": rep.to_string(),
            "size": cls.len(),
            "members": cls.iter().map(|&i| forms[i].to_string()).collect::<Vec<_>>(),
            "automorphisms": group.report(),
        }));
    }
    let value = json!({ "over": format!("{over:?}").to_lowercase(), "classes": out });
    env.emit(&value, || {
        let mut s = format!("{} classes among {} survivors\n", classes.len(), forms.len());
        for (cls, o) in classes.iter().zip(&out) {
            s += &format!(
                "  {}  ({} members, Aut order {} {})\n",
                forms[cls[0]],
                cls.len(),
                o["automorphisms"]["order"],
                o["automorphisms"]["name"].as_str().unwrap_or("")
            );
        }
        s
    });
    Ok(())
}

/// Independent re-checks of a report; returns human-readable problems.
fn discrepancies(report: &RunReport) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let field = FieldCtx::from_descriptor(&report.manifest.field)?;
    let ring = geometry_ring(&field);
    let budget = Budget::default();
    let eps = report.manifest.eps.as_deref().map(|e| parse_elem(&field, e)).transpose()?;
    for s in &report.survivors {
        let f = match parse_poly(&ring, &s.form) {
            Ok(f) => f,
            Err(e) => {
                bad.push(format!("{}: does not parse: {e}", s.form));
                continue;
            }
        };
        if f.to_string() != s.form {
            bad.push(format!("{}: text does not round-trip (reads back as {f})", s.form));
        }
        match QuinticModel::new(report.manifest.case, f.clone(), eps) {
            Err(e) => bad.push(format!("{}: not a model of the case: {e}", s.form)),
            Ok(m) => match hasse_witt(&m) {
                Ok(h) if h.is_zero() => {}
                Ok(h) => bad.push(format!("{}: Hasse-Witt matrix has rank {}", s.form, h.rank())),
                Err(e) => bad.push(format!("{}: Hasse-Witt failed: {e}", s.form)),
            },
        }
        match classify_singularity(&f, &budget) {
            Ok(r) if r.genus5_ok && r.kind() == Some(s.kind) => {}
            Ok(r) => bad.push(format!("{}: singularity is {:?} (genus 5: {})", s.form, r.status, r.genus5_ok)),
            Err(e) => bad.push(format!("{}: singularity check failed: {e}", s.form)),
        }
        match is_irreducible(&f, Scope::Closure, &budget) {
            Ok(true) => {}
            Ok(false) => bad.push(format!("{}: not absolutely irreducible", s.form)),
            Err(e) => bad.push(format!("{}: irreducibility check failed: {e}", s.form)),
        }
    }
    let expected = if report.counters.unresolved > 0 {
        Verdict::Incomplete
    } else if report.survivors.is_empty() {
        Verdict::NoneFound
    } else {
        Verdict::Found
    };
    if report.verdict != expected {
        bad.push(format!("verdict {:?} does not match the survivors and counters ({expected:?})", report.verdict));
    }
    Ok(bad)
}

fn verify(env: &Env, input: &Path) -> Result<()> {
    let report = read_report(input)?;
    let bad = discrepancies(&report)?;
    env.emit(&json!({ "survivors": report.survivors.len(), "discrepancies": bad }), || {
        let mut s = format!("{} survivors checked, {} discrepancies\n", report.survivors.len(), bad.len());
        for b in &bad {
            s += &format!("  {b}\n");
        }
        s
    });
    if bad.is_empty() {
        Ok(())
    } else {
        Err(anyhow!(Outcome::CheckFailed))
    }
}

