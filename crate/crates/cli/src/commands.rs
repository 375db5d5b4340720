use std::collections::BTreeMap;
use std::sync::Arc;

use cochain_core::algebra::DgAlgebra;
use cochain_core::catalog::{self, build_module, standard_modules, CatalogSpec, Family, FiniteTable, ModuleSpec};
use cochain_core::error::Error as CoreError;
use cochain_core::field::Field;
use cochain_core::local_cohomology::{cech_e2, cmreg_bound_from_e2};
use cochain_core::module::{DgModule, Side};
use cochain_core::regularity::{inequality_sweep, koszul_truncation_check, regularity_inequalities, Verdict};
use cochain_core::resolution::{ext_reg, koszul_test, koszul_test_algebra, resolve, RegularityKind, RegularityValue, DEFAULT_WINDOW};
use cochain_core::torsion::{
    detect_regime, double_duality_check, dualizing_module, gamma, local_duality_check, twist_nontriviality, Regime,
};
use cochain_core::torsion::cm_reg;
use cochain_core::window::Window;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::document::{self, combination, parse_field, Document};
use crate::report::{Report, Status};
use crate::{Cli, Command, Common, RegimeChoice};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] document::ParseError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    fn status(&self) -> Status {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => Status::UsageError,
            CliError::Core(
                CoreError::UnsupportedRegime(_)
                | CoreError::Unsupported(_)
                | CoreError::TruncationImpossible(_)
                | CoreError::DegenerateWindow(_),
            ) => Status::Unsupported,
            CliError::Core(_) => Status::UsageError,
        }
    }
}

type Outcome = Result<(Status, Value), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Context<'a> {
    common: &'a Common,
    doc: Option<Document>,
    algebra: Arc<DgAlgebra>,
    window: Window,
}

pub fn parse_family(name: &str, param: Option<i32>) -> Result<Family, CliError> {
    let d = |default: i32| param.unwrap_or(default);
    Ok(match name {
        "square-zero" => Family::SquareZero,
        "polynomial" => Family::Polynomial { d: d(1) },
        "exterior-on-one" => Family::ExteriorOnOne { d: d(1) },
        "ground-field" => Family::FiniteDimTable(FiniteTable::GroundField),
        "acyclic" => Family::FiniteDimTable(FiniteTable::Acyclic),
        "truncated-polynomial" => Family::FiniteDimTable(FiniteTable::TruncatedPolynomial { degree: d(2), height: 3 }),
        "hybrid" => Family::Hybrid,
        other => return Err(usage(format!("unknown family `{other}`"))),
    })
}

fn parse_window(s: &str) -> Result<Window, CliError> {
    let bad = || usage(format!("window must be LO..HI, found `{s}`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let w = Window::new(lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if w.is_empty() {
        return Err(bad());
    }
    Ok(w)
}

fn field(common: &Common) -> Result<Field, CliError> {
    parse_field(&common.field).ok_or_else(|| usage(format!("unknown field `{}` (use Q or Fp)", common.field)))
}

fn family_algebra(common: &Common, family: &str) -> Result<Arc<DgAlgebra>, CliError> {
    let spec = CatalogSpec::new(parse_family(family, common.param)?, field(common)?);
    Ok(Arc::new(catalog::build_algebra(&spec)?))
}

impl<'a> Context<'a> {
    fn load(common: &'a Common) -> Result<Context<'a>, CliError> {
        let window = match &common.window {
            Some(w) => parse_window(w)?,
            None => DEFAULT_WINDOW,
        };
        let (doc, algebra) = match (&common.input, &common.family) {
            (Some(_), Some(_)) => return Err(usage("pass either --input or --family, not both")),
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                let doc = document::parse(&text)?;
                let a = doc
                    .algebra(common.algebra.as_deref())
                    .cloned()
                    .ok_or_else(|| usage(match &common.algebra {
                        Some(n) => format!("no algebra `{n}` in the document"),
                        None => "the document defines no algebra".into(),
                    }))?;
                (Some(doc), a)
            }
            (None, Some(f)) => (None, family_algebra(common, f)?),
            (None, None) => return Err(usage("no input: pass --input FILE or --family NAME")),
        };
        Ok(Context { common, doc, algebra, window })
    }

    fn stages(&self) -> usize {
        self.common.stages
    }

    fn module_named(&self, name: &str) -> Result<DgModule, CliError> {
        if let Some(m) = self.doc.as_ref().and_then(|d| d.modules.get(name)) {
            return Ok(m.clone());
        }
        let a = &self.algebra;
        let spec = match name.split_once(':') {
            None => match name {
                "k" => return Ok(DgModule::canonical_k(a.clone(), Side::Left, self.window)),
                "free" | "A" => return Ok(DgModule::free(a.clone(), Side::Left)),
                "zero" | "0" => return Ok(DgModule::zero(a.clone(), Side::Left, self.window)),
                _ => return Err(usage(format!("unknown module `{name}`"))),
            },
            Some(("suspended", n)) => ModuleSpec::Suspended { n: n.parse().map_err(|_| usage(format!("bad shift in `{name}`")))? },
            Some(("truncated", l)) => ModuleSpec::Truncated { l: l.parse().map_err(|_| usage(format!("bad degree in `{name}`")))? },
            Some(("cone", e)) => ModuleSpec::ConeOf { element: e.to_string() },
            _ => return Err(usage(format!("unknown module `{name}`"))),
        };
        Ok(build_module(a, &spec)?)
    }

    /// The `--module` argument, or `default`.
    fn module(&self, default: &str) -> Result<DgModule, CliError> {
        let m = self.module_named(self.common.module.as_deref().unwrap_or(default))?;
        m.algebra().ensure_valid()?;
        m.ensure_valid()?;
        Ok(m)
    }

    fn regime(&self, a: &DgAlgebra, choice: RegimeChoice) -> Result<Regime, CliError> {
        let r = detect_regime(a);
        let ok = match choice {
            RegimeChoice::Auto => true,
            RegimeChoice::Finite => matches!(r, Regime::FiniteDimensional { .. }),
            RegimeChoice::Poly => matches!(r, Regime::PolynomialFamily { .. }),
        };
        if !ok {
            return Err(CoreError::UnsupportedRegime(format!(
                "requested regime {choice:?} but the algebra is in regime {}",
                r.name()
            ))
            .into());
        }
        if let Regime::Unsupported { reason } = &r {
            return Err(CoreError::UnsupportedRegime(reason.clone()).into());
        }
        Ok(r)
    }
}

fn value_status(v: &RegularityValue) -> Status {
    match v.kind {
        RegularityKind::Exact { .. } | RegularityKind::NegInfinity => Status::Ok,
        _ => Status::Indeterminate,
    }
}

fn regularity_json(v: &RegularityValue) -> Value {
    let mut o = serde_json::to_value(v).expect("serializable");
    o["display"] = json!(v.to_string());
    o
}

fn cmd_validate(ctx: &Context) -> Outcome {
    let a = &ctx.algebra;
    let ar = a.validate();
    let mut valid = ar.is_valid();
    let mut modules = Vec::new();
    let targets: Vec<DgModule> = match (&ctx.common.module, &ctx.doc) {
        (Some(name), _) => vec![ctx.module_named(name)?],
        (None, Some(doc)) => doc.order.iter().filter_map(|n| doc.modules.get(n).cloned()).collect(),
        (None, None) => Vec::new(),
    };
    for m in &targets {
        let r = m.validate();
        valid &= r.is_valid();
        modules.push(json!({"name": m.name(), "valid": r.is_valid(), "violations": r.violations, "unrecorded": r.unrecorded}));
    }
    let mut autos = Vec::new();
    if let Some(doc) = &ctx.doc {
        for name in &doc.order {
            if let Some((alg, alpha)) = doc.automorphisms.get(name) {
                let res = alpha.validate(&doc.algebras[alg]);
                valid &= res.is_ok();
                autos.push(json!({"name": name, "valid": res.is_ok(), "error": res.err().map(|e| e.to_string())}));
            }
        }
    }
    let result = json!({
        "algebra": {"name": a.name(), "valid": ar.is_valid(), "violations": ar.violations, "unrecorded": ar.unrecorded},
        "modules": modules,
        "automorphisms": autos,
    });
    Ok((if valid { Status::Ok } else { Status::Violated }, result))
}

fn cmd_cohomology(ctx: &Context) -> Outcome {
    let (name, h) = match &ctx.common.module {
        Some(_) => {
            let m = ctx.module("k")?;
            (m.name().to_string(), m.cohomology())
        }
        None => {
            ctx.algebra.ensure_valid()?;
            (ctx.algebra.name().to_string(), ctx.algebra.cohomology())
        }
    };
    Ok((Status::Ok, json!({"object": name, "dims": h.dims, "certified": h.certified})))
}

fn cmd_resolve(ctx: &Context) -> Outcome {
    let m = ctx.module("k")?;
    let res = resolve(&m, ctx.stages(), ctx.window)?;
    let (minimal, witness) = res.is_minimal();
    let result = json!({
        "module": m.name(),
        "stages": res.stages,
        "complete": res.complete(),
        "generators": res.ledger.generators,
        "counts": res.ledger.counts(),
        "checked": res.checked,
        "pending": res.pending,
        "minimal": minimal,
        "minimality_witness": witness,
    });
    Ok((Status::Ok, result))
}

fn cmd_extreg(ctx: &Context) -> Outcome {
    let m = ctx.module("k")?;
    let (v, res) = ext_reg(&m, ctx.stages(), ctx.window)?;
    let result = json!({"module": m.name(), "extreg": regularity_json(&v), "generators": res.ledger.len(), "complete": res.complete()});
    Ok((value_status(&v), result))
}

fn cmd_koszul(ctx: &Context) -> Outcome {
    let (subject, r) = match &ctx.common.module {
        Some(_) => {
            let m = ctx.module("k")?;
            (m.name().to_string(), koszul_test(&m, ctx.stages(), ctx.window)?)
        }
        None => {
            ctx.algebra.ensure_valid()?;
            (ctx.algebra.name().to_string(), koszul_test_algebra(&ctx.algebra, ctx.stages(), ctx.window)?)
        }
    };
    let status = if r.koszul.is_some() { Status::Ok } else { Status::Indeterminate };
    let result = json!({
        "subject": subject,
        "koszul": r.koszul,
        "inf": r.inf,
        "extreg": regularity_json(&r.extreg),
        "note": r.note,
    });
    Ok((status, result))
}

fn cmd_cmreg(ctx: &Context, choice: RegimeChoice) -> Outcome {
    let m = ctx.module("k")?;
    let regime = ctx.regime(m.algebra(), choice)?;
    let v = cm_reg(&m, &regime, ctx.stages(), ctx.window)?;
    Ok((value_status(&v), json!({"module": m.name(), "regime": regime, "cmreg": regularity_json(&v)})))
}

fn cmd_gamma(ctx: &Context) -> Outcome {
    let m = ctx.module("k")?;
    let regime = ctx.regime(m.algebra(), RegimeChoice::Auto)?;
    let g = gamma(&m, &regime, ctx.stages(), ctx.window)?;
    let h = g.module.cohomology();
    let result = json!({
        "module": m.name(),
        "regime": regime,
        "dims": h.dims_in(&g.module.certified()),
        "certified": g.module.certified(),
        "complete": g.complete,
        "note": g.note,
    });
    Ok((if g.complete { Status::Ok } else { Status::Indeterminate }, result))
}

/// Actions of the lowest positive-degree algebra basis elements on `d`.
fn action_table(d: &DgModule) -> (Vec<String>, Vec<String>) {
    let a = d.algebra();
    let Some(gen_deg) = a.window().degrees().find(|&j| j > 0 && a.dim(j) > 0) else { return (vec![], vec![]) };
    let (ab, mb) = (a.basis(), d.basis());
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for x in ab.refs().into_iter().filter(|r| r.degree == gen_deg) {
        for e in mb.refs() {
            let t = e.degree + x.degree;
            if !d.window().contains(t) {
                continue;
            }
            if d.side().has_left() {
                if let Some(v) = d.left_basis(x, e) {
                    left.push(format!("{}.{} = {}", ab.label(x), mb.label(e), combination(mb, t, &v)));
                }
            }
            if d.side().has_right() {
                if let Some(v) = d.right_basis(e, x) {
                    right.push(format!("{}.{} = {}", mb.label(e), ab.label(x), combination(mb, t, &v)));
                }
            }
        }
    }
    (left, right)
}

fn cmd_dualizing(ctx: &Context) -> Outcome {
    ctx.algebra.ensure_valid()?;
    let regime = ctx.regime(&ctx.algebra, RegimeChoice::Auto)?;
    let d = dualizing_module(&ctx.algebra, &regime)?;
    let (left, right) = action_table(&d);
    let basis: BTreeMap<i32, Vec<String>> =
        d.window().degrees().filter(|&j| d.dim(j) > 0).map(|j| (j, d.basis().labels(j).to_vec())).collect();
    let twisted = match regime {
        Regime::PolynomialFamily { d: deg } => Some(twist_nontriviality(deg, ctx.algebra.field())?),
        _ => None,
    };
    let result = json!({
        "name": d.name(),
        "regime": regime,
        "window": d.window(),
        "certified": d.certified(),
        "basis": basis,
        "left_action": left,
        "right_action": right,
        "twist_nontrivial": twisted,
        "cohomology": d.cohomology().dims,
    });
    Ok((Status::Ok, result))
}

fn comparison_status(agree: Option<bool>) -> Status {
    match agree {
        Some(true) => Status::Ok,
        Some(false) => Status::Violated,
        None => Status::Indeterminate,
    }
}

fn cmd_duality(ctx: &Context, local: bool) -> Outcome {
    let m = ctx.module("k")?;
    let regime = ctx.regime(m.algebra(), RegimeChoice::Auto)?;
    let c = if local {
        local_duality_check(&m, &regime, ctx.stages(), ctx.window)?
    } else {
        double_duality_check(&m, &regime, ctx.stages(), ctx.window)?
    };
    let status = comparison_status(c.agree);
    Ok((status, json!({"module": m.name(), "regime": regime, "comparison": c})))
}

fn cmd_e2(ctx: &Context, params: &[String]) -> Outcome {
    let m = ctx.module("k")?;
    let page = cech_e2(&m, params)?;
    let bound = cmreg_bound_from_e2(&page);
    let status = if page.unstable.is_empty() { Status::Ok } else { Status::Indeterminate };
    Ok((status, json!({"module": m.name(), "page": page, "cmreg_bound": regularity_json(&bound)})))
}

fn verdict_counts(checks: impl Iterator<Item = Verdict>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for v in checks {
        let key = serde_json::to_value(v).expect("serializable").as_str().unwrap_or_default().to_string();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

fn cmd_check_regularity(ctx: Option<&Context>, common: &Common, truncation: Option<i32>) -> Outcome {
    let (stages, window) = match ctx {
        Some(c) => (c.stages(), c.window),
        None => (common.stages, common.window.as_deref().map(parse_window).transpose()?.unwrap_or(DEFAULT_WINDOW)),
    };
    let reports = match ctx {
        None => {
            if truncation.is_some() {
                return Err(usage("--truncation needs a module"));
            }
            inequality_sweep(field(common)?, stages, window)?
        }
        Some(ctx) => {
            let modules = match (&common.module, &ctx.doc) {
                (Some(_), _) => vec![ctx.module("k")?],
                (None, Some(doc)) if !doc.modules.is_empty() => {
                    doc.order.iter().filter_map(|n| doc.modules.get(n).cloned()).collect()
                }
                _ => standard_modules(&ctx.algebra)?,
            };
            let mut out = Vec::new();
            for m in &modules {
                let regime = detect_regime(m.algebra());
                out.push(regularity_inequalities(m, &regime, stages, window)?);
            }
            out
        }
    };
    let mut verdicts: Vec<Verdict> = reports.iter().flat_map(|r| r.checks.iter().map(|c| c.verdict)).collect();
    let mut trunc = None;
    if let (Some(t), Some(ctx)) = (truncation, ctx) {
        let m = ctx.module("k")?;
        let regime = ctx.regime(m.algebra(), RegimeChoice::Auto)?;
        let r = koszul_truncation_check(&m, t, &regime, stages, window)?;
        verdicts.push(r.verdict);
        trunc = Some(r);
    }
    let violations = verdicts.iter().filter(|v| **v == Verdict::Violated).count();
    let status = if violations > 0 {
        Status::Violated
    } else if ctx.is_some() && verdicts.contains(&Verdict::Indeterminate) {
        Status::Indeterminate
    } else {
        Status::Ok
    };
    let result = json!({
        "sweep": ctx.is_none(),
        "reports": reports.iter().map(|r| {
            let mut v = serde_json::to_value(r).expect("serializable");
            for key in ["extreg_m", "extreg_k", "cmreg_m", "cmreg_a"] {
                v[key]["display"] = json!(match key {
                    "extreg_m" => r.extreg_m.to_string(),
                    "extreg_k" => r.extreg_k.to_string(),
                    "cmreg_m" => r.cmreg_m.to_string(),
                    _ => r.cmreg_a.to_string(),
                });
            }
            v
        }).collect::<Vec<_>>(),
        "truncation": trunc,
        "verdicts": verdict_counts(verdicts.into_iter()),
        "violations": violations,
    });
    Ok((status, result))
}

fn cmd_catalog(common: &Common) -> Result<(Status, Value, String), CliError> {
    let name = common.family.as_deref().ok_or_else(|| usage("catalog needs --family"))?;
    if common.input.is_some() {
        return Err(usage("catalog takes --family, not --input"));
    }
    let a = family_algebra(common, name)?;
    let mut doc = Document::default();
    let alg_name = a.name().to_string();
    doc.order.push(alg_name.clone());
    doc.algebras.insert(alg_name, a.clone());
    for m in standard_modules(&a)? {
        doc.order.push(m.name().to_string());
        doc.modules.insert(m.name().to_string(), m);
    }
    let text = document::emit(&doc);
    let result = json!({"family": name, "algebra": a.name(), "modules": doc.modules.keys().collect::<Vec<_>>(), "document": text});
    Ok((Status::Ok, result, text))
}

fn args_json(cli: &Cli) -> Map<String, Value> {
    let mut args = match serde_json::to_value(&cli.common).expect("serializable") {
        Value::Object(o) => o,
        _ => Map::new(),
    };
    if let Value::Object(o) = serde_json::to_value(&cli.command).expect("serializable") {
        for (_, inner) in o {
            if let Value::Object(fields) = inner {
                args.extend(fields);
            }
        }
    }
    args.retain(|_, v| !v.is_null());
    args
}

/// Runs one subcommand and builds its report. Never panics on bad input.
pub fn run(cli: &Cli) -> Report {
    let name = cli.command.name();
    let args = args_json(cli);
    let mut verbatim = None;
    let outcome = match &cli.command {
        Command::Catalog => cmd_catalog(&cli.common).map(|(s, v, text)| {
            verbatim = Some(text);
            (s, v)
        }),
        Command::CheckRegularity { truncation }
            if cli.common.input.is_none() && cli.common.family.is_none() && cli.common.module.is_none() =>
        {
            cmd_check_regularity(None, &cli.common, *truncation)
        }
        command => Context::load(&cli.common).and_then(|ctx| match command {
            Command::Validate => cmd_validate(&ctx),
            Command::Cohomology => cmd_cohomology(&ctx),
            Command::Resolve => cmd_resolve(&ctx),
            Command::Extreg => cmd_extreg(&ctx),
            Command::Koszul => cmd_koszul(&ctx),
            Command::Cmreg { regime } => cmd_cmreg(&ctx, *regime),
            Command::Gamma => cmd_gamma(&ctx),
            Command::Dualizing => cmd_dualizing(&ctx),
            Command::DualityCheck => cmd_duality(&ctx, false),
            Command::LocalDuality => cmd_duality(&ctx, true),
            Command::E2 { params } => cmd_e2(&ctx, params),
            Command::CheckRegularity { truncation } => cmd_check_regularity(Some(&ctx), &cli.common, *truncation),
            Command::Catalog => unreachable!("handled above"),
        }),
    };
    match outcome {
        Ok((status, result)) => {
            let mut r = Report::new(name, args, status, result);
            r.verbatim = verbatim;
            r
        }
        Err(e) => Report::new(name, args, e.status(), json!({"error": e.to_string()})),
    }
}
