//! Projection-equivalence oracle.
//!
//! A program with k statically known labels has 2^k views. For each view the
//! faceted run's results, projected to that view, must print exactly like a
//! standard run of the program with every `facet` resolved by the view.

mod resolve;
mod standard;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use standard::{standard_eval, StandardEvaluator};

use crate::eval::{EvalError, Fault, Interpreter, ObsEvent};
use crate::facet::{mkfacet, LabelId, Sign, Value};
use crate::reader::{Expr, Lambda, Program, SiteId, TopLevel};
use resolve::Resolution;

pub const DEFAULT_MAX_LABELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("not oracle-safe: {reason}: {expr}")]
    NotOracleSafe { reason: String, expr: String },
    #[error("program uses {found} labels, more than the limit of {max}")]
    TooManyLabels { found: usize, max: usize },
    #[error("view does not assign label {0}")]
    MissingLabel(String),
}

/// One truth assignment to the program's `let-label` sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    entries: BTreeMap<SiteId, (String, bool)>,
}

impl View {
    pub fn new(entries: impl IntoIterator<Item = (SiteId, String, bool)>) -> View {
        View {
            entries: entries.into_iter().map(|(s, n, b)| (s, (n, b))).collect(),
        }
    }

    /// All 2^k views over `sites`, all-positive first, the first site
    /// varying slowest.
    pub fn enumerate(sites: &BTreeMap<SiteId, String>) -> Vec<View> {
        let k = sites.len();
        (0..1usize << k)
            .map(|mask| {
                View::new(
                    sites
                        .iter()
                        .enumerate()
                        .map(|(i, (s, n))| (*s, n.clone(), mask & (1 << (k - 1 - i)) == 0)),
                )
            })
            .collect()
    }

    pub fn get(&self, site: SiteId) -> Option<bool> {
        self.entries.get(&site).map(|(_, b)| *b)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (site, (name, b))) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let sign = if *b { '+' } else { '-' };
            let shared = self.entries.values().filter(|(n, _)| n == name).count() > 1;
            if shared {
                write!(f, "{sign}{name}@{}", site.0)?;
            } else {
                write!(f, "{sign}{name}")?;
            }
        }
        f.write_str("}")
    }
}

/// A view over runtime labels rather than sites.
pub type LabelView = BTreeMap<LabelId, bool>;

/// Replaces every facet by the branch `view` selects.
pub fn project_value(v: &Value, view: &LabelView) -> Result<Value, OracleError> {
    match v {
        Value::Facet(f) => {
            let &b = view.get(&f.label).ok_or_else(|| OracleError::MissingLabel(f.label.to_string()))?;
            project_value(if b { &f.pos } else { &f.neg }, view)
        }
        Value::Pair(p) => Ok(Value::pair(project_value(&p.0, view)?, project_value(&p.1, view)?)),
        other => Ok(other.clone()),
    }
}

/// The standard program one secure-multi-execution copy would run: `facet`
/// keeps the branch the view selects and `obs` keeps its key's effects and
/// its body.
pub fn project_program(program: &Program, view: &View) -> Result<Program, OracleError> {
    let res = resolve::resolve(program)?;
    project_program_with(program, view, &res)
}

fn project_program_with(program: &Program, view: &View, res: &Resolution) -> Result<Program, OracleError> {
    let items = program
        .items
        .iter()
        .map(|item| {
            Ok(match item {
                TopLevel::Define(n, e) => TopLevel::Define(n.clone(), project_expr(e, view, res)?),
                TopLevel::Expr(e) => TopLevel::Expr(project_expr(e, view, res)?),
            })
        })
        .collect::<Result<_, OracleError>>()?;
    Ok(Program {
        items,
        positions: program.positions.clone(),
    })
}

fn project_expr(e: &Expr, view: &View, res: &Resolution) -> Result<Expr, OracleError> {
    let p = |e: &Expr| project_expr(e, view, res);
    let bx = |e: &Expr| project_expr(e, view, res).map(Box::new);
    Ok(match e {
        Expr::Const(_) | Expr::Var(_) | Expr::PrimRef(_) | Expr::Star => e.clone(),
        Expr::FacetCreate { pos, neg, .. } => {
            let site = res.label_sites[&(e as *const Expr)];
            let b = view.get(site).ok_or_else(|| OracleError::MissingLabel(res.sites[&site].clone()))?;
            p(if b { pos } else { neg })?
        }
        Expr::Obs { key, value, .. } => Expr::Begin(vec![p(key)?, p(value)?]),
        Expr::Lambda(l) => Expr::Lambda(Arc::new(Lambda {
            params: l.params.clone(),
            body: p(&l.body)?,
        })),
        Expr::Apply(f, args) => Expr::Apply(bx(f)?, args.iter().map(p).collect::<Result<_, _>>()?),
        Expr::Box(e) => Expr::Box(bx(e)?),
        Expr::Unbox(e) => Expr::Unbox(bx(e)?),
        Expr::SetBang(t, v) => Expr::SetBang(bx(t)?, bx(v)?),
        Expr::LetLabel { name, policy, body, site } => Expr::LetLabel {
            name: name.clone(),
            policy: bx(policy)?,
            body: bx(body)?,
            site: *site,
        },
        Expr::If(c, t, f) => Expr::If(bx(c)?, bx(t)?, bx(f)?),
        Expr::Begin(es) => Expr::Begin(es.iter().map(p).collect::<Result<_, _>>()?),
    })
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub max_labels: usize,
    /// Runs the faceted side with deliberately broken store protection.
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_labels: DEFAULT_MAX_LABELS,
            fault: None,
        }
    }
}

/// Printed result of one top-level expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemResult {
    pub item: usize,
    pub printed: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViewOutcome {
    pub view: String,
    pub faceted: Vec<ItemResult>,
    pub standard: Vec<ItemResult>,
    /// Items from this index on were not compared: an `obs` there decided
    /// the label differently from this view.
    pub skipped_from: Option<usize>,
    pub pass: bool,
}

impl ViewOutcome {
    /// First pair of results that differ, by position in the compared prefix.
    pub fn first_difference(&self) -> Option<(Option<&ItemResult>, Option<&ItemResult>)> {
        let n = self.faceted.len().max(self.standard.len());
        (0..n)
            .map(|i| (self.faceted.get(i), self.standard.get(i)))
            .find(|(a, b)| a != b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub program: String,
    pub k: usize,
    pub labels: Vec<String>,
    pub views: Vec<ViewOutcome>,
    pub verdict: Verdict,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "program": self.program,
            "k": self.k,
            "verdict": self.verdict,
            "views": self.views.iter().map(|v| serde_json::json!({
                "view": v.view,
                "pass": v.pass,
                "compared": v.faceted.len().max(v.standard.len()),
                "skipped_from": v.skipped_from,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        writeln!(f, "{}: {verdict} (k={}, {} views)", self.program, self.k, self.views.len())?;
        for v in &self.views {
            let status = if v.pass { "pass" } else { "FAIL" };
            let shown: Vec<_> = v.faceted.iter().map(|r| r.printed.as_str()).collect();
            write!(f, "  view {}: {status} [{}]", v.view, shown.join(", "))?;
            if let Some(i) = v.skipped_from {
                write!(f, " (obs-inconsistent from item {i})")?;
            }
            writeln!(f)?;
            if let Some((a, b)) = v.first_difference() {
                let show = |r: Option<&ItemResult>| match r {
                    Some(r) => format!("item {}: {}", r.item, r.printed),
                    None => "nothing".to_string(),
                };
                writeln!(f, "    faceted  {}", show(a))?;
                writeln!(f, "    standard {}", show(b))?;
            }
        }
        Ok(())
    }
}

fn printed(r: &Result<Option<Value>, EvalError>, project: impl Fn(&Value) -> Result<Value, OracleError>) -> Result<Option<String>, OracleError> {
    Ok(match r {
        Ok(None) => None,
        Ok(Some(v)) => Some(project(v)?.observable().to_string()),
        Err(e) => Some(format!("error: {}", e.kind())),
    })
}

fn contradicts(event: &ObsEvent, view: &LabelView) -> bool {
    let applies = event
        .pc
        .branches()
        .all(|b| view.get(&b.label).is_none_or(|&w| w == (b.sign == Sign::Positive)));
    applies && view.get(&event.label).is_some_and(|&w| w != event.decision)
}

/// Runs `program` once under faceted execution and once per view under
/// standard execution, and compares the printed results.
pub fn check_projection_equivalence(id: &str, program: &Program, config: &OracleConfig) -> Result<OracleReport, OracleError> {
    let res = resolve::resolve(program)?;
    let k = res.referenced.len();
    if k > config.max_labels {
        return Err(OracleError::TooManyLabels {
            found: k,
            max: config.max_labels,
        });
    }

    let mut interp = Interpreter::new();
    if let Some(fault) = config.fault {
        interp.inject_fault(fault);
    }
    let mut faceted = Vec::new();
    let mut events: Vec<Vec<ObsEvent>> = Vec::new();
    for item in &program.items {
        let before = interp.obs_log().len();
        let r = interp.run_item(item);
        events.push(interp.obs_log()[before..].to_vec());
        let failed = r.is_err();
        faceted.push(r);
        if failed {
            break;
        }
    }

    let mut created: BTreeMap<SiteId, usize> = BTreeMap::new();
    for entry in interp.labels().iter().filter(|e| res.referenced.contains_key(&e.site)) {
        *created.entry(entry.site).or_default() += 1;
    }
    if let Some((site, n)) = created.iter().find(|(_, &n)| n > 1) {
        return Err(OracleError::NotOracleSafe {
            reason: format!("let-label site of `{}` created {n} labels", res.sites[site]),
            expr: format!("let-label {}", res.sites[site]),
        });
    }

    let mut views = Vec::new();
    for view in View::enumerate(&res.referenced) {
        let label_view: LabelView = interp
            .labels()
            .iter()
            .filter_map(|e| view.get(e.site).map(|b| (e.id.clone(), b)))
            .collect();
        let skipped_from = events.iter().position(|evs| evs.iter().any(|e| contradicts(e, &label_view)));
        let cutoff = skipped_from.unwrap_or(usize::MAX);

        let mut fac = Vec::new();
        for (i, r) in faceted.iter().enumerate().take_while(|(i, _)| *i < cutoff) {
            if let Some(p) = printed(r, |v| project_value(v, &label_view))? {
                fac.push(ItemResult { item: i, printed: p });
            }
        }
        let projected = project_program_with(program, &view, &res)?;
        let mut std = Vec::new();
        for (i, r) in standard_eval(&projected).iter().enumerate().take_while(|(i, _)| *i < cutoff) {
            if let Some(p) = printed(r, |v| Ok(v.clone()))? {
                std.push(ItemResult { item: i, printed: p });
            }
        }
        views.push(ViewOutcome {
            view: view.to_string(),
            pass: fac == std,
            faceted: fac,
            standard: std,
            skipped_from,
        });
    }

    let verdict = if views.iter().all(|v| v.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(OracleReport {
        program: id.to_string(),
        k,
        labels: res.referenced.values().cloned().collect(),
        views,
        verdict,
    })
}

/// Checks `mkfacet` against projection: for every view, projecting
/// `mkfacet(l, a, b)` must agree with projecting `a` or `b`.
pub fn mkfacet_agrees(label: &LabelId, a: &Value, b: &Value, views: &[LabelView]) -> bool {
    let m = mkfacet(label.clone(), a.clone(), b.clone());
    views.iter().all(|w| {
        let chosen = if w[label] { a } else { b };
        project_value(&m, w) == project_value(chosen, w)
    })
}
