//! Big-step faceted evaluator.
//!
//! `eval` is the expression relation and `apply_value` the application
//! relation. The program counter is an explicit argument; the store, label
//! registry and trace live in the [`Interpreter`] and are threaded by `&mut`.

mod prim;
mod trace;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use prim::{apply_scalar, display_text, Prim};
pub use trace::{Rule, TraceEvent};

use crate::facet::{
    construct_facet, mkfacet, obs_project, store_read, store_write, Addr, Branch, Closure, ConsistencyError, Env,
    LabelId, Pc, Sign, Store, Value,
};
use crate::reader::{Expr, SiteId, TopLevel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("arity error: {name} expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: String,
        found: usize,
    },
    #[error("policy error: {0}")]
    Policy(String),
    #[error("star observed: {0}")]
    StarObserved(String),
    #[error("facet escape: {0}")]
    FacetEscape(String),
    #[error("error: {0}")]
    User(String),
    #[error("integer overflow")]
    Overflow,
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
}

impl EvalError {
    /// Short name of the error class, stable across messages.
    pub fn kind(&self) -> &'static str {
        match self {
            EvalError::UnboundVariable(_) => "UnboundVariable",
            EvalError::Type(_) => "TypeError",
            EvalError::Arity { .. } => "ArityError",
            EvalError::Policy(_) => "PolicyError",
            EvalError::StarObserved(_) => "StarObserved",
            EvalError::FacetEscape(_) => "FacetEscape",
            EvalError::User(_) => "UserError",
            EvalError::Overflow => "Overflow",
            EvalError::Consistency(_) => "ConsistencyError",
        }
    }
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// A label created by `let-label`: its policy's store address and the
/// syntactic site that created it.
#[derive(Debug, Clone)]
pub struct LabelEntry {
    pub id: LabelId,
    pub policy: Addr,
    pub site: SiteId,
}

/// One `obs` decision, with the program counter it was taken under.
#[derive(Debug, Clone)]
pub struct ObsEvent {
    pub pc: Pc,
    pub label: LabelId,
    pub decision: bool,
}

/// Deliberately broken store protection, used to check that the oracle
/// notices laundering.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// `box` stores the raw value instead of `<<pc ? v : star>>`.
    RawBox,
    /// `set!` stores the raw value instead of `<<pc ? v : old>>`.
    RawSet,
    RawBoxAndSet,
}

#[derive(Debug, Default)]
pub struct Interpreter {
    store: Store,
    globals: BTreeMap<String, Value>,
    labels: Vec<LabelEntry>,
    trace: Option<Vec<TraceEvent>>,
    output: Vec<String>,
    obs_log: Vec<ObsEvent>,
    fault: Option<Fault>,
}

fn extend(pc: &Pc, label: &LabelId, sign: Sign) -> Result<Pc> {
    Ok(pc.extend(Branch {
        label: label.clone(),
        sign,
    })?)
}

impl Interpreter {
    pub fn new() -> Interpreter {
        Interpreter::default()
    }

    pub fn set_trace(&mut self, enabled: bool) {
        match (enabled, self.trace.is_some()) {
            (true, false) => self.trace = Some(Vec::new()),
            (false, true) => self.trace = None,
            _ => {}
        }
    }

    pub fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// Text produced by `display`/`newline` since the last call.
    pub fn take_output(&mut self) -> Vec<String> {
        std::mem::take(&mut self.output)
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Fault) {
        self.fault = Some(fault);
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn labels(&self) -> &[LabelEntry] {
        &self.labels
    }

    pub fn obs_log(&self) -> &[ObsEvent] {
        &self.obs_log
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.get(name)
    }

    pub fn global_names(&self) -> impl Iterator<Item = &str> {
        self.globals.keys().map(String::as_str)
    }

    pub fn define_global(&mut self, name: impl Into<String>, value: Value) {
        self.globals.insert(name.into(), value);
    }

    /// Runs one top-level form with an empty program counter. Returns the
    /// value of a bare expression, `None` for a definition.
    pub fn run_item(&mut self, item: &TopLevel) -> Result<Option<Value>> {
        let pc = Pc::empty();
        match item {
            TopLevel::Define(name, expr) => {
                let value = match expr {
                    Expr::Lambda(lambda) => Value::Closure(Arc::new(Closure {
                        lambda: lambda.clone(),
                        env: Env::new(),
                        name: Some(Arc::from(name.as_str())),
                    })),
                    other => self.eval(other, &Env::new(), &pc)?,
                };
                self.globals.insert(name.clone(), value);
                Ok(None)
            }
            TopLevel::Expr(expr) => self.eval(expr, &Env::new(), &pc).map(Some),
        }
    }

    /// Evaluates `expr` at top level with extra local bindings.
    pub fn eval_with_bindings(&mut self, expr: &Expr, bindings: &[(&str, Value)]) -> Result<Value> {
        let env = bindings
            .iter()
            .fold(Env::new(), |env, (name, v)| env.bind(*name, v.clone()));
        self.eval(expr, &env, &Pc::empty())
    }

    fn record(&mut self, rule: Rule, pc: &Pc, v: &Value) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                rule,
                pc: pc.to_string(),
                value: v.to_string(),
            });
        }
    }

    fn traced(&mut self, rule: Rule, pc: &Pc, v: Value) -> Result<Value> {
        self.record(rule, pc, &v);
        Ok(v)
    }

    pub fn eval(&mut self, expr: &Expr, env: &Env, pc: &Pc) -> Result<Value> {
        match expr {
            Expr::Const(d) => self.traced(Rule::Const, pc, Value::from_datum(d)),
            Expr::Var(name) => {
                let v = env
                    .lookup(name)
                    .or_else(|| self.globals.get(name))
                    .cloned()
                    .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
                self.traced(Rule::Var, pc, v)
            }
            Expr::PrimRef(p) => self.traced(Rule::Var, pc, Value::Prim(*p)),
            Expr::Star => self.traced(Rule::Const, pc, Value::Star),
            Expr::Lambda(lambda) => {
                let closure = Value::Closure(Arc::new(Closure {
                    lambda: lambda.clone(),
                    env: env.clone(),
                    name: None,
                }));
                self.traced(Rule::Lambda, pc, closure)
            }
            Expr::Apply(fun, args) => {
                let f = self.eval(fun, env, pc)?;
                let args = args
                    .iter()
                    .map(|a| self.eval(a, env, pc))
                    .collect::<Result<Vec<_>>>()?;
                let v = self.apply_value(&f, args, pc)?;
                self.traced(Rule::Apply, pc, v)
            }
            Expr::Box(e) => {
                let v = self.eval(e, env, pc)?;
                let stored = match self.fault {
                    Some(Fault::RawBox | Fault::RawBoxAndSet) => v,
                    _ => construct_facet(pc, v, Value::Star),
                };
                let addr = self.store.alloc(stored);
                self.traced(Rule::Box, pc, Value::Addr(addr))
            }
            Expr::Unbox(e) => {
                let target = self.eval(e, env, pc)?;
                let v = store_read(&self.store, &target, pc)?;
                self.traced(Rule::Unbox, pc, v)
            }
            Expr::SetBang(target, e) => {
                let target = self.eval(target, env, pc)?;
                let v = self.eval(e, env, pc)?;
                match self.fault {
                    Some(Fault::RawSet | Fault::RawBoxAndSet) => write_raw(&mut self.store, &target, &v)?,
                    _ => store_write(&mut self.store, &target, pc, &v)?,
                }
                self.traced(Rule::Set, pc, v)
            }
            Expr::LetLabel {
                name,
                policy,
                body,
                site,
            } => self.eval_let_label(name, policy, body, *site, env, pc),
            Expr::FacetCreate { label, pos, neg } => self.eval_facet_create(label, pos, neg, env, pc),
            Expr::Obs { label, key, value } => self.eval_obs(label, key, value, env, pc),
            Expr::If(cond, then, otherwise) => {
                let c = self.eval(cond, env, pc)?;
                self.eval_if(&c, then, otherwise, env, pc)
            }
            Expr::Begin(exprs) => {
                let mut last = Value::Void;
                for e in exprs {
                    last = self.eval(e, env, pc)?;
                }
                self.traced(Rule::Begin, pc, last)
            }
        }
    }

    fn label_operand(&mut self, form: &str, label: &Expr, env: &Env, pc: &Pc) -> Result<LabelId> {
        match self.eval(label, env, pc)? {
            Value::Label(l) => Ok(l),
            Value::Facet(_) => Err(EvalError::Type(format!("{form}: label position holds a faceted value"))),
            other => Err(EvalError::Type(format!("{form}: expected a label, got {other}"))),
        }
    }

    fn eval_facet_create(&mut self, label: &Expr, pos: &Expr, neg: &Expr, env: &Env, pc: &Pc) -> Result<Value> {
        let l = self.label_operand("facet", label, env, pc)?;
        match pc.sign_of(&l) {
            Some(Sign::Positive) => {
                let v = self.eval(pos, env, pc)?;
                self.traced(Rule::FacCreatePos, pc, v)
            }
            Some(Sign::Negative) => {
                let v = self.eval(neg, env, pc)?;
                self.traced(Rule::FacCreateNeg, pc, v)
            }
            None => {
                let pos_pc = extend(pc, &l, Sign::Positive)?;
                let v1 = self.eval(pos, env, &pos_pc)?;
                let v2 = self.eval(neg, env, &extend(pc, &l, Sign::Negative)?)?;
                let v = construct_facet(&pos_pc, v1, v2);
                self.traced(Rule::FacCreateSplit, pc, v)
            }
        }
    }

    fn eval_let_label(
        &mut self,
        name: &str,
        policy: &Expr,
        body: &Expr,
        site: SiteId,
        env: &Env,
        pc: &Pc,
    ) -> Result<Value> {
        let policy = self.eval(policy, env, pc)?;
        if !matches!(policy, Value::Closure(_)) {
            return Err(EvalError::Type(format!("let-label: policy must be a closure, got {policy}")));
        }
        let addr = self.store.alloc(policy);
        let ordinal = u32::try_from(self.labels.len()).expect("label count fits in u32");
        let id = LabelId::new(ordinal, name);
        self.labels.push(LabelEntry {
            id: id.clone(),
            policy: addr,
            site,
        });
        let v = self.eval(body, &env.bind(name, Value::Label(id)), pc)?;
        self.traced(Rule::LetLabel, pc, v)
    }

    fn eval_obs(&mut self, label: &Expr, key: &Expr, value: &Expr, env: &Env, pc: &Pc) -> Result<Value> {
        let l = self.label_operand("obs", label, env, pc)?;
        let key = self.eval(key, env, pc)?;
        let policy_addr = self.labels[l.ordinal() as usize].policy;
        let policy = self
            .store
            .get(policy_addr)
            .cloned()
            .expect("policy address allocated by let-label");
        let decision = match self.apply_value(&policy, vec![key], pc)? {
            v @ (Value::Facet(_) | Value::Star) => {
                return Err(EvalError::Policy(format!("policy of {l} returned {v}, not a base value")))
            }
            v => v.is_truthy(),
        };
        self.obs_log.push(ObsEvent {
            pc: pc.clone(),
            label: l.clone(),
            decision,
        });
        let v = self.eval(value, env, pc)?;
        let v = obs_project(&l, &v, decision);
        self.traced(Rule::Obs, pc, v)
    }

    /// `if` on an already evaluated condition; faceted conditions split the
    /// whole conditional.
    fn eval_if(&mut self, cond: &Value, then: &Expr, otherwise: &Expr, env: &Env, pc: &Pc) -> Result<Value> {
        match cond {
            Value::Star => self.traced(Rule::IfStar, pc, Value::Star),
            Value::Facet(f) => match pc.sign_of(&f.label) {
                Some(Sign::Positive) => self.eval_if(&f.pos, then, otherwise, env, pc),
                Some(Sign::Negative) => self.eval_if(&f.neg, then, otherwise, env, pc),
                None => {
                    let v1 = self.eval_if(&f.pos, then, otherwise, env, &extend(pc, &f.label, Sign::Positive)?)?;
                    let v2 = self.eval_if(&f.neg, then, otherwise, env, &extend(pc, &f.label, Sign::Negative)?)?;
                    let v = mkfacet(f.label.clone(), v1, v2);
                    self.traced(Rule::IfSplit, pc, v)
                }
            },
            c => {
                let v = if c.is_truthy() {
                    self.eval(then, env, pc)?
                } else {
                    self.eval(otherwise, env, pc)?
                };
                self.traced(Rule::If, pc, v)
            }
        }
    }

    /// Applies a possibly faceted function to evaluated arguments.
    pub fn apply_value(&mut self, f: &Value, args: Vec<Value>, pc: &Pc) -> Result<Value> {
        match f {
            Value::Star => self.traced(Rule::AppStar, pc, Value::Star),
            Value::Closure(c) => {
                let params = &c.lambda.params;
                if params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: c.name.as_deref().unwrap_or("lambda").to_string(),
                        expected: params.len().to_string(),
                        found: args.len(),
                    });
                }
                let env = params
                    .iter()
                    .zip(args)
                    .fold(c.env.clone(), |env, (p, a)| env.bind(p.as_str(), a));
                let v = self.eval(&c.lambda.body, &env, pc)?;
                self.traced(Rule::AppBase, pc, v)
            }
            Value::Prim(p) => self.lift_primitive(*p, args, pc),
            Value::Facet(fac) => match pc.sign_of(&fac.label) {
                Some(Sign::Positive) => {
                    let v = self.apply_value(&fac.pos, args, pc)?;
                    self.traced(Rule::AppFacetPos, pc, v)
                }
                Some(Sign::Negative) => {
                    let v = self.apply_value(&fac.neg, args, pc)?;
                    self.traced(Rule::AppFacetNeg, pc, v)
                }
                None => {
                    let pos = self.apply_value(&fac.pos, args.clone(), &extend(pc, &fac.label, Sign::Positive)?)?;
                    let neg = self.apply_value(&fac.neg, args, &extend(pc, &fac.label, Sign::Negative)?)?;
                    let v = mkfacet(fac.label.clone(), pos, neg);
                    self.traced(Rule::AppSplit, pc, v)
                }
            },
            other => Err(EvalError::Type(format!("cannot apply non-procedure {other}"))),
        }
    }

    /// Distributes a primitive over faceted arguments, splitting on the
    /// smallest head label first so results come out canonical.
    pub fn lift_primitive(&mut self, prim: Prim, args: Vec<Value>, pc: &Pc) -> Result<Value> {
        prim.check_arity(args.len())?;
        if prim.is_effectful() && prim != Prim::Error {
            if !pc.is_empty() {
                return Err(EvalError::FacetEscape(format!("{prim} under program counter {pc}")));
            }
            if let Some(f) = args.iter().find(|a| a.is_facet()) {
                return Err(EvalError::FacetEscape(format!("{prim} of faceted value {f}")));
            }
        }
        let head = args.iter().filter_map(|a| a.as_facet().map(|f| &f.label)).min().cloned();
        let Some(label) = head else {
            let v = apply_scalar(prim, &args, &mut self.output)?;
            return self.traced(Rule::AppPrim, pc, v);
        };
        let side = |sign: Sign| -> Vec<Value> {
            args.iter()
                .map(|a| match a.as_facet() {
                    Some(f) if f.label == label => match sign {
                        Sign::Positive => f.pos.clone(),
                        Sign::Negative => f.neg.clone(),
                    },
                    _ => a.clone(),
                })
                .collect()
        };
        match pc.sign_of(&label) {
            Some(sign) => self.lift_primitive(prim, side(sign), pc),
            None => {
                let pos = self.lift_primitive(prim, side(Sign::Positive), &extend(pc, &label, Sign::Positive)?)?;
                let neg = self.lift_primitive(prim, side(Sign::Negative), &extend(pc, &label, Sign::Negative)?)?;
                let v = mkfacet(label, pos, neg);
                self.traced(Rule::AppSplit, pc, v)
            }
        }
    }
}

fn write_raw(store: &mut Store, target: &Value, v: &Value) -> Result<()> {
    match target {
        Value::Addr(a) => {
            store.set(*a, v.clone());
            Ok(())
        }
        Value::Star => Ok(()),
        Value::Facet(f) => {
            write_raw(store, &f.pos, v)?;
            write_raw(store, &f.neg, v)
        }
        other => Err(EvalError::Type(format!("set!: expected a box, got {other}"))),
    }
}
