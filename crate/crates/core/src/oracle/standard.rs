//! A plain call-by-value evaluator with no facets and no program counter.
//!
//! It shares the primitive table and value type with the faceted evaluator
//! but none of its evaluation code, so the two can be checked against each
//! other.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::eval::{apply_scalar, EvalError, Prim};
use crate::facet::{Closure, Env, LabelId, Store, Value};
use crate::reader::{Expr, Program, TopLevel};

type Result<T> = std::result::Result<T, EvalError>;

#[derive(Debug, Default)]
pub struct StandardEvaluator {
    store: Store,
    globals: BTreeMap<String, Value>,
    labels: u32,
    output: Vec<String>,
}

/// Runs every top-level form in order, stopping after the first error.
/// Definitions yield `None`.
pub fn standard_eval(program: &Program) -> Vec<Result<Option<Value>>> {
    let mut ev = StandardEvaluator::new();
    let mut out = Vec::with_capacity(program.items.len());
    for item in &program.items {
        let r = ev.run_item(item);
        let failed = r.is_err();
        out.push(r);
        if failed {
            break;
        }
    }
    out
}

impl StandardEvaluator {
    pub fn new() -> StandardEvaluator {
        StandardEvaluator::default()
    }

    pub fn take_output(&mut self) -> Vec<String> {
        std::mem::take(&mut self.output)
    }

    pub fn run_item(&mut self, item: &TopLevel) -> Result<Option<Value>> {
        match item {
            TopLevel::Define(name, Expr::Lambda(l)) => {
                let closure = Value::Closure(Arc::new(Closure {
                    lambda: l.clone(),
                    env: Env::new(),
                    name: Some(Arc::from(name.as_str())),
                }));
                self.globals.insert(name.clone(), closure);
                Ok(None)
            }
            TopLevel::Define(name, e) => {
                let v = self.eval(e, &Env::new())?;
                self.globals.insert(name.clone(), v);
                Ok(None)
            }
            TopLevel::Expr(e) => self.eval(e, &Env::new()).map(Some),
        }
    }

    pub fn eval(&mut self, e: &Expr, env: &Env) -> Result<Value> {
        match e {
            Expr::Const(d) => Ok(Value::from_datum(d)),
            Expr::Var(x) => env
                .lookup(x)
                .or_else(|| self.globals.get(x))
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Expr::PrimRef(p) => Ok(Value::Prim(*p)),
            Expr::Star => Ok(Value::Star),
            Expr::Lambda(l) => Ok(Value::Closure(Arc::new(Closure {
                lambda: l.clone(),
                env: env.clone(),
                name: None,
            }))),
            Expr::Apply(f, args) => {
                let f = self.eval(f, env)?;
                let args = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>>>()?;
                self.apply(&f, args)
            }
            Expr::Box(e) => {
                let v = self.eval(e, env)?;
                Ok(Value::Addr(self.store.alloc(v)))
            }
            Expr::Unbox(e) => match self.eval(e, env)? {
                Value::Addr(a) => Ok(self.store.get(a).cloned().expect("allocated address")),
                Value::Star => Ok(Value::Star),
                other => Err(EvalError::Type(format!("unbox: expected a box, got {other}"))),
            },
            Expr::SetBang(t, e) => {
                let target = self.eval(t, env)?;
                let v = self.eval(e, env)?;
                match target {
                    Value::Addr(a) => self.store.set(a, v.clone()),
                    Value::Star => {}
                    other => return Err(EvalError::Type(format!("set!: expected a box, got {other}"))),
                }
                Ok(v)
            }
            Expr::LetLabel { name, policy, body, .. } => {
                let policy = self.eval(policy, env)?;
                if !matches!(policy, Value::Closure(_)) {
                    return Err(EvalError::Type(format!("let-label: policy must be a closure, got {policy}")));
                }
                self.store.alloc(policy);
                let id = LabelId::new(self.labels, name.as_str());
                self.labels += 1;
                self.eval(body, &env.bind(name.as_str(), Value::Label(id)))
            }
            Expr::FacetCreate { .. } | Expr::Obs { .. } => {
                Err(EvalError::Type(format!("standard evaluation of faceted form {e}")))
            }
            Expr::If(c, t, f) => match self.eval(c, env)? {
                Value::Star => Ok(Value::Star),
                c if c.is_truthy() => self.eval(t, env),
                _ => self.eval(f, env),
            },
            Expr::Begin(es) => {
                let mut last = Value::Void;
                for e in es {
                    last = self.eval(e, env)?;
                }
                Ok(last)
            }
        }
    }

    pub fn apply(&mut self, f: &Value, args: Vec<Value>) -> Result<Value> {
        match f {
            Value::Star => Ok(Value::Star),
            Value::Prim(p) => self.apply_prim(*p, &args),
            Value::Closure(c) => {
                if c.lambda.params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: c.name.as_deref().unwrap_or("lambda").to_string(),
                        expected: c.lambda.params.len().to_string(),
                        found: args.len(),
                    });
                }
                let env = c
                    .lambda
                    .params
                    .iter()
                    .zip(args)
                    .fold(c.env.clone(), |env, (p, a)| env.bind(p.as_str(), a));
                self.eval(&c.lambda.body, &env)
            }
            other => Err(EvalError::Type(format!("cannot apply non-procedure {other}"))),
        }
    }

    fn apply_prim(&mut self, p: Prim, args: &[Value]) -> Result<Value> {
        apply_scalar(p, args, &mut self.output)
    }
}
