//! Source text to abstract syntax.
//!
//! The reader accepts the core forms directly and desugars `let`, `let*`,
//! `and`, `or`, multi-expression bodies and `(define (f x) ...)` into them.

mod ast;
mod print;
mod sexp;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

pub use ast::{Datum, Expr, Lambda, Program, SiteId, SourcePos, TopLevel};

use crate::eval::Prim;
pub(crate) use print::write_str_literal;
use sexp::{Atom, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: syntax error: {message}")]
pub struct SyntaxError {
    pub pos: SourcePos,
    pub message: String,
}

impl SyntaxError {
    fn new(pos: SourcePos, message: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            message: message.into(),
        }
    }
}

/// Parses a whole program.
pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    Reader::default().parse_program(text)
}

/// Parses a single expression (the text must hold exactly one form and no `define`).
pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    Reader::default().parse_expr(text)
}

/// Parser configuration. `defined` lists globals that exist outside the text
/// being read (e.g. earlier REPL inputs); they shadow primitive names.
#[derive(Debug, Clone, Default)]
pub struct Reader {
    defined: HashSet<String>,
}

impl Reader {
    pub fn with_defined<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Reader {
            defined: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn parse_program(&self, text: &str) -> Result<Program, SyntaxError> {
        let forms = sexp::read_all(text)?;
        let mut defined = self.defined.clone();
        let mut seen = HashSet::new();
        for form in &forms {
            if let Some((name, pos)) = definition_name(form)? {
                if !seen.insert(name.to_string()) {
                    return Err(SyntaxError::new(pos, format!("duplicate definition of `{name}`")));
                }
                defined.insert(name.to_string());
            }
        }
        let mut lower = Lowering {
            defined: &defined,
            bound: Vec::new(),
        };
        let mut program = Program::default();
        for form in &forms {
            program.positions.push(form.pos());
            program.items.push(lower.toplevel(form)?);
        }
        let mut next = 0;
        for item in &mut program.items {
            match item {
                TopLevel::Define(_, e) | TopLevel::Expr(e) => number_sites(e, &mut next),
            }
        }
        Ok(program)
    }

    pub fn parse_expr(&self, text: &str) -> Result<Expr, SyntaxError> {
        let forms = sexp::read_all(text)?;
        let [form] = forms.as_slice() else {
            let pos = forms.get(1).map(Sexp::pos).unwrap_or_default();
            return Err(SyntaxError::new(pos, format!("expected one expression, found {}", forms.len())));
        };
        let mut lower = Lowering {
            defined: &self.defined,
            bound: Vec::new(),
        };
        let mut expr = lower.expr(form)?;
        number_sites(&mut expr, &mut 0);
        Ok(expr)
    }
}

fn definition_name(form: &Sexp) -> Result<Option<(&str, SourcePos)>, SyntaxError> {
    let Sexp::List(items, pos) = form else {
        return Ok(None);
    };
    if items.first().and_then(Sexp::as_symbol) != Some("define") {
        return Ok(None);
    }
    let target = items
        .get(1)
        .ok_or_else(|| SyntaxError::new(*pos, "define: missing name"))?;
    let name = match target {
        Sexp::List(sig, p) => sig
            .first()
            .and_then(Sexp::as_symbol)
            .ok_or_else(|| SyntaxError::new(*p, "define: expected function name"))?,
        other => other
            .as_symbol()
            .ok_or_else(|| SyntaxError::new(other.pos(), "define: expected a name"))?,
    };
    Ok(Some((name, *pos)))
}

fn number_sites(expr: &mut Expr, next: &mut u32) {
    match expr {
        Expr::LetLabel {
            site, policy, body, ..
        } => {
            *site = SiteId(*next);
            *next += 1;
            number_sites(policy, next);
            number_sites(body, next);
        }
        Expr::Lambda(l) => number_sites(&mut Arc::make_mut(l).body, next),
        Expr::Apply(f, args) => {
            number_sites(f, next);
            args.iter_mut().for_each(|a| number_sites(a, next));
        }
        Expr::Box(e) | Expr::Unbox(e) => number_sites(e, next),
        Expr::SetBang(a, b) => {
            number_sites(a, next);
            number_sites(b, next);
        }
        Expr::FacetCreate { label, pos, neg } => {
            number_sites(label, next);
            number_sites(pos, next);
            number_sites(neg, next);
        }
        Expr::Obs { label, key, value } => {
            number_sites(label, next);
            number_sites(key, next);
            number_sites(value, next);
        }
        Expr::If(c, t, e) => {
            number_sites(c, next);
            number_sites(t, next);
            number_sites(e, next);
        }
        Expr::Begin(es) => es.iter_mut().for_each(|e| number_sites(e, next)),
        Expr::Const(_) | Expr::Var(_) | Expr::PrimRef(_) | Expr::Star => {}
    }
}

const KEYWORDS: &[&str] = &[
    "lambda", "let", "let*", "define", "box", "unbox", "set!", "let-label", "facet", "obs", "if",
    "begin", "and", "or", "quote",
];

struct Lowering<'a> {
    defined: &'a HashSet<String>,
    bound: Vec<String>,
}

impl Lowering<'_> {
    fn toplevel(&mut self, form: &Sexp) -> Result<TopLevel, SyntaxError> {
        if let Sexp::List(items, pos) = form {
            if items.first().and_then(Sexp::as_symbol) == Some("define") {
                return self.define(&items[1..], *pos);
            }
        }
        self.expr(form).map(TopLevel::Expr)
    }

    fn define(&mut self, rest: &[Sexp], pos: SourcePos) -> Result<TopLevel, SyntaxError> {
        match rest {
            [Sexp::List(sig, sig_pos), body @ ..] => {
                let (name, params) = sig
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(*sig_pos, "define: empty signature"))?;
                let name = name
                    .as_symbol()
                    .ok_or_else(|| SyntaxError::new(name.pos(), "define: expected function name"))?;
                let lambda = self.lambda(params, body, pos)?;
                Ok(TopLevel::Define(name.to_string(), lambda))
            }
            [name, value] => {
                let name = name
                    .as_symbol()
                    .ok_or_else(|| SyntaxError::new(name.pos(), "define: expected a name"))?;
                Ok(TopLevel::Define(name.to_string(), self.expr(value)?))
            }
            _ => Err(SyntaxError::new(pos, "define: expected (define name expr) or (define (name args ...) body ...)")),
        }
    }

    fn is_bound(&self, name: &str) -> bool {
        self.bound.iter().any(|b| b == name) || self.defined.contains(name)
    }

    fn expr(&mut self, form: &Sexp) -> Result<Expr, SyntaxError> {
        match form {
            Sexp::Atom(atom, _) => Ok(match atom {
                Atom::Int(n) => Expr::Const(Datum::Int(*n)),
                Atom::Bool(b) => Expr::Const(Datum::Bool(*b)),
                Atom::Str(s) => Expr::Const(Datum::Str(Arc::from(s.as_str()))),
                Atom::Symbol(s) => match Prim::from_name(s) {
                    Some(p) if !self.is_bound(s) => Expr::PrimRef(p),
                    _ => Expr::Var(s.clone()),
                },
            }),
            Sexp::Quote(inner, _) => quoted(inner).map(Expr::Const),
            Sexp::List(items, pos) => self.list(items, *pos),
        }
    }

    fn list(&mut self, items: &[Sexp], pos: SourcePos) -> Result<Expr, SyntaxError> {
        let Some(head) = items.first() else {
            return Err(SyntaxError::new(pos, "empty application ()"));
        };
        let args = &items[1..];
        let keyword = head.as_symbol().filter(|s| {
            KEYWORDS.contains(s) || (matches!(*s, "star" | "★") && args.is_empty() && !self.is_bound(s))
        });
        let Some(keyword) = keyword else {
            let f = self.expr(head)?;
            let args = args.iter().map(|a| self.expr(a)).collect::<Result<_, _>>()?;
            return Ok(Expr::Apply(Box::new(f), args));
        };
        let arity = |n: usize| -> Result<(), SyntaxError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(SyntaxError::new(
                    pos,
                    format!("{keyword}: expected {n} subexpression(s), found {}", args.len()),
                ))
            }
        };
        match keyword {
            "star" | "★" => Ok(Expr::Star),
            "quote" => {
                arity(1)?;
                quoted(&args[0]).map(Expr::Const)
            }
            "define" => Err(SyntaxError::new(pos, "define is only allowed at top level")),
            "lambda" => {
                let (params, body) = args
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(pos, "lambda: missing parameter list"))?;
                let Sexp::List(params, _) = params else {
                    return Err(SyntaxError::new(params.pos(), "lambda: expected a parameter list"));
                };
                self.lambda(params, body, pos)
            }
            "let" => {
                let (bindings, body) = args
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(pos, "let: missing bindings"))?;
                let bindings = binding_list(bindings)?;
                let names: Vec<Sexp> = bindings.iter().map(|(n, _)| (*n).clone()).collect();
                let inits = bindings
                    .iter()
                    .map(|(_, init)| self.expr(init))
                    .collect::<Result<Vec<_>, _>>()?;
                let lambda = self.lambda(&names, body, pos)?;
                Ok(Expr::Apply(Box::new(lambda), inits))
            }
            "let*" => {
                let (bindings, body) = args
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(pos, "let*: missing bindings"))?;
                let bindings = binding_list(bindings)?;
                self.let_star(&bindings, body, pos)
            }
            "box" => {
                arity(1)?;
                Ok(Expr::Box(Box::new(self.expr(&args[0])?)))
            }
            "unbox" => {
                arity(1)?;
                Ok(Expr::Unbox(Box::new(self.expr(&args[0])?)))
            }
            "set!" => {
                arity(2)?;
                Ok(Expr::SetBang(Box::new(self.expr(&args[0])?), Box::new(self.expr(&args[1])?)))
            }
            "let-label" => {
                arity(3)?;
                let name = args[0]
                    .as_symbol()
                    .ok_or_else(|| SyntaxError::new(args[0].pos(), "let-label: expected a label name"))?
                    .to_string();
                let policy = self.expr(&args[1])?;
                self.bound.push(name.clone());
                let body = self.expr(&args[2]);
                self.bound.pop();
                Ok(Expr::LetLabel {
                    name,
                    policy: Box::new(policy),
                    body: Box::new(body?),
                    site: SiteId(0),
                })
            }
            "facet" => {
                arity(3)?;
                Ok(Expr::FacetCreate {
                    label: Box::new(self.expr(&args[0])?),
                    pos: Box::new(self.expr(&args[1])?),
                    neg: Box::new(self.expr(&args[2])?),
                })
            }
            "obs" => {
                arity(3)?;
                Ok(Expr::Obs {
                    label: Box::new(self.expr(&args[0])?),
                    key: Box::new(self.expr(&args[1])?),
                    value: Box::new(self.expr(&args[2])?),
                })
            }
            "if" => {
                arity(3)?;
                Ok(Expr::If(
                    Box::new(self.expr(&args[0])?),
                    Box::new(self.expr(&args[1])?),
                    Box::new(self.expr(&args[2])?),
                ))
            }
            "begin" => {
                if args.is_empty() {
                    return Err(SyntaxError::new(pos, "begin: expected at least one expression"));
                }
                self.body(args, pos)
            }
            "and" => self.and(args),
            "or" => self.or(args),
            _ => unreachable!("unhandled keyword {keyword}"),
        }
    }

    fn lambda(&mut self, params: &[Sexp], body: &[Sexp], pos: SourcePos) -> Result<Expr, SyntaxError> {
        let mut names: Vec<String> = Vec::with_capacity(params.len());
        for p in params {
            let name = p
                .as_symbol()
                .ok_or_else(|| SyntaxError::new(p.pos(), "expected a parameter name"))?;
            if names.iter().any(|n| n == name) {
                return Err(SyntaxError::new(p.pos(), format!("duplicate parameter `{name}`")));
            }
            names.push(name.to_string());
        }
        if body.is_empty() {
            return Err(SyntaxError::new(pos, "lambda: empty body"));
        }
        let depth = self.bound.len();
        self.bound.extend(names.iter().cloned());
        let body = self.body(body, pos);
        self.bound.truncate(depth);
        Ok(Expr::lambda(names, body?))
    }

    fn body(&mut self, forms: &[Sexp], _pos: SourcePos) -> Result<Expr, SyntaxError> {
        let mut exprs = forms.iter().map(|f| self.expr(f)).collect::<Result<Vec<_>, _>>()?;
        if exprs.len() == 1 {
            Ok(exprs.pop().unwrap())
        } else {
            Ok(Expr::Begin(exprs))
        }
    }

    fn let_star(&mut self, bindings: &[(&Sexp, &Sexp)], body: &[Sexp], pos: SourcePos) -> Result<Expr, SyntaxError> {
        match bindings.split_first() {
            None => {
                let lambda = self.lambda(&[], body, pos)?;
                Ok(Expr::Apply(Box::new(lambda), Vec::new()))
            }
            Some(((name, init), rest)) => {
                let init = self.expr(init)?;
                let name = name
                    .as_symbol()
                    .ok_or_else(|| SyntaxError::new(name.pos(), "let*: expected a variable name"))?
                    .to_string();
                self.bound.push(name.clone());
                let inner = if rest.is_empty() {
                    self.body(body, pos)
                } else {
                    self.let_star(rest, body, pos)
                };
                self.bound.pop();
                Ok(Expr::Apply(Box::new(Expr::lambda(vec![name], inner?)), vec![init]))
            }
        }
    }

    fn and(&mut self, args: &[Sexp]) -> Result<Expr, SyntaxError> {
        match args {
            [] => Ok(Expr::Const(Datum::Bool(true))),
            [only] => self.expr(only),
            [first, rest @ ..] => {
                let first = self.expr(first)?;
                let rest = self.and(rest)?;
                Ok(Expr::If(Box::new(first), Box::new(rest), Box::new(Expr::Const(Datum::Bool(false)))))
            }
        }
    }

    fn or(&mut self, args: &[Sexp]) -> Result<Expr, SyntaxError> {
        match args {
            [] => Ok(Expr::Const(Datum::Bool(false))),
            [only] => self.expr(only),
            [first, rest @ ..] => {
                let first = self.expr(first)?;
                let mut used = BTreeSet::new();
                rest.iter().for_each(|s| collect_symbols(s, &mut used));
                let tmp = (0..)
                    .map(|i| if i == 0 { "or-tmp".to_string() } else { format!("or-tmp{i}") })
                    .find(|n| !used.contains(n))
                    .unwrap();
                self.bound.push(tmp.clone());
                let rest = self.or(rest);
                self.bound.pop();
                let test = Expr::If(
                    Box::new(Expr::Var(tmp.clone())),
                    Box::new(Expr::Var(tmp.clone())),
                    Box::new(rest?),
                );
                Ok(Expr::Apply(Box::new(Expr::lambda(vec![tmp], test)), vec![first]))
            }
        }
    }
}

fn collect_symbols(form: &Sexp, out: &mut BTreeSet<String>) {
    match form {
        Sexp::Atom(Atom::Symbol(s), _) => {
            out.insert(s.clone());
        }
        Sexp::Atom(..) => {}
        Sexp::List(items, _) => items.iter().for_each(|i| collect_symbols(i, out)),
        Sexp::Quote(inner, _) => collect_symbols(inner, out),
    }
}

fn binding_list(form: &Sexp) -> Result<Vec<(&Sexp, &Sexp)>, SyntaxError> {
    let Sexp::List(items, _) = form else {
        return Err(SyntaxError::new(form.pos(), "expected a binding list"));
    };
    items
        .iter()
        .map(|b| match b {
            Sexp::List(pair, _) if pair.len() == 2 && pair[0].as_symbol().is_some() => Ok((&pair[0], &pair[1])),
            other => Err(SyntaxError::new(other.pos(), "expected a binding of the form [name expr]")),
        })
        .collect()
}

fn quoted(form: &Sexp) -> Result<Datum, SyntaxError> {
    match form {
        Sexp::Atom(Atom::Int(n), _) => Ok(Datum::Int(*n)),
        Sexp::Atom(Atom::Bool(b), _) => Ok(Datum::Bool(*b)),
        Sexp::Atom(Atom::Str(s), _) => Ok(Datum::Str(Arc::from(s.as_str()))),
        Sexp::List(items, _) if items.is_empty() => Ok(Datum::Nil),
        Sexp::List(items, _) => items
            .iter()
            .map(|item| match item {
                Sexp::List(..) | Sexp::Quote(..) => {
                    Err(SyntaxError::new(item.pos(), "only flat quoted lists of constants are supported"))
                }
                other => quoted(other),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Datum::List),
        Sexp::Atom(Atom::Symbol(s), p) => Err(SyntaxError::new(*p, format!("quoted symbols are not supported: '{s}"))),
        Sexp::Quote(_, p) => Err(SyntaxError::new(*p, "nested quotation is not supported")),
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                TopLevel::Define(name, e) => writeln!(f, "(define {name} {e})")?,
                TopLevel::Expr(e) => writeln!(f, "{e}")?,
            }
        }
        Ok(())
    }
}
