//! Prints core syntax back as re-readable s-expressions.

use std::fmt;

use super::ast::{Datum, Expr};

pub(crate) fn write_str_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl Datum {
    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Int(n) => write!(f, "{n}"),
            Datum::Bool(b) => write!(f, "{b}"),
            Datum::Str(s) => write_str_literal(f, s),
            Datum::Nil => f.write_str("()"),
            Datum::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    item.fmt_inner(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Nil | Datum::List(_) => {
                f.write_str("'")?;
                self.fmt_inner(f)
            }
            other => other.fmt_inner(f),
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, head: &str, items: &[&Expr]) -> fmt::Result {
    write!(f, "({head}")?;
    for item in items {
        write!(f, " {item}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(d) => write!(f, "{d}"),
            Expr::Var(name) => f.write_str(name),
            Expr::PrimRef(p) => f.write_str(p.name()),
            Expr::Star => f.write_str("(star)"),
            Expr::Lambda(l) => write!(f, "(lambda ({}) {})", l.params.join(" "), l.body),
            Expr::Apply(fun, args) => {
                write!(f, "({fun}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Expr::Box(e) => list(f, "box", &[e]),
            Expr::Unbox(e) => list(f, "unbox", &[e]),
            Expr::SetBang(t, v) => list(f, "set!", &[t, v]),
            Expr::LetLabel { name, policy, body, .. } => write!(f, "(let-label {name} {policy} {body})"),
            Expr::FacetCreate { label, pos, neg } => list(f, "facet", &[label, pos, neg]),
            Expr::Obs { label, key, value } => list(f, "obs", &[label, key, value]),
            Expr::If(c, t, e) => list(f, "if", &[c, t, e]),
            Expr::Begin(es) => {
                let refs: Vec<&Expr> = es.iter().collect();
                list(f, "begin", &refs)
            }
        }
    }
}
