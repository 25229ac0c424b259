//! Abstract syntax of the core language.

use std::fmt;
use std::sync::Arc;

use crate::eval::Prim;

/// Identifies one `let-label` form in a parsed program.
///
/// Sites are numbered in pre-order over the desugared tree, so two sources
/// that desugar to the same tree get the same numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteId(pub u32);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site{}", self.0)
    }
}

/// Literal data: numbers, booleans, strings and quoted flat lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Datum {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Nil,
    List(Vec<Datum>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda {
    pub params: Vec<String>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Datum),
    Var(String),
    Lambda(Arc<Lambda>),
    Apply(Box<Expr>, Vec<Expr>),
    Box(Box<Expr>),
    Unbox(Box<Expr>),
    SetBang(Box<Expr>, Box<Expr>),
    LetLabel {
        name: String,
        policy: Box<Expr>,
        body: Box<Expr>,
        site: SiteId,
    },
    FacetCreate {
        label: Box<Expr>,
        pos: Box<Expr>,
        neg: Box<Expr>,
    },
    Obs {
        label: Box<Expr>,
        key: Box<Expr>,
        value: Box<Expr>,
    },
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Begin(Vec<Expr>),
    PrimRef(Prim),
    Star,
}

impl Expr {
    pub fn lambda(params: Vec<String>, body: Expr) -> Expr {
        Expr::Lambda(Arc::new(Lambda { params, body }))
    }

    pub fn apply(f: Expr, args: Vec<Expr>) -> Expr {
        Expr::Apply(Box::new(f), args)
    }

    /// Calls `f` on every direct subexpression.
    pub fn for_each_child<'a>(&'a self, mut f: impl FnMut(&'a Expr)) {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::PrimRef(_) | Expr::Star => {}
            Expr::Lambda(l) => f(&l.body),
            Expr::Apply(fun, args) => {
                f(fun);
                args.iter().for_each(f);
            }
            Expr::Box(e) | Expr::Unbox(e) => f(e),
            Expr::SetBang(t, v) => {
                f(t);
                f(v);
            }
            Expr::LetLabel { policy, body, .. } => {
                f(policy);
                f(body);
            }
            Expr::FacetCreate { label, pos, neg } => {
                f(label);
                f(pos);
                f(neg);
            }
            Expr::Obs { label, key, value } => {
                f(label);
                f(key);
                f(value);
            }
            Expr::If(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
            Expr::Begin(es) => es.iter().for_each(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopLevel {
    Define(String, Expr),
    Expr(Expr),
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub items: Vec<TopLevel>,
    /// Source position of each item; not part of structural equality.
    pub positions: Vec<SourcePos>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Program {
    pub fn position(&self, index: usize) -> SourcePos {
        self.positions.get(index).copied().unwrap_or_default()
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.items.iter().filter_map(|item| match item {
            TopLevel::Define(name, e) => Some((name.as_str(), e)),
            TopLevel::Expr(_) => None,
        })
    }
}
