use std::fmt;
use std::sync::Arc;

use super::{Addr, Env, LabelId};
use crate::eval::Prim;
use crate::reader::{Datum, Lambda};

/// Runtime values. Everything except [`Value::Facet`] is a base value.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Nil,
    /// Result of effect-only primitives such as `display`.
    Void,
    Pair(Arc<(Value, Value)>),
    Closure(Arc<Closure>),
    /// Built-in functions. These are the untagged procedures: applying one to
    /// faceted arguments distributes it over the facets.
    Prim(Prim),
    Addr(Addr),
    /// Lazy failure.
    Star,
    Label(LabelId),
    Facet(Arc<Facet>),
}

#[derive(Debug)]
pub struct Closure {
    pub lambda: Arc<Lambda>,
    pub env: Env,
    pub name: Option<Arc<str>>,
}

/// `<label ? pos : neg>`
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub label: LabelId,
    pub pos: Value,
    pub neg: Value,
}

impl Value {
    pub fn pair(car: Value, cdr: Value) -> Value {
        Value::Pair(Arc::new((car, cdr)))
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    /// Builds a facet node as is, without canonicalizing. Use
    /// [`crate::facet::mkfacet`] for values that flow into evaluation.
    pub fn facet_node(label: LabelId, pos: Value, neg: Value) -> Value {
        Value::Facet(Arc::new(Facet { label, pos, neg }))
    }

    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Value {
        items.into_iter().rev().fold(Value::Nil, |tail, v| Value::pair(v, tail))
    }

    pub fn from_datum(d: &Datum) -> Value {
        match d {
            Datum::Int(n) => Value::Int(*n),
            Datum::Bool(b) => Value::Bool(*b),
            Datum::Str(s) => Value::Str(s.clone()),
            Datum::Nil => Value::Nil,
            Datum::List(items) => Value::list(items.iter().map(Value::from_datum).collect::<Vec<_>>()),
        }
    }

    /// Scheme truthiness: everything except `false` counts as true.
    pub fn is_truthy(&self) -> bool {
        !matches!(self, Value::Bool(false))
    }

    pub fn is_facet(&self) -> bool {
        matches!(self, Value::Facet(_))
    }

    pub fn as_facet(&self) -> Option<&Facet> {
        match self {
            Value::Facet(f) => Some(f),
            _ => None,
        }
    }

    /// True if a facet or a star occurs anywhere inside this value's data
    /// (facets, pairs).
    pub fn contains_facet_or_star(&self) -> bool {
        match self {
            Value::Facet(_) | Value::Star => true,
            Value::Pair(p) => p.0.contains_facet_or_star() || p.1.contains_facet_or_star(),
            _ => false,
        }
    }

    /// Renders the value with store addresses made opaque. Two runs that
    /// allocate a different number of boxes still print equal results.
    pub fn observable(&self) -> Observable<'_> {
        Observable(self)
    }

    /// Collects (x . y) integer pairs from a proper list; `None` if the value
    /// has any other shape.
    pub fn list_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Nil => return Some(out),
                Value::Pair(p) => {
                    out.push(p.0.clone());
                    cur = &p.1;
                }
                _ => return None,
            }
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Nil, Value::Nil) | (Value::Void, Value::Void) | (Value::Star, Value::Star) => true,
            (Value::Pair(a), Value::Pair(b)) => a == b,
            (Value::Closure(a), Value::Closure(b)) => Arc::ptr_eq(a, b),
            (Value::Prim(a), Value::Prim(b)) => a == b,
            (Value::Addr(a), Value::Addr(b)) => a == b,
            (Value::Label(a), Value::Label(b)) => a == b,
            (Value::Facet(a), Value::Facet(b)) => a == b,
            _ => false,
        }
    }
}

struct Printer {
    opaque_addresses: bool,
}

impl Printer {
    fn value(&self, f: &mut fmt::Formatter<'_>, v: &Value, top: bool) -> fmt::Result {
        match v {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => crate::reader::write_str_literal(f, s),
            Value::Nil if top => f.write_str("'()"),
            Value::Nil => f.write_str("()"),
            Value::Void => f.write_str("#void"),
            Value::Pair(_) => self.pair(f, v),
            Value::Closure(c) => write!(f, "#proc:{}", c.name.as_deref().unwrap_or("lambda")),
            Value::Prim(p) => write!(f, "#proc:{}", p.name()),
            Value::Addr(a) if self.opaque_addresses => {
                let _ = a;
                f.write_str("#box")
            }
            Value::Addr(a) => write!(f, "{a}"),
            Value::Star => f.write_str("#star"),
            Value::Label(l) => write!(f, "#label:{l}"),
            Value::Facet(fac) => {
                write!(f, "#facet<{} ? ", fac.label)?;
                self.value(f, &fac.pos, true)?;
                f.write_str(" : ")?;
                self.value(f, &fac.neg, true)?;
                f.write_str(">")
            }
        }
    }

    fn pair(&self, f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
        f.write_str("(")?;
        let mut cur = v;
        let mut first = true;
        loop {
            match cur {
                Value::Pair(p) => {
                    if !first {
                        f.write_str(" ")?;
                    }
                    first = false;
                    self.value(f, &p.0, false)?;
                    cur = &p.1;
                }
                Value::Nil => break,
                tail => {
                    f.write_str(" . ")?;
                    self.value(f, tail, false)?;
                    break;
                }
            }
        }
        f.write_str(")")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            opaque_addresses: false,
        }
        .value(f, self, true)
    }
}

pub struct Observable<'a>(&'a Value);

impl fmt::Display for Observable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer { opaque_addresses: true }.value(f, self.0, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing() {
        let l = LabelId::new(0, "Alice");
        assert_eq!(Value::Int(-4).to_string(), "-4");
        assert_eq!(Value::Bool(true).to_string(), "true");
        assert_eq!(Value::Nil.to_string(), "'()");
        assert_eq!(Value::Star.to_string(), "#star");
        assert_eq!(Value::pair(Value::Int(1), Value::Int(2)).to_string(), "(1 . 2)");
        let board = Value::list([Value::pair(Value::Int(1), Value::Int(2)), Value::pair(Value::Int(3), Value::Int(4))]);
        assert_eq!(board.to_string(), "((1 . 2) (3 . 4))");
        assert_eq!(Value::pair(Value::list([board.clone()]), Value::Bool(false)).to_string(), "((((1 . 2) (3 . 4))) . false)");
        assert_eq!(Value::pair(Value::Nil, Value::Int(1)).to_string(), "(() . 1)");
        assert_eq!(
            Value::facet_node(l.clone(), Value::Bool(true), Value::Bool(false)).to_string(),
            "#facet<Alice ? true : false>"
        );
        assert_eq!(Value::facet_node(l, Value::Nil, Value::Star).to_string(), "#facet<Alice ? '() : #star>");
        assert_eq!(Value::Prim(Prim::Car).to_string(), "#proc:car");
        assert_eq!(Value::str("a\"b").to_string(), "\"a\\\"b\"");
        assert_eq!(Value::Addr(Addr(3)).to_string(), "#box:3");
        assert_eq!(Value::Addr(Addr(3)).observable().to_string(), "#box");
    }

    #[test]
    fn truthiness() {
        assert!(Value::Int(0).is_truthy());
        assert!(Value::Nil.is_truthy());
        assert!(!Value::Bool(false).is_truthy());
    }
}
